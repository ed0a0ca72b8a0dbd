#pragma once

// Shared random-instance generators for the property tests.

#include <Eigen/Core>
#include <algorithm>
#include <random>

#include "elasso/rng.hpp"
#include "elasso/weights.hpp"

namespace testutil {

// Strictly decreasing positive eigenvalues with log-normal spacing.
inline Eigen::VectorXd random_eigenvalues(int q, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd d(q);
  double cur = std::exp(normal(gen));
  for (int j = 0; j < q; ++j) {
    d[j] = cur;
    cur *= std::exp(-std::abs(normal(gen)) - 1e-3);
  }
  return d;
}

// Sum-zero nonincreasing weights: sorted normals, centred.
inline elasso::WeightVector random_weights(int q, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd a(q);
  for (int j = 0; j < q; ++j) a[j] = normal(gen);
  std::sort(a.data(), a.data() + q, std::greater<double>());
  a.array() -= a.mean();
  return elasso::make_weight_vector(a);
}

}  // namespace testutil
