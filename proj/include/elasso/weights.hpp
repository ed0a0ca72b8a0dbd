#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "elasso/errors.hpp"
#include "elasso/mp.hpp"

namespace elasso {

/// Penalty weights: nonincreasing and summing to zero.
struct WeightVector {
  Eigen::VectorXd a;
  bool strictly_decreasing = false;

  int size() const { return static_cast<int>(a.size()); }
};

/// Validates ordering, re-centres an O(1e-6) sum drift, and rejects
/// anything unsorted or further from sum zero. No silent sorting.
inline WeightVector make_weight_vector(const Eigen::VectorXd& a) {
  const int q = static_cast<int>(a.size());
  if (q < 1) throw DimensionTooSmall("weights: empty vector");
  for (int j = 0; j < q; ++j)
    if (!std::isfinite(a[j])) throw BadInput("weights: non-finite entry");
  bool strict = true;
  for (int j = 0; j + 1 < q; ++j) {
    if (a[j] < a[j + 1])
      throw BadInput("weights: entries must be nonincreasing");
    if (a[j] <= a[j + 1]) strict = false;
  }
  double s = a.sum();
  if (std::abs(s) > 1e-6)
    throw BadInput("weights: entries must sum to zero (got sum " +
                   std::to_string(s) + ")");
  WeightVector w;
  w.a = a.array() - s / q;
  w.a.array() -= w.a.sum() / q;  // second pass kills the rounding residue
  w.strictly_decreasing = strict;
  return w;
}

/// Centred decreasing Marchenko-Pastur quantiles:
/// a_j = F^{-1}((q-j+0.5)/q; q/n) - mean of those quantiles.
inline WeightVector mp_weights(int q, int n) {
  if (q < 1) throw DimensionTooSmall("mp_weights: q must be >= 1");
  if (q >= n)
    throw DimensionExceedsSample(
        "mp_weights: requires q < n; supply weights explicitly when q >= n");
  MPDistribution dist(static_cast<double>(q) / n);
  Eigen::VectorXd xi(q);
  for (int j = 1; j <= q; ++j)
    xi[j - 1] = dist.quantile((q - j + 0.5) / q);
  Eigen::VectorXd a = xi.array() - xi.mean();
  a.array() -= a.mean();
  WeightVector w;
  w.a = a;
  w.strictly_decreasing = true;
  return w;
}

/// Condition-number penalty log(lambda_1/lambda_q): (1, 0, ..., 0, -1).
inline WeightVector condition_number_weights(int q) {
  if (q < 2) throw DimensionTooSmall("condition_number_weights: q must be >= 2");
  Eigen::VectorXd a = Eigen::VectorXd::Zero(q);
  a[0] = 1.0;
  a[q - 1] = -1.0;
  WeightVector w;
  w.a = a;
  w.strictly_decreasing = (q == 2);
  return w;
}

/// Weights (1, ..., 1, -(q-1)): lassoes only the smallest eigenvalues.
inline WeightVector smallest_group_weights(int q) {
  if (q < 2) throw DimensionTooSmall("smallest_group_weights: q must be >= 2");
  Eigen::VectorXd a = Eigen::VectorXd::Ones(q);
  a[q - 1] = -(q - 1.0);
  WeightVector w;
  w.a = a;
  w.strictly_decreasing = (q == 2);
  return w;
}

/// Weights a_j = q + 1 - 2j from the all-pairs log-gap penalty.
inline WeightVector pairwise_weights(int q) {
  if (q < 2) throw DimensionTooSmall("pairwise_weights: q must be >= 2");
  Eigen::VectorXd a(q);
  for (int j = 1; j <= q; ++j) a[j - 1] = q + 1.0 - 2.0 * j;
  WeightVector w;
  w.a = a;
  w.strictly_decreasing = true;
  return w;
}

}  // namespace elasso
