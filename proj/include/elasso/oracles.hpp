#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "elasso/errors.hpp"
#include "elasso/path.hpp"
#include "elasso/weights.hpp"

namespace elasso {

/// Objective over the ordered eigenvalue estimates:
/// sum_j { d_j / lambda_j + (1 + eta a_j) log lambda_j }.
inline double path_objective(const Eigen::VectorXd& d, const WeightVector& w,
                             double eta, const Eigen::VectorXd& lambda) {
  double v = 0.0;
  for (int j = 0; j < d.size(); ++j)
    v += d[j] / lambda[j] + (1.0 + eta * w.a[j]) * std::log(lambda[j]);
  return v;
}

/// Exhaustive verification oracle: evaluates the grouped critical point of
/// every ordered contiguous partition (2^{q-1} of them), keeps the feasible
/// ones, and returns the objective minimizer.
inline Eigen::VectorXd brute_force_solve(const Eigen::VectorXd& d,
                                         const WeightVector& w, double eta) {
  detail::require_path_inputs(d, w);
  if (eta < 0.0) throw NegativeTuning("brute_force_solve: eta must be >= 0");
  const int q = static_cast<int>(d.size());
  if (q > 12)
    throw DimensionTooLarge("brute_force_solve: q must be <= 12");
  double best_obj = kInf;
  Eigen::VectorXd best;
  const double tie_tol = 1e-12 * d[0];
  for (unsigned mask = 0; mask < (1u << (q - 1)); ++mask) {
    std::vector<int> sizes;
    int run = 1;
    for (int j = 0; j < q - 1; ++j) {
      if (mask & (1u << j)) {
        sizes.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    sizes.push_back(run);
    Partition p = detail::group_stats_unchecked(d, w.a, sizes);
    bool feasible = true;
    Eigen::VectorXd grouped(p.groups());
    for (int k = 0; k < p.groups() && feasible; ++k) {
      double denom = 1.0 + eta * p.a_means[k];
      if (!(denom > 0.0)) {
        feasible = false;
        break;
      }
      grouped[k] = p.d_means[k] / denom;
      if (!(grouped[k] > 0.0)) feasible = false;
      if (k > 0 && grouped[k] > grouped[k - 1] + tie_tol) feasible = false;
    }
    if (!feasible) continue;
    Eigen::VectorXd lambda(q);
    int pos = 0;
    for (int k = 0; k < p.groups(); ++k) {
      lambda.segment(pos, p.sizes[k]).setConstant(grouped[k]);
      pos += p.sizes[k];
    }
    double obj = path_objective(d, w, eta, lambda);
    if (obj < best_obj) {
      best_obj = obj;
      best = lambda;
    }
  }
  if (best.size() == 0)
    throw Error("brute_force_solve: no feasible partition found");
  return best;
}

namespace detail {

// Euclidean projection onto the nonincreasing cone (pool adjacent
// violators with unit weights, applied to -y).
inline Eigen::VectorXd project_nonincreasing(const Eigen::VectorXd& y) {
  const int n = static_cast<int>(y.size());
  std::vector<double> value;
  std::vector<int> count;
  value.reserve(n);
  count.reserve(n);
  for (int j = 0; j < n; ++j) {
    value.push_back(y[j]);
    count.push_back(1);
    while (value.size() > 1 &&
           value[value.size() - 2] < value[value.size() - 1]) {
      double merged = (value[value.size() - 2] * count[count.size() - 2] +
                       value[value.size() - 1] * count[count.size() - 1]) /
                      (count[count.size() - 2] + count[count.size() - 1]);
      count[count.size() - 2] += count[count.size() - 1];
      value[value.size() - 2] = merged;
      value.pop_back();
      count.pop_back();
    }
  }
  Eigen::VectorXd out(n);
  int pos = 0;
  for (std::size_t b = 0; b < value.size(); ++b) {
    out.segment(pos, count[b]).setConstant(value[b]);
    pos += count[b];
  }
  return out;
}

}  // namespace detail

/// Second verification oracle: minimizes the strictly convex log-eigenvalue
/// objective sum{d_j exp(-y_j) + (1 + eta a_j) y_j} over nonincreasing y by
/// projected gradient with backtracking, and returns exp(y).
inline Eigen::VectorXd convex_oracle(const Eigen::VectorXd& d,
                                     const WeightVector& w, double eta,
                                     int max_iter = 200000) {
  detail::require_path_inputs(d, w);
  if (eta < 0.0) throw NegativeTuning("convex_oracle: eta must be >= 0");
  if (d.size() > 50)
    throw DimensionTooLarge("convex_oracle: q must be <= 50");

  auto objective = [&](const Eigen::VectorXd& y) {
    return ((d.array() * (-y).array().exp()) +
            (1.0 + eta * w.a.array()) * y.array())
        .sum();
  };
  auto gradient = [&](const Eigen::VectorXd& y) {
    return Eigen::VectorXd(-(d.array() * (-y).array().exp()) + 1.0 +
                           eta * w.a.array());
  };

  Eigen::VectorXd y =
      detail::project_nonincreasing(d.array().log().matrix());
  double fy = objective(y);
  double step = 1.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd g = gradient(y);
    // Stationarity of the projected gradient map ends the search; the
    // rounding floor of the iterates can keep them oscillating forever.
    double station =
        (detail::project_nonincreasing(y - g) - y).lpNorm<Eigen::Infinity>();
    if (station < 1e-11 * (1.0 + y.cwiseAbs().maxCoeff()))
      return y.array().exp();
    Eigen::VectorXd y_next;
    double f_next = 0.0;
    // Backtrack until the quadratic upper bound holds.
    for (int bt = 0; bt < 60; ++bt) {
      y_next = detail::project_nonincreasing(y - step * g);
      Eigen::VectorXd diff = y_next - y;
      f_next = objective(y_next);
      if (f_next <=
          fy + g.dot(diff) + 0.5 / step * diff.squaredNorm() + 1e-15)
        break;
      step *= 0.5;
    }
    double move = (y_next - y).lpNorm<Eigen::Infinity>();
    y = y_next;
    fy = f_next;
    if (move < 1e-13) return y.array().exp();
    step *= 1.25;  // allow the step to grow back
  }
  Eigen::VectorXd g = gradient(y);
  double gap = (detail::project_nonincreasing(y - g) - y).norm();
  throw NoConvergence("convex_oracle: iteration budget exhausted", gap);
}

}  // namespace elasso
