#pragma once

#include <Eigen/Core>

#include "elasso/errors.hpp"
#include "elasso/path.hpp"
#include "elasso/penalties.hpp"

namespace elasso {

/// Constraint level matched to a tuning value, with the shared estimate.
struct DualitySolution {
  double kappa = 0.0;
  double eta = 0.0;
  Eigen::VectorXd estimate;
};

/// kappa(eta): penalty value of the path estimate. Continuous and
/// non-increasing in eta; zero at and beyond the last finite knot.
inline double kappa_of_eta(const ElassoPath& path, double eta) {
  return elasso_penalty(path.solve_at(eta), path.weights());
}

/// Solves the constrained problem argmin{ l | penalty <= kappa } by
/// inverting the monotone map kappa(eta) with bisection. Returns the
/// smallest eta achieving the constraint level.
inline DualitySolution constrained_solve(const Eigen::VectorXd& d,
                                         const WeightVector& w,
                                         double kappa) {
  if (!(kappa > 0.0))
    throw InfeasibleConstraint("constrained_solve: kappa must be positive");
  ElassoPath path(d, w);
  double kappa_upper = kappa_of_eta(path, 0.0);
  DualitySolution sol;
  sol.kappa = kappa;
  if (kappa >= kappa_upper) {
    // Unconstrained optimum is feasible.
    sol.eta = 0.0;
    sol.estimate = d;
    return sol;
  }
  // kappa(eta) = 0 exactly at the last finite knot, so the root is inside.
  double lo = 0.0, hi = path.largest_finite_knot() + 1.0;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    (kappa_of_eta(path, mid) > kappa ? lo : hi) = mid;
  }
  sol.eta = 0.5 * (lo + hi);
  sol.estimate = path.solve_at(sol.eta);
  return sol;
}

}  // namespace elasso
