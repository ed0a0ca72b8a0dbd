#pragma once

#include <Eigen/Core>
#include <cmath>

#include "elasso/errors.hpp"
#include "elasso/spectrum.hpp"
#include "elasso/weights.hpp"

namespace elasso {

namespace detail {
inline void require_positive(const Eigen::VectorXd& lambda,
                             const char* where) {
  for (int j = 0; j < lambda.size(); ++j)
    if (!(lambda[j] > 0.0))
      throw NonpositiveEigenvalue(std::string(where) +
                                  ": eigenvalues must be positive");
}
}  // namespace detail

/// sum a_j log(lambda_j). Nonnegative for ordered eigenvalues and sum-zero
/// nonincreasing weights; zero iff all eigenvalues are equal.
inline double elasso_penalty(const Eigen::VectorXd& lambda,
                             const WeightVector& w) {
  if (lambda.size() != w.a.size())
    throw LengthMismatch("elasso_penalty: eigenvalue/weight length mismatch");
  detail::require_positive(lambda, "elasso_penalty");
  return (w.a.array() * lambda.array().log()).sum();
}

/// Kullback-Leibler distance to the identity: sum(1/lambda_j + log lambda_j).
inline double kl_penalty(const Eigen::VectorXd& lambda) {
  detail::require_positive(lambda, "kl_penalty");
  return (lambda.array().inverse() + lambda.array().log()).sum();
}

/// log of arithmetic over geometric eigenvalue mean; scale invariant.
inline double eccentricity_penalty(const Eigen::VectorXd& lambda) {
  detail::require_positive(lambda, "eccentricity_penalty");
  return std::log(lambda.mean()) - lambda.array().log().mean();
}

/// Closed-form minimizer of the KL-penalized objective:
/// (1-beta) S + beta I with beta = eta/(1+eta). Same basis as S.
inline Spectrum ledoit_wolf(const Spectrum& S, double eta) {
  if (eta < 0.0) throw NegativeTuning("ledoit_wolf: eta must be >= 0");
  double beta = eta / (1.0 + eta);
  Spectrum out = S;
  out.eigenvalues = (1.0 - beta) * S.eigenvalues.array() + beta;
  return out;
}

}  // namespace elasso
