#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "elasso/errors.hpp"
#include "elasso/spectrum.hpp"

namespace elasso {

/// Conditioning setup: the first `head` variables predict the rest from a
/// fitted covariance and mean.
struct PredictionSplit {
  int head = 0;
  Spectrum estimate;
  Eigen::VectorXd mean;
};

inline PredictionSplit make_prediction_split(int head, Spectrum estimate,
                                             Eigen::VectorXd mean) {
  const int q = estimate.q();
  if (head < 1 || head >= q)
    throw BadInput("prediction split: head count must satisfy 1 <= p < q");
  if (mean.size() != q)
    throw LengthMismatch("prediction split: mean length mismatch");
  return PredictionSplit{head, std::move(estimate), std::move(mean)};
}

/// Conditional mean of the tail block given the head block:
/// mu2 + Sigma21 Sigma11^{-1} (x1 - mu1).
inline Eigen::VectorXd conditional_predict(const PredictionSplit& split,
                                           const Eigen::VectorXd& x_head) {
  const int p = split.head;
  const int q = split.estimate.q();
  if (x_head.size() != p)
    throw LengthMismatch("conditional_predict: head length mismatch");
  Eigen::MatrixXd sigma = split.estimate.reconstruct();
  Eigen::LLT<Eigen::MatrixXd> chol(sigma.topLeftCorner(p, p));
  if (chol.info() != Eigen::Success)
    throw SingularBlock("conditional_predict: leading block is singular");
  Eigen::VectorXd weights = chol.solve(x_head - split.mean.head(p));
  return split.mean.tail(q - p) + sigma.bottomLeftCorner(q - p, p) * weights;
}

/// Per-component mean absolute forecast error over rows, plus the grand
/// average in the last slot of the returned pair.
struct AAFEResult {
  Eigen::VectorXd per_component;
  double average = 0.0;
};

inline AAFEResult aafe(const Eigen::MatrixXd& predictions,
                       const Eigen::MatrixXd& actuals) {
  if (predictions.rows() != actuals.rows() ||
      predictions.cols() != actuals.cols())
    throw ShapeMismatch("aafe: prediction/actual shape mismatch");
  if (predictions.rows() < 1) throw ShapeMismatch("aafe: need at least one row");
  AAFEResult r;
  r.per_component =
      (predictions - actuals).cwiseAbs().colwise().mean().transpose();
  r.average = r.per_component.mean();
  return r;
}

}  // namespace elasso
