#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "elasso/errors.hpp"

namespace elasso {

/// Observations in rows, variables in columns.
struct DataMatrix {
  Eigen::MatrixXd values;

  int n() const { return static_cast<int>(values.rows()); }
  int q() const { return static_cast<int>(values.cols()); }
};

inline DataMatrix make_data_matrix(const Eigen::MatrixXd& values) {
  if (values.rows() < 2) throw BadInput("data: need at least 2 observations");
  if (values.cols() < 1) throw BadInput("data: need at least 1 variable");
  if (!values.allFinite()) throw BadInput("data: non-finite entry");
  return DataMatrix{values};
}

/// Eigenvalues (nonincreasing, positive) and orthonormal eigenbasis of a
/// covariance estimate. `mean` is present when built from data, else empty.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd basis;
  Eigen::VectorXd mean;

  int q() const { return static_cast<int>(eigenvalues.size()); }

  Eigen::MatrixXd reconstruct() const {
    return basis * eigenvalues.asDiagonal() * basis.transpose();
  }
};

namespace detail {

// Eigen returns ascending eigenvalues; flip to nonincreasing and fix each
// eigenvector's sign so the first nonzero coordinate is positive.
inline Spectrum decompose_ordered(const Eigen::MatrixXd& S) {
  const int q = static_cast<int>(S.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw Error("spectral decomposition did not converge");
  Spectrum spec;
  spec.eigenvalues.resize(q);
  spec.basis.resize(q, q);
  for (int j = 0; j < q; ++j) {
    spec.eigenvalues[j] = es.eigenvalues()[q - 1 - j];
    Eigen::VectorXd v = es.eigenvectors().col(q - 1 - j);
    for (int i = 0; i < q; ++i) {
      if (std::abs(v[i]) > 1e-12) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
    spec.basis.col(j) = v;
  }
  double d1 = spec.eigenvalues[0];
  double dq = spec.eigenvalues[q - 1];
  if (dq <= q * std::numeric_limits<double>::epsilon() * d1)
    throw SingularCovariance("covariance estimate is numerically singular");
  return spec;
}

}  // namespace detail

/// Sample covariance S = n^{-1} sum (x_i - xbar)(x_i - xbar)^T (divisor n)
/// followed by its spectral decomposition.
inline Spectrum sample_covariance(const DataMatrix& data) {
  const int n = data.n();
  Eigen::VectorXd mean = data.values.colwise().mean();
  Eigen::MatrixXd centered = data.values.rowwise() - mean.transpose();
  Eigen::MatrixXd S = (centered.transpose() * centered) / n;
  Spectrum spec = detail::decompose_ordered(S);
  spec.mean = mean;
  return spec;
}

/// Entry point for user-supplied symmetric matrices (e.g. robust covariance
/// estimates). Asymmetry beyond 1e-10 relative is rejected; below that the
/// matrix is symmetrized by averaging.
inline Spectrum spectral_decompose(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols())
    throw NotSymmetric("spectral_decompose: matrix must be square");
  double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw NotSymmetric("spectral_decompose: matrix is not symmetric");
  Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
  return detail::decompose_ordered(sym);
}

/// tr(Sigma^{-1} S) + log det Sigma, minimized over Sigma at S itself.
inline double neg_log_lik(const Spectrum& sigma, const Spectrum& S) {
  if (sigma.q() != S.q())
    throw LengthMismatch("neg_log_lik: dimension mismatch");
  Eigen::MatrixXd sigma_inv = sigma.basis *
                              sigma.eigenvalues.cwiseInverse().asDiagonal() *
                              sigma.basis.transpose();
  double trace_term = (sigma_inv * S.reconstruct()).trace();
  double logdet = sigma.eigenvalues.array().log().sum();
  return trace_term + logdet;
}

using PenaltyFn = std::function<double(const Eigen::VectorXd& eigenvalues)>;

inline double penalized_objective(const Spectrum& sigma, const Spectrum& S,
                                  double eta, const PenaltyFn& penalty) {
  if (eta < 0.0)
    throw NegativeTuning("penalized_objective: eta must be >= 0");
  return neg_log_lik(sigma, S) + eta * penalty(sigma.eigenvalues);
}

}  // namespace elasso
