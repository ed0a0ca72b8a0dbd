#pragma once

#include <Eigen/Core>
#include <Eigen/QR>
#include <cmath>
#include <random>
#include <vector>

#include "elasso/errors.hpp"
#include "elasso/parallel.hpp"
#include "elasso/path.hpp"
#include "elasso/rng.hpp"
#include "elasso/selection.hpp"
#include "elasso/spectrum.hpp"

namespace elasso {

/// Multi-spiked diagonal covariance model: strictly decreasing eigenvalue
/// levels with given multiplicities; the last level is the noise variance.
struct SpikedModel {
  int q = 0;
  std::vector<int> group_sizes;
  std::vector<double> group_values;

  double sigma2() const { return group_values.back(); }

  Eigen::VectorXd eigenvalues() const {
    Eigen::VectorXd lam(q);
    int pos = 0;
    for (std::size_t k = 0; k < group_sizes.size(); ++k) {
      lam.segment(pos, group_sizes[k]).setConstant(group_values[k]);
      pos += group_sizes[k];
    }
    return lam;
  }
};

inline SpikedModel make_spiked_model(std::vector<int> sizes,
                                     std::vector<double> values) {
  if (sizes.empty() || sizes.size() != values.size())
    throw BadGrouping("spiked model: sizes and values must match");
  int q = 0;
  for (int m : sizes) {
    if (m <= 0) throw BadGrouping("spiked model: sizes must be positive");
    q += m;
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0))
      throw BadGrouping("spiked model: values must be positive");
    if (k > 0 && !(values[k] < values[k - 1]))
      throw BadGrouping("spiked model: values must be strictly decreasing");
  }
  return SpikedModel{q, std::move(sizes), std::move(values)};
}

namespace detail {

inline Eigen::MatrixXd standard_normal(int n, int q, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < q; ++j) z(i, j) = normal(gen);
  return z;
}

inline Eigen::MatrixXd random_orthogonal(int q, std::mt19937_64& gen) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(standard_normal(q, q, gen));
  Eigen::MatrixXd Q = qr.householderQ();
  // Fix the sign ambiguity of the factorization.
  Eigen::VectorXd diag = qr.matrixQR().diagonal();
  for (int j = 0; j < q; ++j)
    if (diag[j] < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

}  // namespace detail

/// n i.i.d. draws from N(0, Sigma_o) with Sigma_o diagonal per the model.
/// With rotate = true, a seeded random orthogonal conjugation is applied
/// (for exercising orthogonal equivariance; the estimator itself never
/// depends on the rotation).
inline DataMatrix sample_gaussian(const SpikedModel& model, int n,
                                  std::uint64_t seed, bool rotate = false) {
  if (n < 2) throw BadInput("sample_gaussian: n must be >= 2");
  auto gen = substream(seed, 0);
  Eigen::VectorXd sd = model.eigenvalues().cwiseSqrt();
  Eigen::MatrixXd x = detail::standard_normal(n, model.q, gen);
  x = x * sd.asDiagonal();
  if (rotate) {
    Eigen::MatrixXd Q = detail::random_orthogonal(model.q, gen);
    x = x * Q.transpose();
  }
  return DataMatrix{x};
}

/// General zero-mean Gaussian sampling for a dense covariance.
inline DataMatrix sample_gaussian_cov(const Eigen::MatrixXd& sigma, int n,
                                      std::uint64_t seed) {
  if (n < 2) throw BadInput("sample_gaussian_cov: n must be >= 2");
  Eigen::LLT<Eigen::MatrixXd> chol(sigma);
  if (chol.info() != Eigen::Success)
    throw SingularCovariance("sample_gaussian_cov: covariance not positive definite");
  auto gen = substream(seed, 0);
  Eigen::MatrixXd z =
      detail::standard_normal(n, static_cast<int>(sigma.rows()), gen);
  return DataMatrix{z * chol.matrixU()};
}

/// Limiting sample eigenvalue of a spike under q/n -> nu. Above the phase
/// transition lambda > sigma2 (1 + sqrt(nu)) the limit is
/// lambda (1 + sigma2 nu / (lambda - sigma2)); below it the spike is
/// absorbed into the bulk edge sigma2 (1 + sqrt(nu))^2.
struct SpikedLimit {
  bool above_transition = false;
  double value = 0.0;
};

inline SpikedLimit spiked_limit(double lambda, double sigma2, double nu) {
  if (!(lambda > 0.0) || !(sigma2 > 0.0) || nu < 0.0)
    throw BadInput("spiked_limit: invalid arguments");
  if (nu == 0.0) return {true, lambda};
  double s = std::sqrt(nu);
  if (lambda > sigma2 * (1.0 + s))
    return {true, lambda * (1.0 + sigma2 * nu / (lambda - sigma2))};
  return {false, sigma2 * (1.0 + s) * (1.0 + s)};
}

/// Per-replicate largest finite knots of the elasso path under the model.
struct KnotExperimentResult {
  // replicate x top_k, knots sorted descending within each replicate
  Eigen::MatrixXd top_knots;
  Eigen::VectorXd mean;  // per position
  Eigen::VectorXd sd;
};

inline KnotExperimentResult knot_experiment(const SpikedModel& model, int n,
                                            const WeightSpec& wspec,
                                            int replicates,
                                            std::uint64_t seed,
                                            int top_k = 2) {
  if (n <= model.q) throw DimensionExceedsSample("knot_experiment: need n > q");
  if (replicates < 1) throw BadInput("knot_experiment: need replicates >= 1");
  WeightVector w = resolve_weights(wspec, model.q, n);
  Eigen::VectorXd sd_vec = model.eigenvalues().cwiseSqrt();
  KnotExperimentResult out;
  out.top_knots.resize(replicates, top_k);
  parallel_for(replicates, [&](int rep) {
    auto gen = substream(seed, static_cast<std::uint64_t>(rep));
    Eigen::MatrixXd x = detail::standard_normal(n, model.q, gen);
    x = x * sd_vec.asDiagonal();
    Spectrum spec = sample_covariance(DataMatrix{x});
    ElassoPath path(spec.eigenvalues, w);
    const auto& knots = path.knots();
    for (int j = 0; j < top_k; ++j) {
      int idx = static_cast<int>(knots.size()) - 1 - j;
      out.top_knots(rep, j) = idx >= 0 ? knots[idx] : 0.0;
    }
  });
  out.mean = out.top_knots.colwise().mean();
  out.sd.resize(top_k);
  for (int j = 0; j < top_k; ++j) {
    double m = out.mean[j];
    out.sd[j] = replicates > 1
                    ? std::sqrt((out.top_knots.col(j).array() - m)
                                    .square()
                                    .sum() /
                                (replicates - 1))
                    : 0.0;
  }
  return out;
}

/// Free parameters of the covariance model with grouped eigenvalues:
/// q(q+1)/2 - m(m-1)/2 - (q-g), m the largest multiplicity.
inline long param_count(int q, const std::vector<int>& group_sizes) {
  if (group_sizes.empty()) throw BadGrouping("param_count: empty grouping");
  long sum = 0, m = 0;
  for (int s : group_sizes) {
    if (s <= 0) throw BadGrouping("param_count: sizes must be positive");
    sum += s;
    m = std::max<long>(m, s);
  }
  if (sum != q) throw BadGrouping("param_count: sizes must sum to q");
  long g = static_cast<long>(group_sizes.size());
  return static_cast<long>(q) * (q + 1) / 2 - m * (m - 1) / 2 - (q - g);
}

/// Monte-Carlo comparison of the squared Frobenius errors of the sample
/// covariance and of its spherical collapse (mean eigenvalue times I)
/// under a true spherical covariance. The ratio is scale free.
struct MSEExperimentResult {
  double mse_sample = 0.0;
  double mse_sphere = 0.0;
  double ratio = 0.0;
  double theoretical_ratio = 0.0;
  std::vector<double> per_rep_sample;
  std::vector<double> per_rep_sphere;
};

inline MSEExperimentResult mse_experiment(int q, int n, double sigma2,
                                          int replicates,
                                          std::uint64_t seed) {
  if (n <= q) throw DimensionExceedsSample("mse_experiment: need n > q");
  if (!(sigma2 > 0.0)) throw BadInput("mse_experiment: sigma2 must be > 0");
  MSEExperimentResult out;
  out.per_rep_sample.resize(replicates);
  out.per_rep_sphere.resize(replicates);
  parallel_for(replicates, [&](int rep) {
    auto gen = substream(seed, static_cast<std::uint64_t>(rep));
    Eigen::MatrixXd x =
        std::sqrt(sigma2) * detail::standard_normal(n, q, gen);
    Eigen::VectorXd mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
    Eigen::MatrixXd S = (centered.transpose() * centered) / n;
    double dbar = S.trace() / q;
    Eigen::MatrixXd target = sigma2 * Eigen::MatrixXd::Identity(q, q);
    out.per_rep_sample[rep] = (S - target).squaredNorm();
    out.per_rep_sphere[rep] = q * (dbar - sigma2) * (dbar - sigma2);
  });
  // Fixed-order accumulation keeps the report bit stable.
  for (int rep = 0; rep < replicates; ++rep) {
    out.mse_sample += out.per_rep_sample[rep];
    out.mse_sphere += out.per_rep_sphere[rep];
  }
  out.mse_sample /= replicates;
  out.mse_sphere /= replicates;
  out.ratio = out.mse_sample / out.mse_sphere;
  out.theoretical_ratio = q * (q + 1.0) / 2.0;
  return out;
}

}  // namespace elasso
