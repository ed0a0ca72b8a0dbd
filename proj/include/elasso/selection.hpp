#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "elasso/errors.hpp"
#include "elasso/parallel.hpp"
#include "elasso/path.hpp"
#include "elasso/rng.hpp"
#include "elasso/spectrum.hpp"
#include "elasso/weights.hpp"

namespace elasso {

enum class WeightKind { mp, cond, smallest, pairwise, fixed };

/// How to build weights for a given (q, n); `fixed` carries user values.
struct WeightSpec {
  WeightKind kind = WeightKind::mp;
  Eigen::VectorXd fixed;
};

inline WeightVector resolve_weights(const WeightSpec& spec, int q, int n) {
  switch (spec.kind) {
    case WeightKind::mp:
      return mp_weights(q, n);
    case WeightKind::cond:
      return condition_number_weights(q);
    case WeightKind::smallest:
      return smallest_group_weights(q);
    case WeightKind::pairwise:
      return pairwise_weights(q);
    case WeightKind::fixed:
      if (spec.fixed.size() != q)
        throw LengthMismatch("weights: file has length " +
                             std::to_string(spec.fixed.size()) +
                             ", expected " + std::to_string(q));
      return make_weight_vector(spec.fixed);
  }
  throw BadInput("weights: unknown kind");
}

enum class FoldWeights { fixed, refit };

/// Gaussian validation score of an estimate on held-out rows:
/// n_test log det(Sigma) + sum of Mahalanobis distances from `mean`.
inline double gaussian_score(const Spectrum& estimate,
                             const Eigen::VectorXd& mean,
                             const Eigen::MatrixXd& test) {
  if (test.rows() == 0) return 0.0;
  if (test.cols() != estimate.q())
    throw ShapeMismatch("gaussian_score: test dimension mismatch");
  Eigen::MatrixXd z =
      (test.rowwise() - mean.transpose()) * estimate.basis;
  double quad =
      (z.array().square().rowwise() /
       estimate.eigenvalues.transpose().array())
          .sum();
  return test.rows() * estimate.eigenvalues.array().log().sum() + quad;
}

/// Fits the elasso on the training rows and scores the test rows.
inline double cv_score(const DataMatrix& train, const DataMatrix& test,
                       double eta, const WeightVector& w) {
  Spectrum spec = sample_covariance(train);
  ElassoPath path(spec.eigenvalues, w);
  Spectrum fitted = spec;
  fitted.eigenvalues = path.solve_at(eta);
  return gaussian_score(fitted, spec.mean, test.values);
}

struct CVResult {
  Eigen::VectorXd grid;
  Eigen::MatrixXd fold_scores;  // K x grid
  Eigen::VectorXd mean;
  Eigen::VectorXd se;
  int min_index = 0;
  double eta_min = 0.0;
  double eta_1se = 0.0;
};

namespace detail {

// Per-fold state reused across the tuning grid: path, log-eigenvalue basis
// coordinates of the test rows collapsed to column sums of squares.
struct FoldFit {
  ElassoPath path;
  Eigen::VectorXd test_sq;  // sum over test rows of (basis^T (x - mean))^2
  int n_test = 0;

  double score(const Eigen::VectorXd& lambda) const {
    return n_test * lambda.array().log().sum() +
           (test_sq.array() / lambda.array()).sum();
  }
};

inline std::vector<std::vector<int>> fold_assignment(int n, int K,
                                                     std::uint64_t seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(splitmix64(seed));
  std::shuffle(order.begin(), order.end(), gen);
  std::vector<std::vector<int>> folds(K);
  for (int pos = 0; pos < n; ++pos) folds[pos % K].push_back(order[pos]);
  return folds;
}

inline FoldFit fit_fold(const Eigen::MatrixXd& values,
                        const std::vector<int>& test_rows,
                        const WeightVector& w) {
  const int n = static_cast<int>(values.rows());
  const int q = static_cast<int>(values.cols());
  std::vector<char> in_test(n, 0);
  for (int i : test_rows) in_test[i] = 1;
  Eigen::MatrixXd train(n - static_cast<int>(test_rows.size()), q);
  Eigen::MatrixXd test(test_rows.size(), q);
  int it = 0, iv = 0;
  for (int i = 0; i < n; ++i) {
    if (in_test[i])
      test.row(iv++) = values.row(i);
    else
      train.row(it++) = values.row(i);
  }
  Spectrum spec = sample_covariance(DataMatrix{train});
  Eigen::MatrixXd z = (test.rowwise() - spec.mean.transpose()) * spec.basis;
  FoldFit fit{ElassoPath(spec.eigenvalues, w),
              z.array().square().colwise().sum().transpose(),
              static_cast<int>(test.rows())};
  return fit;
}

inline void finish_cv(CVResult& r) {
  const int K = static_cast<int>(r.fold_scores.rows());
  r.mean = r.fold_scores.colwise().mean();
  Eigen::VectorXd sd(r.grid.size());
  for (int g = 0; g < r.grid.size(); ++g) {
    double m = r.mean[g];
    sd[g] = std::sqrt(
        (r.fold_scores.col(g).array() - m).square().sum() / (K - 1));
  }
  r.se = sd / std::sqrt(static_cast<double>(K));
  r.min_index = 0;
  for (int g = 1; g < r.grid.size(); ++g)
    if (r.mean[g] < r.mean[r.min_index]) r.min_index = g;
  r.eta_min = r.grid[r.min_index];
  double cutoff = r.mean[r.min_index] + r.se[r.min_index];
  r.eta_1se = r.eta_min;
  for (int g = 0; g < r.grid.size(); ++g)
    if (r.grid[g] >= r.eta_min && r.mean[g] <= cutoff)
      r.eta_1se = std::max(r.eta_1se, r.grid[g]);
  }

}  // namespace detail

/// K-fold cross validation of the elasso over a tuning grid. Fold
/// assignment is a seeded shuffle dealt round-robin, so fold sizes differ
/// by at most one and results are reproducible and schedule independent.
/// With FoldWeights::refit, Marchenko-Pastur weights are rebuilt from each
/// training fold's own (q, n).
inline CVResult kfold_cv(const DataMatrix& data, const WeightSpec& wspec,
                         const Eigen::VectorXd& grid, int K,
                         std::uint64_t seed,
                         FoldWeights mode = FoldWeights::refit) {
  const int n = data.n(), q = data.q();
  if (K < 2) throw BadInput("kfold_cv: K must be >= 2");
  if (grid.size() == 0) throw BadInput("kfold_cv: empty tuning grid");
  int max_test = (n + K - 1) / K;
  if (n - max_test <= q)
    throw FoldTooSmall("kfold_cv: training folds of size " +
                       std::to_string(n - max_test) +
                       " would be singular for q = " + std::to_string(q));
  auto folds = detail::fold_assignment(n, K, seed);

  // Training-fold sizes take at most two values; share the weight builds.
  std::map<int, WeightVector> weight_cache;
  for (int k = 0; k < K; ++k) {
    int n_train = n - static_cast<int>(folds[k].size());
    int n_for_weights = (mode == FoldWeights::refit) ? n_train : n;
    if (!weight_cache.count(n_for_weights))
      weight_cache.emplace(n_for_weights,
                           resolve_weights(wspec, q, n_for_weights));
  }

  CVResult r;
  r.grid = grid;
  r.fold_scores.resize(K, grid.size());
  parallel_for(K, [&](int k) {
    int n_train = n - static_cast<int>(folds[k].size());
    int n_for_weights = (mode == FoldWeights::refit) ? n_train : n;
    detail::FoldFit fit =
        detail::fit_fold(data.values, folds[k], weight_cache.at(n_for_weights));
    for (int g = 0; g < grid.size(); ++g)
      r.fold_scores(k, g) = fit.score(fit.path.solve_at(grid[g]));
  });
  detail::finish_cv(r);
  return r;
}

/// Largest grid value whose CV mean is within one standard error of the
/// minimum (the relaxed rule).
inline double one_se_eta(const CVResult& r) { return r.eta_1se; }

enum class ModelCVMode { exhaustive, approximate };

struct ModelCVRecord {
  std::vector<int> sizes;
  double knot = 0.0;      // tuning value at which this model merges away
  bool searched = false;
  double best_eta = 0.0;
  double cv_mean = 0.0;
  double se_at_best = 0.0;
  bool selected = false;
};

struct ModelCVResult {
  std::vector<ModelCVRecord> models;
  int selected_index = -1;
  double eta_min = 0.0;  // from the plain CV run on the same folds
  CVResult cv;
};

/// Cross validation over the hierarchy of models in the elasso path.
/// Approximate mode restricts to models still alive past the plain CV
/// minimizer, searches only below it, and evaluates each training fold
/// with the fixed full-data grouping (no re-merging inside the fold).
inline ModelCVResult model_cv(const DataMatrix& data, const WeightSpec& wspec,
                              const Eigen::VectorXd& grid, int K,
                              std::uint64_t seed, ModelCVMode mode,
                              FoldWeights fweights = FoldWeights::refit) {
  const int n = data.n(), q = data.q();
  ModelCVResult out;
  out.cv = kfold_cv(data, wspec, grid, K, seed, fweights);
  out.eta_min = out.cv.eta_min;

  WeightVector w_full = resolve_weights(wspec, q, n);
  Spectrum full_spec = sample_covariance(data);
  ElassoPath full_path_(full_spec.eigenvalues, w_full);

  auto folds = detail::fold_assignment(n, K, seed);
  std::map<int, WeightVector> weight_cache;
  std::vector<detail::FoldFit> fits;
  std::vector<const WeightVector*> fold_w(K);
  fits.reserve(K);
  for (int k = 0; k < K; ++k) {
    int n_train = n - static_cast<int>(folds[k].size());
    int n_for_weights = (fweights == FoldWeights::refit) ? n_train : n;
    if (!weight_cache.count(n_for_weights))
      weight_cache.emplace(n_for_weights,
                           resolve_weights(wspec, q, n_for_weights));
    fold_w[k] = &weight_cache.at(n_for_weights);
    fits.push_back(detail::fit_fold(data.values, folds[k], *fold_w[k]));
  }

  // Grid restriction for the approximate shortcut.
  std::vector<int> searched_grid;
  for (int g = 0; g < grid.size(); ++g)
    if (mode == ModelCVMode::exhaustive || grid[g] < out.eta_min)
      searched_grid.push_back(g);
  if (searched_grid.empty()) searched_grid.push_back(0);

  const auto& partitions = full_path_.partitions();
  const auto& knots = full_path_.knots();
  out.models.resize(partitions.size());
  parallel_for(static_cast<int>(partitions.size()), [&](int m) {
    ModelCVRecord& rec = out.models[m];
    rec.sizes = partitions[m].sizes;
    rec.knot = m < static_cast<int>(knots.size()) ? knots[m] : kInf;
    rec.searched =
        mode == ModelCVMode::exhaustive || rec.knot > out.eta_min;
    if (!rec.searched) return;

    // Per-fold evaluator for this model; re-merges within the fold when
    // the fold's group means allow it, otherwise uses the grouped formula.
    std::vector<std::function<Eigen::VectorXd(double)>> eval(K);
    std::vector<ElassoPath> fold_paths;
    fold_paths.reserve(K);
    for (int k = 0; k < K; ++k) {
      const Eigen::VectorXd& fd = fits[k].path.eigenvalues();
      bool restricted = mode == ModelCVMode::exhaustive;
      if (restricted) {
        try {
          fold_paths.push_back(model_path(fd, *fold_w[k], rec.sizes));
          const ElassoPath& mp = fold_paths.back();
          eval[k] = [&mp](double eta) { return mp.solve_at(eta); };
        } catch (const BadGrouping&) {
          restricted = false;
        }
      }
      if (!restricted) {
        Partition p =
            detail::group_stats_unchecked(fd, fold_w[k]->a, rec.sizes);
        int qq = q;
        eval[k] = [p, qq](double eta) {
          Eigen::VectorXd grouped = candidate_solution(p, eta);
          Eigen::VectorXd lam(qq);
          int pos = 0;
          for (int j = 0; j < p.groups(); ++j) {
            lam.segment(pos, p.sizes[j]).setConstant(grouped[j]);
            pos += p.sizes[j];
          }
          return lam;
        };
      }
    }

    double best_mean = kInf;
    int best_g = searched_grid.front();
    Eigen::VectorXd scores(K);
    Eigen::VectorXd best_scores(K);
    for (int g : searched_grid) {
      bool ok = true;
      for (int k = 0; k < K && ok; ++k) {
        try {
          scores[k] = fits[k].score(eval[k](grid[g]));
        } catch (const NonpositiveDenominator&) {
          ok = false;  // eta beyond this model's validity in that fold
        }
      }
      if (!ok) continue;
      double m_score = scores.mean();
      if (m_score < best_mean) {
        best_mean = m_score;
        best_g = g;
        best_scores = scores;
      }
    }
    rec.best_eta = grid[best_g];
    rec.cv_mean = best_mean;
    if (std::isfinite(best_mean) && K > 1) {
      double sd = std::sqrt(
          (best_scores.array() - best_mean).square().sum() / (K - 1));
      rec.se_at_best = sd / std::sqrt(static_cast<double>(K));
    }
  });

  for (std::size_t m = 0; m < out.models.size(); ++m) {
    if (!out.models[m].searched) continue;
    if (out.selected_index < 0 ||
        out.models[m].cv_mean < out.models[out.selected_index].cv_mean)
      out.selected_index = static_cast<int>(m);
  }
  if (out.selected_index >= 0) out.models[out.selected_index].selected = true;
  return out;
}

/// Empirical (1 - epsilon)-quantile of the largest finite knot under
/// spherical standard-normal sampling; the knot law is scale free.
inline double calibrate_eta_sphericity(int q, int n, double epsilon, int nsim,
                                       std::uint64_t seed,
                                       const WeightSpec& wspec = {}) {
  if (q >= n)
    throw DimensionExceedsSample("calibrate: requires n > q");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidProbability("calibrate: epsilon must lie in (0,1)");
  if (nsim < 100) throw BadInput("calibrate: nsim must be >= 100");
  WeightVector w = resolve_weights(wspec, q, n);
  std::vector<double> last_knots(nsim);
  parallel_for(nsim, [&](int rep) {
    auto gen = substream(seed, static_cast<std::uint64_t>(rep));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd x(n, q);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < q; ++j) x(i, j) = normal(gen);
    Spectrum spec = sample_covariance(DataMatrix{x});
    last_knots[rep] = last_knot_closed_form(spec.eigenvalues, w);
  });
  std::sort(last_knots.begin(), last_knots.end());
  int idx = std::min(nsim - 1,
                     static_cast<int>(std::floor((1.0 - epsilon) * nsim)));
  return last_knots[idx];
}

}  // namespace elasso
