#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <vector>

#include "elasso/errors.hpp"
#include "elasso/weights.hpp"

namespace elasso {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Ordered contiguous grouping of the eigenvalue indices, with per-group
/// sizes and the group means of eigenvalues and weights.
struct Partition {
  std::vector<int> sizes;
  Eigen::VectorXd d_means;  // nonincreasing
  Eigen::VectorXd a_means;  // nonincreasing

  int groups() const { return static_cast<int>(sizes.size()); }
  int total() const {
    int s = 0;
    for (int m : sizes) s += m;
    return s;
  }
};

namespace detail {

inline void require_path_inputs(const Eigen::VectorXd& d,
                                const WeightVector& w) {
  if (d.size() != w.a.size())
    throw LengthMismatch("path: eigenvalue/weight length mismatch");
  for (int j = 0; j < d.size(); ++j) {
    if (!(d[j] > 0.0))
      throw NonpositiveEigenvalue("path: eigenvalues must be positive");
    if (j > 0 && d[j] > d[j - 1])
      throw BadInput("path: eigenvalues must be nonincreasing");
  }
  // q = 1 needs no merging, so the (necessarily zero) weight is fine there.
  if (d.size() > 1 && w.a.cwiseAbs().maxCoeff() == 0.0)
    throw BadInput("path: weights are identically zero");
}

// Group means without the ordering checks; used internally where the
// ordering is guaranteed by construction.
inline Partition group_stats_unchecked(const Eigen::VectorXd& d,
                                       const Eigen::VectorXd& a,
                                       const std::vector<int>& sizes) {
  Partition p;
  p.sizes = sizes;
  const int r = static_cast<int>(sizes.size());
  p.d_means.resize(r);
  p.a_means.resize(r);
  int pos = 0;
  for (int k = 0; k < r; ++k) {
    p.d_means[k] = d.segment(pos, sizes[k]).mean();
    p.a_means[k] = a.segment(pos, sizes[k]).mean();
    pos += sizes[k];
  }
  return p;
}

}  // namespace detail

inline Partition group_stats(const Eigen::VectorXd& d, const WeightVector& w,
                             const std::vector<int>& sizes) {
  if (sizes.empty()) throw BadGrouping("group_stats: empty grouping");
  int sum = 0;
  for (int m : sizes) {
    if (m <= 0) throw BadGrouping("group_stats: group sizes must be positive");
    sum += m;
  }
  if (sum != d.size())
    throw BadGrouping("group_stats: group sizes must sum to q");
  if (d.size() != w.a.size())
    throw LengthMismatch("group_stats: eigenvalue/weight length mismatch");
  Partition p = detail::group_stats_unchecked(d, w.a, sizes);
  for (int k = 0; k + 1 < p.groups(); ++k) {
    if (p.d_means[k] < p.d_means[k + 1] || p.a_means[k] < p.a_means[k + 1])
      throw BadGrouping("group_stats: group means out of order");
  }
  return p;
}

/// Grouped critical point d_mean_k / (1 + eta * a_mean_k). No ordering check.
inline Eigen::VectorXd candidate_solution(const Partition& p, double eta) {
  if (eta < 0.0) throw NegativeTuning("candidate_solution: eta must be >= 0");
  const int r = p.groups();
  Eigen::VectorXd lambda(r);
  for (int k = 0; k < r; ++k) {
    double denom = 1.0 + eta * p.a_means[k];
    if (!(denom > 0.0))
      throw NonpositiveDenominator(
          "candidate_solution: 1 + eta * group weight mean is nonpositive");
    lambda[k] = p.d_means[k] / denom;
  }
  return lambda;
}

/// Knot of a partition: the smallest tuning value at which two adjacent
/// groups become equal, together with the merge index and per-pair values.
struct KnotInfo {
  double eta = kInf;        // infinity when r == 1
  int merge_index = -1;     // 0-based left group of the merging pair
  std::vector<double> pair_etas;
};

inline KnotInfo knots_and_merge(const Partition& p) {
  KnotInfo info;
  const int r = p.groups();
  info.pair_etas.resize(r > 0 ? r - 1 : 0);
  for (int k = 0; k + 1 < r; ++k) {
    double denom =
        p.a_means[k] * p.d_means[k + 1] - p.a_means[k + 1] * p.d_means[k];
    double num = p.d_means[k] - p.d_means[k + 1];
    info.pair_etas[k] = denom > 0.0 ? num / denom : kInf;
    if (info.pair_etas[k] < info.eta) {
      info.eta = info.pair_etas[k];
      info.merge_index = k;
    }
  }
  return info;
}

/// The complete elasso solution path: the hierarchy of partitions from all
/// singletons down to one group, the merge knots, and a closed-form
/// evaluator for any tuning value.
class ElassoPath {
 public:
  /// Builds the path by repeated merging at the smallest pair knot.
  /// Ties merge the smallest index first; coincident knots then repeat.
  ElassoPath(const Eigen::VectorXd& d, const WeightVector& w)
      : ElassoPath(d, w, std::vector<int>(d.size(), 1), {}) {}

  const Eigen::VectorXd& eigenvalues() const { return d_; }
  const WeightVector& weights() const { return w_; }
  int q() const { return static_cast<int>(d_.size()); }

  /// Finite knots; knots()[i] is the tuning value at which partitions()[i]
  /// merges into partitions()[i+1]. Nondecreasing.
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<Partition>& partitions() const { return partitions_; }
  const std::vector<int>& merge_indices() const { return merge_indices_; }

  double largest_finite_knot() const {
    return knots_.empty() ? 0.0 : knots_.back();
  }

  /// The partition active at eta: the coarsest one whose knot exceeds eta.
  const Partition& partition_at(double eta) const {
    for (std::size_t i = 0; i < knots_.size(); ++i)
      if (eta < knots_[i]) return partitions_[i];
    return partitions_.back();
  }

  /// Length-q estimate at eta: the grouped critical point of the active
  /// partition, expanded over its groups.
  Eigen::VectorXd solve_at(double eta) const {
    if (eta < 0.0) throw NegativeTuning("solve_at: eta must be >= 0");
    const Partition& p = partition_at(eta);
    Eigen::VectorXd grouped = candidate_solution(p, eta);
    Eigen::VectorXd out(q());
    int pos = 0;
    for (int k = 0; k < p.groups(); ++k) {
      out.segment(pos, p.sizes[k]).setConstant(grouped[k]);
      pos += p.sizes[k];
    }
    return out;
  }

 private:
  friend ElassoPath model_path(const Eigen::VectorXd&, const WeightVector&,
                               const std::vector<int>&);

  // Starts from `initial` (recording one zero knot per merge needed to
  // reach it from singletons) and then follows the merge recursion.
  ElassoPath(const Eigen::VectorXd& d, const WeightVector& w,
             const std::vector<int>& initial, std::vector<int> /*tag*/)
      : d_(d), w_(w) {
    detail::require_path_inputs(d_, w_);
    const int q = static_cast<int>(d_.size());
    partitions_.reserve(q);
    knots_.reserve(q - 1);
    merge_indices_.reserve(q - 1);

    std::vector<int> sizes(q, 1);
    partitions_.push_back(detail::group_stats_unchecked(d_, w_.a, sizes));
    // Collapse to the initial partition at knot zero, left to right.
    while (sizes.size() > initial.size()) {
      int k = mergeable_index(sizes, initial);
      record_merge(sizes, k, 0.0);
    }
    while (sizes.size() > 1) {
      KnotInfo info = knots_and_merge(partitions_.back());
      if (!std::isfinite(info.eta))
        throw Error("path: no finite merge knot; weights are degenerate");
      record_merge(sizes, info.merge_index, info.eta);
    }
  }

  static int mergeable_index(const std::vector<int>& sizes,
                             const std::vector<int>& target) {
    // First group boundary in `sizes` that falls inside a target group.
    int total = 0;
    for (int m : sizes) total += m;
    std::vector<char> target_boundary(total + 1, 0);
    int pos = 0;
    for (int m : target) {
      pos += m;
      target_boundary[pos] = 1;
    }
    int b = 0;
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
      b += sizes[k];
      if (!target_boundary[b]) return static_cast<int>(k);
    }
    throw BadGrouping("path: initial partition is not reachable by merging");
  }

  void record_merge(std::vector<int>& sizes, int k, double eta) {
    sizes[k] += sizes[k + 1];
    sizes.erase(sizes.begin() + k + 1);
    knots_.push_back(eta);
    merge_indices_.push_back(k);
    partitions_.push_back(detail::group_stats_unchecked(d_, w_.a, sizes));
  }

  Eigen::VectorXd d_;
  WeightVector w_;
  std::vector<double> knots_;
  std::vector<Partition> partitions_;
  std::vector<int> merge_indices_;
};

inline ElassoPath full_path(const Eigen::VectorXd& d, const WeightVector& w) {
  return ElassoPath(d, w);
}

/// Path restricted to a multi-spike model: the source eigenvalues are
/// replaced by the model MLE (group means repeated), so the zero-tuning
/// estimate is the grouped MLE and the model collapse happens at knot zero.
inline ElassoPath model_path(const Eigen::VectorXd& d, const WeightVector& w,
                             const std::vector<int>& model) {
  Partition p = group_stats(d, w, model);  // validates the grouping
  for (int k = 0; k + 1 < p.groups(); ++k)
    if (!(p.d_means[k] > p.d_means[k + 1]))
      throw BadGrouping("model_path: group means must be strictly decreasing");
  Eigen::VectorXd d_model(d.size());
  int pos = 0;
  for (int k = 0; k < p.groups(); ++k) {
    d_model.segment(pos, p.sizes[k]).setConstant(p.d_means[k]);
    pos += p.sizes[k];
  }
  return ElassoPath(d_model, w, model, {});
}

/// Largest finite knot without building the path:
/// sup_k (q D_k / D_q - k) / A_k over k = 1..q-1 with prefix sums D, A.
inline double last_knot_closed_form(const Eigen::VectorXd& d,
                                    const WeightVector& w) {
  detail::require_path_inputs(d, w);
  const int q = static_cast<int>(d.size());
  double dq = d.sum();
  double best = 0.0;
  double dk = 0.0, ak = 0.0;
  for (int k = 1; k < q; ++k) {
    dk += d[k - 1];
    ak += w.a[k - 1];
    if (ak > 0.0) best = std::max(best, (q * dk / dq - k) / ak);
  }
  return best;
}

}  // namespace elasso
