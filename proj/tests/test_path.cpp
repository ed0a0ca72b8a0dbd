#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "elasso/oracles.hpp"
#include "elasso/path.hpp"
#include "elasso/rng.hpp"
#include "helpers.hpp"

using namespace elasso;

namespace {

const Eigen::Vector3d kD(6, 3, 1);
WeightVector kW() { return make_weight_vector(Eigen::Vector3d(1, 0, -1)); }

}  // namespace

TEST_CASE("group statistics") {
  WeightVector w = kW();
  Partition p = group_stats(kD, w, {1, 2});
  CHECK(p.d_means.isApprox(Eigen::Vector2d(6, 2)));
  CHECK(p.a_means.isApprox(Eigen::Vector2d(1, -0.5)));

  Partition singles = group_stats(kD, w, {1, 1, 1});
  CHECK(singles.d_means.isApprox(kD));
  CHECK(singles.a_means.isApprox(w.a));

  Partition whole = group_stats(kD, w, {3});
  CHECK(whole.d_means[0] == doctest::Approx(10.0 / 3.0));
  CHECK(std::abs(whole.a_means[0]) < 1e-14);

  CHECK_THROWS_AS(group_stats(kD, w, {2, 2}), BadGrouping);
  CHECK_THROWS_AS(group_stats(kD, w, {}), BadGrouping);
  CHECK_THROWS_AS(group_stats(kD, w, {-1, 4}), BadGrouping);
}

TEST_CASE("candidate solution") {
  WeightVector w = kW();
  Partition p = group_stats(kD, w, {1, 2});
  CHECK(candidate_solution(p, 0.0).isApprox(Eigen::Vector2d(6, 2)));
  Eigen::VectorXd at = candidate_solution(p, 0.7);
  CHECK(at[0] == doctest::Approx(6.0 / 1.7).epsilon(1e-12));
  CHECK(at[1] == doctest::Approx(2.0 / 0.65).epsilon(1e-12));

  Partition whole = group_stats(kD, w, {3});
  CHECK(candidate_solution(whole, 5.0)[0] == doctest::Approx(10.0 / 3.0));

  CHECK_THROWS_AS(candidate_solution(p, -1.0), NegativeTuning);
  CHECK_THROWS_AS(candidate_solution(p, 3.0), NonpositiveDenominator);
}

TEST_CASE("pair knots and merge choice") {
  WeightVector w = kW();
  KnotInfo info = knots_and_merge(group_stats(kD, w, {1, 1, 1}));
  REQUIRE(info.pair_etas.size() == 2);
  CHECK(info.pair_etas[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(info.pair_etas[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(info.eta == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(info.merge_index == 1);

  KnotInfo next = knots_and_merge(group_stats(kD, w, {1, 2}));
  CHECK(next.eta == doctest::Approx(0.8).epsilon(1e-12));

  KnotInfo last = knots_and_merge(group_stats(kD, w, {3}));
  CHECK(!std::isfinite(last.eta));
  CHECK(last.merge_index == -1);
}

TEST_CASE("full path worked example") {
  ElassoPath path(kD, kW());
  REQUIRE(path.knots().size() == 2);
  CHECK(path.knots()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(path.knots()[1] == doctest::Approx(0.8).epsilon(1e-12));
  REQUIRE(path.partitions().size() == 3);
  CHECK(path.partitions()[0].sizes == std::vector<int>{1, 1, 1});
  CHECK(path.partitions()[1].sizes == std::vector<int>{1, 2});
  CHECK(path.partitions()[2].sizes == std::vector<int>{3});
  CHECK(path.merge_indices() == std::vector<int>{1, 0});
  CHECK(path.largest_finite_knot() == doctest::Approx(0.8));

  CHECK(path.solve_at(0.0).isApprox(kD));
  CHECK(path.solve_at(0.5).isApprox(Eigen::Vector3d(4, 3, 2), 1e-12));
  Eigen::VectorXd flat = path.solve_at(1.0);
  for (int j = 0; j < 3; ++j)
    CHECK(flat[j] == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(path.solve_at(-0.1), NegativeTuning);
}

TEST_CASE("degenerate spherical input collapses at zero") {
  Eigen::Vector3d d(2, 2, 2);
  for (auto w : {kW(), smallest_group_weights(3)}) {
    ElassoPath path(d, w);
    for (double k : path.knots()) CHECK(k == 0.0);
    for (double eta : {0.0, 0.3, 5.0})
      CHECK(path.solve_at(eta).isApprox(d, 1e-12));
  }
}

TEST_CASE("two-point path") {
  WeightVector w = make_weight_vector(Eigen::Vector2d(0.5, -0.5));
  ElassoPath path(Eigen::Vector2d(4, 1), w);
  REQUIRE(path.knots().size() == 1);
  CHECK(path.knots()[0] == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("single variable path is trivial") {
  WeightVector w = make_weight_vector(Eigen::VectorXd::Zero(1));
  ElassoPath path(Eigen::VectorXd::Constant(1, 3.0), w);
  CHECK(path.knots().empty());
  CHECK(path.solve_at(7.0)[0] == doctest::Approx(3.0));
  CHECK(brute_force_solve(Eigen::VectorXd::Constant(1, 3.0), w, 7.0)[0] ==
        doctest::Approx(3.0));
}

TEST_CASE("model-restricted path") {
  WeightVector w = kW();
  ElassoPath mp = model_path(kD, w, {1, 2});
  CHECK(mp.solve_at(0.0).isApprox(Eigen::Vector3d(6, 2, 2), 1e-12));
  REQUIRE(mp.knots().size() == 2);
  CHECK(mp.knots()[0] == 0.0);
  CHECK(mp.knots()[1] == doctest::Approx(0.8).epsilon(1e-12));
  Eigen::VectorXd flat = mp.solve_at(0.9);
  for (int j = 0; j < 3; ++j)
    CHECK(flat[j] == doctest::Approx(10.0 / 3.0).epsilon(1e-12));

  // Full model: identical to the unrestricted path.
  ElassoPath full = model_path(kD, w, {1, 1, 1});
  ElassoPath ref(kD, w);
  REQUIRE(full.knots().size() == ref.knots().size());
  for (std::size_t i = 0; i < ref.knots().size(); ++i)
    CHECK(full.knots()[i] == doctest::Approx(ref.knots()[i]));

  // Spherical model: constant at the grand mean.
  ElassoPath sphere = model_path(kD, w, {3});
  for (double eta : {0.0, 1.0, 10.0})
    CHECK(sphere.solve_at(eta)[0] == doctest::Approx(10.0 / 3.0));

  // Equal group means cannot form a model.
  CHECK_THROWS_AS(model_path(Eigen::Vector3d(3, 3, 3), w, {1, 2}),
                  BadGrouping);
}

TEST_CASE("closed-form last knot") {
  CHECK(last_knot_closed_form(kD, kW()) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(last_knot_closed_form(Eigen::Vector3d(5, 5, 5), kW()) == 0.0);

  auto gen = substream(2024, 0);
  std::uniform_int_distribution<int> qdist(2, 8);
  for (int rep = 0; rep < 200; ++rep) {
    int q = qdist(gen);
    Eigen::VectorXd d = testutil::random_eigenvalues(q, gen);
    WeightVector w = testutil::random_weights(q, gen);
    ElassoPath path(d, w);
    CHECK(last_knot_closed_form(d, w) ==
          doctest::Approx(path.largest_finite_knot()).epsilon(1e-10));
  }
}

TEST_CASE("brute force agrees on the worked example") {
  WeightVector w = kW();
  ElassoPath path(kD, w);
  for (double eta : {0.3, 0.7, 1.5}) {
    Eigen::VectorXd a = path.solve_at(eta);
    Eigen::VectorXd b = brute_force_solve(kD, w, eta);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
  }
  // q = 2 beyond the knot: grand mean.
  WeightVector w2 = make_weight_vector(Eigen::Vector2d(0.5, -0.5));
  Eigen::VectorXd b = brute_force_solve(Eigen::Vector2d(4, 1), w2, 2.0);
  CHECK(b[0] == doctest::Approx(2.5));
  CHECK(b[1] == doctest::Approx(2.5));

  CHECK_THROWS_AS(
      brute_force_solve(Eigen::VectorXd::LinSpaced(13, 13, 1).eval(),
                        pairwise_weights(13), 0.1),
      DimensionTooLarge);
}

TEST_CASE("convex oracle") {
  WeightVector w = kW();
  ElassoPath path(kD, w);
  Eigen::VectorXd co = convex_oracle(kD, w, 0.7);
  CHECK((co - path.solve_at(0.7)).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((convex_oracle(kD, w, 0.0) - kD).cwiseAbs().maxCoeff() < 1e-8);

  auto gen = substream(515, 0);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd d = testutil::random_eigenvalues(6, gen);
    WeightVector wr = testutil::random_weights(6, gen);
    ElassoPath p(d, wr);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double eta = u(gen) * 1.5 * p.largest_finite_knot();
    Eigen::VectorXd got = convex_oracle(d, wr, eta);
    Eigen::VectorXd want = p.solve_at(eta);
    CHECK((got - want).cwiseAbs().maxCoeff() / want.cwiseAbs().maxCoeff() <
          1e-5);
  }
}

TEST_CASE("path structural properties on random instances") {
  auto gen = substream(99, 0);
  std::uniform_int_distribution<int> qdist(2, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    int q = qdist(gen);
    Eigen::VectorXd d = testutil::random_eigenvalues(q, gen);
    WeightVector w = testutil::random_weights(q, gen);
    ElassoPath path(d, w);

    // Knots nondecreasing; partition sizes shrink one merge at a time.
    for (std::size_t i = 0; i + 1 < path.knots().size(); ++i)
      CHECK(path.knots()[i] <= path.knots()[i + 1]);
    for (std::size_t i = 0; i < path.partitions().size(); ++i)
      CHECK(path.partitions()[i].groups() == q - static_cast<int>(i));

    // Estimates ordered and positive on a random grid; continuity at knots.
    for (double knot : path.knots()) {
      Eigen::VectorXd lo = path.solve_at(std::max(0.0, knot - 1e-7));
      Eigen::VectorXd hi = path.solve_at(knot + 1e-7);
      CHECK((lo - hi).cwiseAbs().maxCoeff() < 1e-4 * d[0]);
    }
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd lam =
          path.solve_at(u(gen) * 2.0 * path.largest_finite_knot());
      for (int j = 0; j < q; ++j) {
        CHECK(lam[j] > 0.0);
        if (j) CHECK(lam[j] <= lam[j - 1] + 1e-12 * d[0]);
      }
    }

    // Scale equivariance.
    double gamma = 0.5 + 2.0 * u(gen);
    ElassoPath scaled(gamma * d, w);
    double eta = u(gen) * 1.5 * path.largest_finite_knot();
    CHECK((scaled.solve_at(eta) - gamma * path.solve_at(eta))
              .cwiseAbs()
              .maxCoeff() < 1e-10 * gamma * d[0]);
  }
}

TEST_CASE("inverse eigenvalues are linear between knots") {
  auto gen = substream(100, 0);
  for (int rep = 0; rep < 50; ++rep) {
    int q = 2 + rep % 7;
    Eigen::VectorXd d = testutil::random_eigenvalues(q, gen);
    WeightVector w = testutil::random_weights(q, gen);
    ElassoPath path(d, w);
    std::vector<double> edges{0.0};
    for (double k : path.knots()) edges.push_back(k);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      double a = edges[i], b = edges[i + 1];
      if (b - a < 1e-6) continue;
      double h = (b - a) / 4.0;
      Eigen::VectorXd f0 = path.solve_at(a + h).cwiseInverse();
      Eigen::VectorXd f1 = path.solve_at(a + 2 * h).cwiseInverse();
      Eigen::VectorXd f2 = path.solve_at(a + 3 * h).cwiseInverse();
      CHECK((f0 - 2 * f1 + f2).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("merged value interpolates the merging pair") {
  auto gen = substream(101, 0);
  for (int rep = 0; rep < 100; ++rep) {
    int q = 2 + rep % 8;
    Eigen::VectorXd d = testutil::random_eigenvalues(q, gen);
    WeightVector w = testutil::random_weights(q, gen);
    ElassoPath path(d, w);
    for (std::size_t i = 0; i < path.knots().size(); ++i) {
      double eta = path.knots()[i];
      const Partition& pre = path.partitions()[i];
      int k = path.merge_indices()[i];
      double m1 = pre.sizes[k], m2 = pre.sizes[k + 1];
      double c1 = m1 * (1.0 + eta * pre.a_means[k]);
      double c2 = m2 * (1.0 + eta * pre.a_means[k + 1]);
      double gamma = c1 / (c1 + c2);
      CHECK(gamma > 0.0);
      CHECK(gamma < 1.0);
      double v1 = pre.d_means[k] / (1.0 + eta * pre.a_means[k]);
      double v2 = pre.d_means[k + 1] / (1.0 + eta * pre.a_means[k + 1]);
      const Partition& post = path.partitions()[i + 1];
      double merged = post.d_means[k] / (1.0 + eta * post.a_means[k]);
      CHECK(merged ==
            doctest::Approx(gamma * v1 + (1.0 - gamma) * v2).epsilon(1e-9));
    }
  }
}

TEST_CASE("path input validation") {
  WeightVector w = kW();
  CHECK_THROWS_AS(ElassoPath(Eigen::Vector3d(1, 3, 6), w), BadInput);
  CHECK_THROWS_AS(ElassoPath(Eigen::Vector3d(6, 3, 0), w),
                  NonpositiveEigenvalue);
  CHECK_THROWS_AS(ElassoPath(Eigen::Vector2d(4, 1), w), LengthMismatch);
  WeightVector zero;
  zero.a = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(ElassoPath(kD, zero), BadInput);
}
