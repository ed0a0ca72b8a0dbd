#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "elasso/mp.hpp"
#include "elasso/penalties.hpp"
#include "elasso/spectrum.hpp"
#include "elasso/weights.hpp"

using namespace elasso;

TEST_CASE("elasso penalty hand values") {
  WeightVector w = make_weight_vector(Eigen::Vector3d(1, 0, -1));
  CHECK(elasso_penalty(Eigen::Vector3d(7, 7, 7), w) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(elasso_penalty(Eigen::Vector3d(6, 3, 1), w) ==
        doctest::Approx(std::log(6.0)).epsilon(1e-12));

  WeightVector w2 = make_weight_vector(Eigen::Vector2d(0.5, -0.5));
  CHECK(elasso_penalty(Eigen::Vector2d(4, 1), w2) ==
        doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-12));

  CHECK_THROWS_AS(elasso_penalty(Eigen::Vector2d(4, 1), w), LengthMismatch);
  CHECK_THROWS_AS(elasso_penalty(Eigen::Vector3d(6, 3, -1), w),
                  NonpositiveEigenvalue);
}

TEST_CASE("kl and eccentricity penalties") {
  Eigen::Vector2d lam(2, 1);
  CHECK(kl_penalty(lam) ==
        doctest::Approx(0.5 + std::log(2.0) + 1.0).epsilon(1e-12));
  // Scale invariance of the eccentricity penalty.
  CHECK(eccentricity_penalty(lam) ==
        doctest::Approx(eccentricity_penalty(10.0 * lam)).epsilon(1e-12));
  CHECK(eccentricity_penalty(Eigen::Vector3d(5, 5, 5)) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("ledoit-wolf closed form") {
  Spectrum S = spectral_decompose(Eigen::Vector2d(3, 1).asDiagonal());
  CHECK(ledoit_wolf(S, 0.0).eigenvalues.isApprox(S.eigenvalues));
  CHECK(ledoit_wolf(S, 1.0).eigenvalues.isApprox(Eigen::Vector2d(2, 1)));
  CHECK_THROWS_AS(ledoit_wolf(S, -0.5), NegativeTuning);
}

TEST_CASE("mp distribution support and density") {
  CHECK_THROWS_AS(MPDistribution(0.0), BadInput);
  CHECK_THROWS_AS(MPDistribution(1.0), BadInput);

  MPDistribution dist(0.25);
  CHECK(dist.c_minus() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(dist.c_plus() == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(dist.pdf(3.0) == 0.0);
  CHECK(dist.pdf(0.1) == 0.0);
  CHECK(dist.pdf(1.0) ==
        doctest::Approx(std::sqrt(1.25 * 0.75) / (2.0 * M_PI * 0.25))
            .epsilon(1e-12));
  CHECK(dist.cdf(dist.c_minus()) == 0.0);
  CHECK(dist.cdf(dist.c_plus()) == 1.0);
}

TEST_CASE("mp density integrates to one") {
  // Composite Simpson after x = c- + (c+ - c-) sin^2(theta), which makes
  // the integrand smooth on [0, pi/2].
  for (double nu : {0.04, 0.25, 0.5}) {
    MPDistribution dist(nu);
    double w = dist.c_plus() - dist.c_minus();
    auto g = [&](double theta) {
      double x = dist.c_minus() + w * std::sin(theta) * std::sin(theta);
      return dist.pdf(x) * w * 2.0 * std::sin(theta) * std::cos(theta);
    };
    int m = 20000;
    double h = (M_PI / 2.0) / m;
    double total = g(0.0) + g(M_PI / 2.0);
    for (int i = 1; i < m; ++i) total += (i % 2 ? 4.0 : 2.0) * g(i * h);
    total *= h / 3.0;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("mp cdf monotone and consistent with the quantile") {
  MPDistribution dist(0.25);
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    double x = 0.2 + i * (2.3 - 0.2) / 1000.0;
    double c = dist.cdf(x);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(dist.cdf(dist.quantile(0.5)) == doctest::Approx(0.5).epsilon(1e-8));
  for (double x : {0.5, 1.0, 1.8})
    CHECK(dist.quantile(dist.cdf(x)) == doctest::Approx(x).epsilon(1e-6));
  CHECK(dist.quantile(0.999) > 2.2);

  MPDistribution narrow(0.04);
  double med = narrow.quantile(0.5);
  CHECK(med > 0.64);
  CHECK(med < 1.44);
  CHECK_THROWS_AS(dist.quantile(0.0), InvalidProbability);
  CHECK_THROWS_AS(dist.quantile(1.0), InvalidProbability);
}

TEST_CASE("mp weights") {
  CHECK_THROWS_AS(mp_weights(10, 10), DimensionExceedsSample);

  for (auto [q, n] : {std::pair{5, 20}, {20, 100}, {100, 1000}}) {
    WeightVector w = mp_weights(q, n);
    CHECK(std::abs(w.a.sum()) < 1e-12);
    CHECK(w.strictly_decreasing);
    for (int j = 0; j + 1 < q; ++j) CHECK(w.a[j] > w.a[j + 1]);
  }

  // Two quantiles centred: a_1 = -a_2 = (xi_1 - xi_2)/2.
  WeightVector w2 = mp_weights(2, 8);
  MPDistribution dist(0.25);
  double xi1 = dist.quantile(0.75), xi2 = dist.quantile(0.25);
  CHECK(w2.a[0] == doctest::Approx((xi1 - xi2) / 2.0).epsilon(1e-9));
  CHECK(w2.a[1] == doctest::Approx(-(xi1 - xi2) / 2.0).epsilon(1e-9));

  // As n grows with q fixed the spectrum concentrates, so the weights
  // shrink toward zero.
  WeightVector wlim = mp_weights(5, 1000000);
  CHECK(wlim.a.cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("named weight families") {
  WeightVector c2 = condition_number_weights(2);
  CHECK(c2.a.isApprox(Eigen::Vector2d(1, -1)));
  WeightVector c4 = condition_number_weights(4);
  CHECK(c4.a.isApprox(Eigen::Vector4d(1, 0, 0, -1)));
  CHECK(std::abs(c4.a.sum()) < 1e-14);
  CHECK(!c4.strictly_decreasing);

  WeightVector s4 = smallest_group_weights(4);
  CHECK(s4.a.isApprox(Eigen::Vector4d(1, 1, 1, -3)));

  WeightVector p4 = pairwise_weights(4);
  CHECK(p4.a.isApprox(Eigen::Vector4d(3, 1, -1, -3)));
  CHECK(p4.strictly_decreasing);
}

TEST_CASE("weight vector validation") {
  CHECK_THROWS_AS(make_weight_vector(Eigen::Vector2d(-1, 1)), BadInput);
  CHECK_THROWS_AS(make_weight_vector(Eigen::Vector2d(1, -0.5)), BadInput);
  // Small sum drift is re-centred.
  WeightVector w = make_weight_vector(Eigen::Vector2d(1.0 + 5e-7, -1.0));
  CHECK(std::abs(w.a.sum()) < 1e-15);
  CHECK(w.strictly_decreasing);
  WeightVector tied = make_weight_vector(Eigen::Vector3d(1, 1, -2));
  CHECK(!tied.strictly_decreasing);
}
