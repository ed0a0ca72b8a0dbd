#include <doctest.h>

#include <Eigen/Core>

#include "elasso/forecast.hpp"
#include "elasso/spectrum.hpp"

using namespace elasso;

TEST_CASE("prediction split validation") {
  Spectrum S = spectral_decompose(Eigen::MatrixXd::Identity(3, 3));
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(make_prediction_split(0, S, mu), BadInput);
  CHECK_THROWS_AS(make_prediction_split(3, S, mu), BadInput);
  CHECK_THROWS_AS(make_prediction_split(1, S, Eigen::VectorXd::Zero(2)),
                  LengthMismatch);
  CHECK(make_prediction_split(2, S, mu).head == 2);
}

TEST_CASE("conditional prediction hand values") {
  // Identity covariance: no information flows from the head block.
  Spectrum eye = spectral_decompose(Eigen::MatrixXd::Identity(3, 3));
  Eigen::VectorXd mu(3);
  mu << 5, 6, 7;
  auto split = make_prediction_split(1, eye, mu);
  Eigen::VectorXd x1(1);
  x1 << 42.0;
  Eigen::VectorXd pred = conditional_predict(split, x1);
  CHECK(pred.isApprox(mu.tail(2)));

  // 2x2 correlated case: regression coefficient 1/2.
  Eigen::MatrixXd m(2, 2);
  m << 2, 1, 1, 2;
  Spectrum S = spectral_decompose(m);
  auto split2 = make_prediction_split(1, S, Eigen::VectorXd::Zero(2));
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK(conditional_predict(split2, one)[0] ==
        doctest::Approx(0.5).epsilon(1e-10));

  // Conditioning at the head mean returns the tail mean.
  Eigen::VectorXd mu2(2);
  mu2 << 3, -1;
  auto split3 = make_prediction_split(1, S, mu2);
  Eigen::VectorXd at_mean(1);
  at_mean << 3.0;
  CHECK(conditional_predict(split3, at_mean)[0] ==
        doctest::Approx(-1.0).epsilon(1e-10));

  Eigen::VectorXd wrong(2);
  wrong << 0, 0;
  CHECK_THROWS_AS(conditional_predict(split2, wrong), LengthMismatch);
}

TEST_CASE("aafe") {
  Eigen::MatrixXd p(2, 2), a(2, 2);
  p << 1, 2, 3, 4;
  a = p;
  AAFEResult same = aafe(p, a);
  CHECK(same.per_component.isZero());
  CHECK(same.average == 0.0);

  Eigen::MatrixXd p1(1, 2), a1(1, 2);
  p1 << 0, 0;
  a1 << 1, 3;
  AAFEResult r = aafe(p1, a1);
  CHECK(r.per_component.isApprox(Eigen::Vector2d(1, 3)));
  CHECK(r.average == doctest::Approx(2.0));

  AAFEResult scaled = aafe(-2.0 * p1, -2.0 * a1);
  CHECK(scaled.average == doctest::Approx(4.0));

  Eigen::MatrixXd wrong(2, 3);
  wrong.setZero();
  CHECK_THROWS_AS(aafe(p, wrong), ShapeMismatch);
}
