#pragma once

#include <cmath>
#include <limits>

#include "elasso/errors.hpp"

namespace elasso {

/// Marchenko-Pastur law with aspect parameter nu = q/n in (0,1).
/// Support is [c_minus, c_plus] with c_pm = (1 -/+ sqrt(nu))^2.
class MPDistribution {
 public:
  explicit MPDistribution(double nu) : nu_(nu) {
    if (!(nu > 0.0 && nu < 1.0))
      throw BadInput("MPDistribution: nu must lie in (0,1), got " +
                     std::to_string(nu));
    double s = std::sqrt(nu);
    c_minus_ = (1.0 - s) * (1.0 - s);
    c_plus_ = (1.0 + s) * (1.0 + s);
  }

  double nu() const { return nu_; }
  double c_minus() const { return c_minus_; }
  double c_plus() const { return c_plus_; }

  /// Density sqrt((c_plus - x)(x - c_minus)) / (2 pi nu x); zero off support.
  double pdf(double x) const {
    if (x <= c_minus_ || x >= c_plus_) return 0.0;
    return std::sqrt((c_plus_ - x) * (x - c_minus_)) / (2.0 * pi() * nu_ * x);
  }

  /// CDF by adaptive Simpson quadrature after the substitution
  /// x = c_minus + (c_plus - c_minus) sin^2(theta), which removes the
  /// square-root endpoint singularities of the density.
  double cdf(double x) const {
    if (x <= c_minus_) return 0.0;
    if (x >= c_plus_) return 1.0;
    double t = std::asin(std::sqrt((x - c_minus_) / (c_plus_ - c_minus_)));
    double v = integrate_theta(0.0, t);
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }

  /// Inverse CDF by bisection on [c_minus, c_plus] to 1e-10.
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
      throw InvalidProbability("mp_quantile: p must lie in (0,1), got " +
                               std::to_string(p));
    double lo = c_minus_, hi = c_plus_;
    while (hi - lo > 1e-10) {
      double mid = 0.5 * (lo + hi);
      (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  static double pi() { return 3.14159265358979323846; }

  // Density pulled back through the sin^2 substitution; smooth on [0, pi/2].
  double g(double theta) const {
    double w = c_plus_ - c_minus_;
    double s2 = std::sin(2.0 * theta);
    double x = c_minus_ + w * std::sin(theta) * std::sin(theta);
    return w * w * s2 * s2 / (4.0 * pi() * nu_ * x);
  }

  double integrate_theta(double a, double b) const {
    double fa = g(a), fb = g(b), m = 0.5 * (a + b), fm = g(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive(a, b, fa, fm, fb, whole, 1e-10, 50);
  }

  double adaptive(double a, double b, double fa, double fm, double fb,
                  double whole, double tol, int depth) const {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = g(lm), frm = g(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
      return left + right + delta / 15.0;
    return adaptive(a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           adaptive(m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
  }

  double nu_;
  double c_minus_;
  double c_plus_;
};

inline double mp_pdf(const MPDistribution& dist, double x) {
  return dist.pdf(x);
}
inline double mp_cdf(const MPDistribution& dist, double x) {
  return dist.cdf(x);
}
inline double mp_quantile(const MPDistribution& dist, double p) {
  return dist.quantile(p);
}

}  // namespace elasso
