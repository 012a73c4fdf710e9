#pragma once
/**
 * @file ptrig.hpp
 * @brief p-trigonometric functions sin_p, cos_p, tan_p, arctan_p and the
 *        signed power used by the weighted p-Laplacian.
 *
 * sin_p is the inverse of
 *
 *     F(y) = \int_0^y (1 - s^p)^{-1/p} ds,   y in [0, 1],
 *
 * extended oddly to [-pi_p/2, pi_p/2], by reflection sin_p(t) = sin_p(pi_p - t)
 * on [pi_p/2, 3 pi_p/2] and periodically with period 2 pi_p.  cos_p is its
 * derivative, and |sin_p|^p + |cos_p|^p = 1.
 *
 * The defining integral is evaluated through its Gauss hypergeometric series
 * and inverted by a safeguarded Newton iteration.  Two charts are used:
 *
 *   - y^p <= 1/2 : solve F(y) = t for y = sin_p(t);
 *   - y^p >  1/2 : solve G(z) = pi_p/2 - t for z = cos_p(t)^{p-1}, where
 *                  G is the tail integral \int_y^1 (1 - s^p)^{-1/p} ds.
 *
 * Both charts have bounded Newton derivatives, so sin_p and cos_p are each
 * computed to full relative precision near the critical points +-pi_p/2.
 */

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace pgap {

/// Thrown when a precondition on a numeric argument is violated.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Signed power sign(x) |x|^q with the convention odd_power(0, q) = 0.
inline double odd_power(double x, double q) {
  if (!(q >= 0.0)) throw DomainError("odd_power: exponent must be >= 0, got " + std::to_string(q));
  if (x == 0.0) return 0.0;
  const double m = std::pow(std::abs(x), q);
  return x > 0.0 ? m : -m;
}

namespace detail {

/// 2F1(a, b; c; x) for 0 <= x <= 1/2 by direct summation.
inline double hyp2f1_small(double a, double b, double c, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 200; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace detail

/**
 * Validated exponent p in (1, inf) together with the derived half-period
 * pi_p = 2 pi / (p sin(pi/p)).
 */
class PExponent {
 public:
  explicit PExponent(double p) : p_(p) {
    if (!std::isfinite(p) || !(p > 1.0))
      throw DomainError("PExponent: p must be finite and > 1, got " + std::to_string(p));
    pi_p_ = 2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p));
    split_y_ = std::pow(0.5, 1.0 / p);
    split_t_ = sine_chart(split_y_);
  }

  [[nodiscard]] double value() const noexcept { return p_; }
  [[nodiscard]] double pi_p() const noexcept { return pi_p_; }
  [[nodiscard]] double conjugate() const noexcept { return p_ / (p_ - 1.0); }

  /// F(y) = \int_0^y (1-s^p)^{-1/p} ds for 0 <= y <= 2^{-1/p}.
  [[nodiscard]] double sine_chart(double y) const {
    const double yp = std::pow(y, p_);
    const double a = 1.0 / p_;
    return y * detail::hyp2f1_small(a, a, 1.0 + a, yp);
  }

  /// \int_y^1 (1-s^p)^{-1/p} ds expressed in z = cos_p^{p-1}, valid for z^{p/(p-1)} <= 1/2.
  [[nodiscard]] double cosine_chart(double z) const {
    const double cp = std::pow(z, p_ / (p_ - 1.0));
    const double a = 1.0 - 1.0 / p_;
    return z / (p_ - 1.0) * detail::hyp2f1_small(a, a, 1.0 + a, cp);
  }

  /// Phase at which |sin_p|^p = 1/2; the boundary between the two charts.
  [[nodiscard]] double chart_split() const noexcept { return split_t_; }

  friend bool operator==(const PExponent& a, const PExponent& b) noexcept { return a.p_ == b.p_; }

 private:
  double p_;
  double pi_p_;
  double split_y_;
  double split_t_;
};

/// Generalized half-period pi_p = 2 pi / (p sin(pi/p)).
inline double pi_p(const PExponent& p) noexcept { return p.pi_p(); }

/// Pair (sin_p t, cos_p t).
struct SinCosP {
  double sin;
  double cos;
};

namespace detail {

// Solves for (sin_p t, cos_p t) with t in [0, pi_p/2].
inline SinCosP sincos_first_quadrant(const PExponent& pe, double t) {
  const double p = pe.value();
  const double half = 0.5 * pe.pi_p();
  if (t <= 0.0) return {0.0, 1.0};
  if (t >= half) return {1.0, 0.0};

  if (t <= pe.chart_split()) {
    // F is convex and increasing with F(y) >= y, so Newton from y0 = min(t, y*) descends monotonically.
    double lo = 0.0;
    double hi = std::pow(0.5, 1.0 / p);
    double y = std::min(t, hi);
    for (int it = 0; it < 100; ++it) {
      const double g = pe.sine_chart(y) - t;
      if (g > 0.0) hi = y; else lo = y;
      const double dg = std::pow(1.0 - std::pow(y, p), -1.0 / p);
      double next = y - g / dg;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - y) <= 1e-16 * std::max(y, 1e-300) || hi - lo <= 1e-300) {
        y = next;
        break;
      }
      y = next;
    }
    const double yp = std::pow(y, p);
    return {y, std::pow(1.0 - yp, 1.0 / p)};
  }

  // Tail chart in z = cos^{p-1}: dG/dz = (1 - c^p)^{(1-p)/p} / (p - 1), bounded for c^p <= 1/2.
  const double target = half - t;
  const double q = p / (p - 1.0);
  double lo = 0.0;
  double hi = std::pow(0.5, (p - 1.0) / p);
  double z = std::min(hi, (p - 1.0) * target);
  for (int it = 0; it < 100; ++it) {
    const double g = pe.cosine_chart(z) - target;
    if (g > 0.0) hi = z; else lo = z;
    const double cp = std::pow(z, q);
    const double dg = std::pow(1.0 - cp, (1.0 - p) / p) / (p - 1.0);
    double next = z - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-16 * std::max(z, 1e-300) || hi - lo <= 1e-300) {
      z = next;
      break;
    }
    z = next;
  }
  const double cp = std::pow(z, q);
  return {std::pow(1.0 - cp, 1.0 / p), std::pow(z, 1.0 / (p - 1.0))};
}

}  // namespace detail

/// Evaluates sin_p and cos_p together for any real t.
inline SinCosP sincos_p(const PExponent& pe, double t) {
  const double pp = pe.pi_p();
  const double half = 0.5 * pp;
  // Reduce to [-pi_p/2, 3 pi_p/2).
  double u = std::fmod(t + half, 2.0 * pp);
  if (u < 0.0) u += 2.0 * pp;
  u -= half;
  double cos_sign = 1.0;
  if (u > half) {
    u = pp - u;  // sin_p(t) = sin_p(pi_p - t), cos_p(t) = -cos_p(pi_p - t)
    cos_sign = -1.0;
  }
  const double sgn = u < 0.0 ? -1.0 : 1.0;
  SinCosP r = detail::sincos_first_quadrant(pe, std::abs(u));
  return {sgn * r.sin, cos_sign * r.cos};
}

inline double sin_p(const PExponent& pe, double t) { return sincos_p(pe, t).sin; }
inline double cos_p(const PExponent& pe, double t) { return sincos_p(pe, t).cos; }

/// tan_p = sin_p / cos_p; infinite at the critical points.
inline double tan_p(const PExponent& pe, double t) {
  const SinCosP sc = sincos_p(pe, t);
  return sc.sin / sc.cos;
}

/**
 * Inverse of tan_p on (-pi_p/2, pi_p/2).  Infinite arguments map to +-pi_p/2.
 * Computed without iteration: tan_p(theta) = x fixes |sin_p|^p = x^p/(1+x^p).
 */
inline double arctan_p(const PExponent& pe, double x) {
  const double p = pe.value();
  const double half = 0.5 * pe.pi_p();
  if (std::isnan(x)) return x;
  if (std::isinf(x)) return x > 0 ? half : -half;
  const double ax = std::abs(x);
  const double sgn = x < 0.0 ? -1.0 : 1.0;
  if (ax <= 1.0) {
    // sin^p = ax^p / (1 + ax^p) <= 1/2: sine chart.
    const double y = ax / std::pow(1.0 + std::pow(ax, p), 1.0 / p);
    return sgn * pe.sine_chart(y);
  }
  // cos = 1 / (ax (1 + ax^{-p})^{1/p}); tail chart in z = cos^{p-1}.
  const double c = 1.0 / (ax * std::pow(1.0 + std::pow(ax, -p), 1.0 / p));
  return sgn * (half - pe.cosine_chart(std::pow(c, p - 1.0)));
}

}  // namespace pgap
