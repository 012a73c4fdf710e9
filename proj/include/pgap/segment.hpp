#pragma once
/**
 * @file segment.hpp
 * @brief Discretized one-dimensional Bakry-Emery manifolds.
 *
 * In dimension one Ric vanishes, so Ric + Hess f >= kappa g reduces to
 * f'' >= kappa.  A WeightedSegment stores a uniform grid on [-L/2, L/2], the
 * potential samples f(t_i) and a certified kappa: every interior second
 * difference satisfies (f_{i+1} - 2 f_i + f_{i-1})/h^2 >= kappa - 1e-9, up to
 * the floating-point rounding of the stencil.
 */

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgap/ptrig.hpp"

namespace pgap {

/// Raised when a potential fails the discrete curvature certificate.
class CertificateViolation : public std::runtime_error {
 public:
  CertificateViolation(std::size_t node, double second_difference, double kappa)
      : std::runtime_error("certificate violated at node " + std::to_string(node) + ": f'' = " +
                           std::to_string(second_difference) + " < kappa = " + std::to_string(kappa)),
        node_(node) {}
  [[nodiscard]] std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// One term of a perturbation added to the model potential kappa t^2 / 2.
struct Bump {
  enum class Kind {
    RampSquared,  ///< c (t - t0)_+^2
    Quadratic,    ///< c (t - t0)^2
    Linear,       ///< c t (tilt; leaves f'' unchanged)
  };
  Kind kind = Kind::RampSquared;
  double c = 0.0;
  double t0 = 0.0;

  [[nodiscard]] double operator()(double t) const {
    switch (kind) {
      case Kind::RampSquared: {
        const double x = t > t0 ? t - t0 : 0.0;
        return c * x * x;
      }
      case Kind::Quadratic: return c * (t - t0) * (t - t0);
      case Kind::Linear: return c * t;
    }
    return 0.0;
  }
};

struct BumpSpec {
  std::vector<Bump> terms;
  [[nodiscard]] double operator()(double t) const {
    double s = 0.0;
    for (const auto& b : terms) s += b(t);
    return s;
  }
  [[nodiscard]] bool empty() const noexcept { return terms.empty(); }
};

class WeightedSegment {
 public:
  /// Non-periodic segment [-L/2, L/2] with N cells and N+1 nodes.
  WeightedSegment(double length, std::vector<double> f_values, double kappa, bool periodic = false)
      : length_(length), f_(std::move(f_values)), kappa_(kappa), periodic_(periodic) {
    if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("WeightedSegment: length must be > 0");
    const std::size_t cells = periodic ? f_.size() : f_.size() - 1;
    if (f_.size() < 3) throw DomainError("WeightedSegment: too few nodes");
    h_ = length / static_cast<double>(cells);
    certify();
  }

  [[nodiscard]] double length() const noexcept { return length_; }
  /// Diameter: the segment length, or half the circumference for a circle.
  [[nodiscard]] double diameter() const noexcept { return periodic_ ? 0.5 * length_ : length_; }
  [[nodiscard]] double h() const noexcept { return h_; }
  [[nodiscard]] double kappa() const noexcept { return kappa_; }
  [[nodiscard]] bool periodic() const noexcept { return periodic_; }
  [[nodiscard]] std::size_t nodes() const noexcept { return f_.size(); }
  [[nodiscard]] std::size_t cells() const noexcept { return periodic_ ? f_.size() : f_.size() - 1; }
  [[nodiscard]] const std::vector<double>& f() const noexcept { return f_; }
  [[nodiscard]] double t(std::size_t i) const noexcept { return -0.5 * length_ + static_cast<double>(i) * h_; }

  /// Discrete f'' at interior node i.
  [[nodiscard]] double second_difference(std::size_t i) const {
    const std::size_t n = f_.size();
    const double fm = periodic_ ? f_[(i + n - 1) % n] : f_[i - 1];
    const double fp = periodic_ ? f_[(i + 1) % n] : f_[i + 1];
    return (fp - 2.0 * f_[i] + fm) / (h_ * h_);
  }

 private:
  void certify() const {
    const std::size_t n = f_.size();
    const std::size_t first = periodic_ ? 0 : 1;
    const std::size_t last = periodic_ ? n : n - 1;
    for (std::size_t i = first; i < last; ++i) {
      const double d2 = second_difference(i);
      // 1e-9 slack plus the rounding error of the stencil itself, which grows like eps |f| / h^2
      const double fm = periodic_ ? f_[(i + n - 1) % n] : f_[i - 1];
      const double fp = periodic_ ? f_[(i + 1) % n] : f_[i + 1];
      const double rounding = 8.0 * std::numeric_limits<double>::epsilon() *
                              (std::abs(fm) + 2.0 * std::abs(f_[i]) + std::abs(fp)) / (h_ * h_);
      if (!(d2 >= kappa_ - 1e-9 - rounding)) throw CertificateViolation(i, d2, kappa_);
    }
  }

  double length_;
  std::vector<double> f_;
  double kappa_;
  bool periodic_;
  double h_ = 0.0;
};

/**
 * Segment [-D/2, D/2] with N cells and potential f = kappa t^2/2 + bump(t).
 * With an empty bump the weight e^{-f} is exactly the model weight.
 */
inline WeightedSegment make_segment(double kappa, double diameter, const BumpSpec& bump, std::size_t n_cells) {
  if (n_cells < 32) throw DomainError("make_segment: N must be >= 32");
  if (!(diameter > 0.0)) throw DomainError("make_segment: diameter must be > 0");
  const double h = diameter / static_cast<double>(n_cells);
  std::vector<double> f(n_cells + 1);
  for (std::size_t i = 0; i <= n_cells; ++i) {
    const double t = -0.5 * diameter + static_cast<double>(i) * h;
    f[i] = 0.5 * kappa * t * t + bump(t);
  }
  return WeightedSegment(diameter, std::move(f), kappa);
}

/// Circle of diameter D (circumference 2D) with constant potential; kappa = 0.
inline WeightedSegment make_circle(double diameter, std::size_t n_cells) {
  if (n_cells < 32) throw DomainError("make_circle: N must be >= 32");
  return WeightedSegment(2.0 * diameter, std::vector<double>(n_cells, 0.0), 0.0, true);
}

/// Copy of the segment rescaled by t -> s t: kappa -> kappa / s^2, length -> s L.
inline WeightedSegment rescale(const WeightedSegment& seg, double s) {
  if (!(s > 0.0)) throw DomainError("rescale: factor must be > 0");
  return WeightedSegment(s * seg.length(), seg.f(), seg.kappa() / (s * s), seg.periodic());
}

}  // namespace pgap
