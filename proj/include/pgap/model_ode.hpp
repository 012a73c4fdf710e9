#pragma once
/**
 * @file model_ode.hpp
 * @brief Geometry of the model initial value problem
 *
 *     w(a) = -1,  w'(a) = 0
 *
 * for the one-dimensional weighted p-Laplacian equation: the first critical
 * point b(a) > a, the height m(a) = w(b(a)), the length delta(a) = b(a) - a,
 * and the symmetric start -abar for which the solution is odd.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "pgap/prufer.hpp"

namespace pgap {

struct ModelGeometry {
  double a = 0.0;
  std::optional<double> b;  ///< empty when theta does not reach pi_p/2 within the horizon
  double m = std::nan("");
  double delta = std::nan("");
  /// Supremum of w over the integrated window; equals m when b(a) is reached.
  double sup_w = std::nan("");

  [[nodiscard]] bool reached() const noexcept { return b.has_value(); }
  /// m(a) under the convention b(a) = +inf when no critical point exists:
  /// the supremum of the (then increasing) profile over the horizon.
  [[nodiscard]] double height() const noexcept { return reached() ? m : sup_w; }
};

struct IvpOptions {
  ToleranceSpec tol{};
  /// Integration length beyond a.  Defaults to 10 pi_p / alpha + |a|.
  std::optional<double> horizon;
};

struct ModelSolution {
  PruferTrajectory trajectory;
  ModelGeometry geometry;
};

/// Solves the model IVP from w(a) = -1, w'(a) = 0 up to the first critical point b(a).
inline ModelSolution solve_model_ivp(const ModelParams& params, double a, const IvpOptions& opts = {}) {
  const double half = 0.5 * params.p().pi_p();
  const double horizon = opts.horizon.value_or(10.0 * params.p().pi_p() / params.alpha() + std::abs(a));
  auto res = integrate_prufer(params, a, -half, std::log(params.alpha()), a + horizon, opts.tol, PhaseEvent{half});
  ModelGeometry g;
  g.a = a;
  for (const auto& smp : res.trajectory.samples())
    g.sup_w = std::isnan(g.sup_w) ? res.trajectory.profile(smp).w : std::max(g.sup_w, res.trajectory.profile(smp).w);
  if (res.event_time) {
    g.b = *res.event_time;
    g.m = std::exp(res.trajectory.samples().back().log_r) / params.alpha();
    g.delta = *g.b - a;
  }
  return {std::move(res.trajectory), g};
}

/**
 * abar > 0 such that the model solution started at -abar is odd.  Found by
 * integrating theta' from theta(0) = 0 backwards to theta = -pi_p/2.
 * Requires kappa <= 0.
 */
inline double find_abar(const ModelParams& params, const ToleranceSpec& tol = {}) {
  if (params.kappa() > 0.0) throw DomainError("find_abar: requires kappa <= 0");
  const double quarter = 0.5 * params.p().pi_p() / params.alpha();  // pi_p / (2 alpha)
  if (params.kappa() == 0.0) return quarter;
  const double half = 0.5 * params.p().pi_p();
  // theta' >= alpha on the backward leg, so the event precedes -pi_p/(2 alpha).
  auto res = integrate_prufer(params, 0.0, 0.0, 0.0, -1.01 * quarter, tol, PhaseEvent{-half});
  if (!res.event_time) throw EventNotFound("find_abar: theta did not reach -pi_p/2");
  return -*res.event_time;
}

/// Batch evaluation of (b, m, delta) over start abscissae.
inline std::vector<ModelGeometry> geometry_scan(const ModelParams& params, const std::vector<double>& a_values,
                                                const IvpOptions& opts = {}) {
  std::vector<ModelGeometry> out;
  out.reserve(a_values.size());
  for (double a : a_values) out.push_back(solve_model_ivp(params, a, opts).geometry);
  return out;
}

/**
 * Inverse Psi of a strictly increasing model profile phi on [lo, hi].
 *
 * Psi is evaluated by bracketed root finding on the trajectory's dense output,
 * so Psi(phi(t)) = t holds to the interpolation accuracy everywhere, not only
 * at the stored samples.
 */
class InverseProfile {
 public:
  InverseProfile(PruferTrajectory trajectory, double lo, double hi) : traj_(std::move(trajectory)), lo_(lo), hi_(hi) {
    if (!(hi > lo)) throw DomainError("InverseProfile: empty interval");
    if (lo < traj_.t_min() || hi > traj_.t_max()) throw DomainError("InverseProfile: interval outside trajectory");
    // w' = r cos_p(theta) >= 0 needs theta inside one window of width pi_p
    const double th_lo = traj_.state_at(lo)[0], th_hi = traj_.state_at(hi)[0];
    double th_min = std::min(th_lo, th_hi), th_max = std::max(th_lo, th_hi);
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& s : traj_.samples()) {
      if (s.t < lo || s.t > hi) continue;
      const double w = traj_.profile(s).w;
      if (!(w > prev)) throw DomainError("InverseProfile: profile is not strictly increasing on the interval");
      prev = w;
      th_min = std::min(th_min, s.theta);
      th_max = std::max(th_max, s.theta);
    }
    const auto& pe = traj_.params().p();
    if (th_max - th_min > pe.pi_p() * (1.0 + 1e-9) || cos_p(pe, th_lo) < -1e-8 || cos_p(pe, th_hi) < -1e-8)
      throw DomainError("InverseProfile: profile is not strictly increasing on the interval");
    w_lo_ = traj_.profile_at(lo).w;
    w_hi_ = traj_.profile_at(hi).w;
  }

  /// Whole increasing branch [a, b(a)] of a model solution.
  static InverseProfile from_solution(const ModelSolution& sol) {
    if (!sol.geometry.reached()) throw DomainError("InverseProfile: model solution has no critical point b(a)");
    return InverseProfile(sol.trajectory, sol.geometry.a, *sol.geometry.b);
  }

  [[nodiscard]] double t_lo() const noexcept { return lo_; }
  [[nodiscard]] double t_hi() const noexcept { return hi_; }
  [[nodiscard]] double w_lo() const noexcept { return w_lo_; }
  [[nodiscard]] double w_hi() const noexcept { return w_hi_; }
  [[nodiscard]] const PruferTrajectory& trajectory() const noexcept { return traj_; }

  /// Psi(x) for x in [w_lo, w_hi].
  [[nodiscard]] double operator()(double x) const {
    if (x <= w_lo_) {
      if (x < w_lo_ - 1e-12 * (1.0 + std::abs(w_lo_))) throw DomainError("InverseProfile: value below profile range");
      return lo_;
    }
    if (x >= w_hi_) {
      if (x > w_hi_ + 1e-12 * (1.0 + std::abs(w_hi_))) throw DomainError("InverseProfile: value above profile range");
      return hi_;
    }
    auto g = [&](double t) { return traj_.profile_at(t).w - x; };
    boost::uintmax_t iters = 200;
    auto tolf = [](double l, double r) { return std::abs(r - l) <= 1e-15 * (1.0 + std::abs(l)); };
    auto br = boost::math::tools::toms748_solve(g, lo_, hi_, w_lo_ - x, w_hi_ - x, tolf, iters);
    return 0.5 * (br.first + br.second);
  }

  /// phi'(Psi(x)), the gradient bound at height x.
  [[nodiscard]] double slope_at_value(double x) const { return traj_.profile_at((*this)(x)).dw; }

 private:
  PruferTrajectory traj_;
  double lo_, hi_;
  double w_lo_ = 0.0, w_hi_ = 0.0;
};

}  // namespace pgap
