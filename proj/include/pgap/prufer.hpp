#pragma once
/**
 * @file prufer.hpp
 * @brief Generalized Pruefer transformation of the one-dimensional model
 *        equation
 *
 *     (p-1)|w'|^{p-2} w'' - kappa t |w'|^{p-2} w' + lambda |w|^{p-2} w = 0.
 *
 * With alpha = (lambda/(p-1))^{1/p} and p-polar coordinates
 *
 *     alpha w = r sin_p(theta),   w' = r cos_p(theta),
 *
 * the phase and log-amplitude obey
 *
 *     theta'   = alpha - kappa t/(p-1) |cos_p|^{p-2} cos_p sin_p(theta),
 *     (log r)' = kappa t/(p-1) |cos_p(theta)|^p.
 *
 * The pair is integrated with an adaptive Dormand-Prince 5(4) stepper.  Every
 * accepted step is stored together with the right-hand side at its end point,
 * giving a C^1 cubic Hermite dense output on the whole trajectory.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include "pgap/ptrig.hpp"

namespace pgap {

/// Raised when the adaptive integrator cannot make progress.  Carries the
/// last accepted state.
class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, double t, double theta, double log_r)
      : std::runtime_error(what), t_(t), theta_(theta), log_r_(log_r) {}
  [[nodiscard]] double t() const noexcept { return t_; }
  [[nodiscard]] double theta() const noexcept { return theta_; }
  [[nodiscard]] double log_r() const noexcept { return log_r_; }

 private:
  double t_, theta_, log_r_;
};

/// Raised when a phase event is not found inside the integration horizon.
class EventNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ToleranceSpec {
  double rel = 1e-10;
  double abs = 1e-12;
  double initial_step = 1e-4;
  double max_step = 0.0;  ///< 0 selects no cap.
  double min_step = 1e-14;
  /// Samples recorded per accepted step (from the stepper's dense output), so
  /// the cubic Hermite reconstruction between samples stays below the step error.
  int samples_per_step = 4;
};

/// (p, kappa, lambda) with the Pruefer amplitude alpha = (lambda/(p-1))^{1/p}.
class ModelParams {
 public:
  ModelParams(PExponent p, double kappa, double lambda) : p_(p), kappa_(kappa), lambda_(lambda) {
    if (!std::isfinite(kappa)) throw DomainError("ModelParams: kappa must be finite");
    if (!std::isfinite(lambda) || !(lambda > 0.0))
      throw DomainError("ModelParams: lambda must be finite and > 0, got " + std::to_string(lambda));
    alpha_ = std::pow(lambda / (p.value() - 1.0), 1.0 / p.value());
  }
  ModelParams(double p, double kappa, double lambda) : ModelParams(PExponent(p), kappa, lambda) {}

  [[nodiscard]] const PExponent& p() const noexcept { return p_; }
  [[nodiscard]] double kappa() const noexcept { return kappa_; }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }

  /// Right-hand side of the (theta, log r) system at time t.
  [[nodiscard]] std::array<double, 2> rhs(double t, double theta) const {
    const SinCosP sc = sincos_p(p_, theta);
    const double pm1 = p_.value() - 1.0;
    const double k = kappa_ * t / pm1;
    const double cpow = std::pow(std::abs(sc.cos), pm1);  // |cos_p|^{p-1}
    const double phi_cos = sc.cos < 0.0 ? -cpow : cpow;
    return {alpha_ - k * phi_cos * sc.sin, k * cpow * std::abs(sc.cos)};
  }

 private:
  PExponent p_;
  double kappa_;
  double lambda_;
  double alpha_;
};

struct PruferSample {
  double t;
  double theta;
  double log_r;
  double dtheta;
  double dlog_r;
};

/// Reconstructed profile value and slope.
struct ProfilePoint {
  double w;
  double dw;
};

/**
 * Immutable sampled (theta, log r) path with dense output.  Samples are kept
 * sorted by increasing t irrespective of the integration direction.
 */
class PruferTrajectory {
 public:
  PruferTrajectory(ModelParams params, double start, std::vector<PruferSample> samples)
      : params_(std::move(params)), start_(start), samples_(std::move(samples)) {
    std::sort(samples_.begin(), samples_.end(),
              [](const PruferSample& x, const PruferSample& y) { return x.t < y.t; });
  }

  [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
  /// Abscissa of the initial condition.
  [[nodiscard]] double start() const noexcept { return start_; }
  [[nodiscard]] const std::vector<PruferSample>& samples() const noexcept { return samples_; }
  [[nodiscard]] double t_min() const { return samples_.front().t; }
  [[nodiscard]] double t_max() const { return samples_.back().t; }

  /// Reconstructs (w, w') from a (theta, log r) pair.
  [[nodiscard]] ProfilePoint reconstruct(double theta, double log_r) const {
    const SinCosP sc = sincos_p(params_.p(), theta);
    const double r = std::exp(log_r);
    return {r * sc.sin / params_.alpha(), r * sc.cos};
  }

  [[nodiscard]] ProfilePoint profile(const PruferSample& s) const { return reconstruct(s.theta, s.log_r); }

  /// Dense (theta, log r) at any t in [t_min, t_max] by cubic Hermite interpolation.
  [[nodiscard]] std::array<double, 2> state_at(double t) const {
    if (t < t_min() || t > t_max())
      throw DomainError("PruferTrajectory::state_at: t outside trajectory range");
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double v, const PruferSample& s) { return v < s.t; });
    if (it == samples_.end()) return {samples_.back().theta, samples_.back().log_r};
    if (it == samples_.begin()) return {it->theta, it->log_r};
    const PruferSample& s1 = *it;
    const PruferSample& s0 = *(it - 1);
    const double h = s1.t - s0.t;
    if (h <= 0.0) return {s1.theta, s1.log_r};
    const double x = (t - s0.t) / h;
    const double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
    const double h10 = x * (1 - x) * (1 - x);
    const double h01 = x * x * (3 - 2 * x);
    const double h11 = x * x * (x - 1);
    return {h00 * s0.theta + h10 * h * s0.dtheta + h01 * s1.theta + h11 * h * s1.dtheta,
            h00 * s0.log_r + h10 * h * s0.dlog_r + h01 * s1.log_r + h11 * h * s1.dlog_r};
  }

  [[nodiscard]] ProfilePoint profile_at(double t) const {
    const auto s = state_at(t);
    return reconstruct(s[0], s[1]);
  }

 private:
  ModelParams params_;
  double start_;
  std::vector<PruferSample> samples_;
};

/// Optional phase event: stop the first time theta crosses `target`.
struct PhaseEvent {
  double target;
};

struct IntegrationResult {
  PruferTrajectory trajectory;
  std::optional<double> event_time;  ///< set iff the event fired before t_end
};

/**
 * Integrates the Pruefer system from (a, theta0, log_r0) towards t_end (either
 * direction).  When `event` is given, integration stops at the first crossing
 * of theta = event->target, located by TOMS 748 on the stepper's own dense
 * output.
 */
inline IntegrationResult integrate_prufer(const ModelParams& params, double a, double theta0, double log_r0,
                                          double t_end, const ToleranceSpec& tol = {},
                                          std::optional<PhaseEvent> event = std::nullopt) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;

  if (!(tol.rel > 0.0) || !(tol.abs > 0.0)) throw DomainError("integrate_prufer: tolerances must be positive");
  if (!std::isfinite(t_end) || t_end == a) throw DomainError("integrate_prufer: t_end must differ from a");

  const double dir = t_end > a ? 1.0 : -1.0;
  const double span = std::abs(t_end - a);
  // Integrate in s >= 0 with t = a + dir * s.
  auto sys = [&](const State& x, State& dxds, double s) {
    const auto f = params.rhs(a + dir * s, x[0]);
    dxds[0] = dir * f[0];
    dxds[1] = dir * f[1];
  };

  auto make_sample = [&](double s, const State& x) {
    const double t = a + dir * s;
    const auto f = params.rhs(t, x[0]);
    return PruferSample{t, x[0], x[1], f[0], f[1]};
  };

  std::vector<PruferSample> out;
  State x0{theta0, log_r0};
  out.push_back(make_sample(0.0, x0));

  const double event_sign = event ? ((theta0 - event->target) >= 0.0 ? 1.0 : -1.0) : 0.0;
  if (event && theta0 == event->target) {
    return {PruferTrajectory(params, a, std::move(out)), a};
  }

  using Dopri = odeint::runge_kutta_dopri5<State>;
  const double max_dt = tol.max_step > 0.0 ? tol.max_step : span;
  auto stepper = odeint::make_dense_output(tol.abs, tol.rel, max_dt, Dopri());
  stepper.initialize(x0, 0.0, std::min(tol.initial_step, span));

  std::optional<double> event_time;
  State xs;
  const int sub = std::max(1, tol.samples_per_step);
  // interior samples of the current step on (s0, s_end)
  auto fill = [&](double s0, double s1, double s_end) {
    for (int k = 1; k < sub; ++k) {
      const double s = s0 + (s1 - s0) * k / sub;
      if (s >= s_end) break;
      stepper.calc_state(s, xs);
      out.push_back(make_sample(s, xs));
    }
  };
  while (true) {
    const State last = stepper.current_state();
    const double s_last = stepper.current_time();
    std::pair<double, double> step;
    try {
      step = stepper.do_step(sys);
    } catch (const std::exception& e) {
      throw IntegrationFailure(std::string("integrate_prufer: ") + e.what(), a + dir * s_last, last[0], last[1]);
    }
    const double s0 = step.first;
    const double s1 = step.second;
    if (!(s1 - s0 > tol.min_step * (1.0 + std::abs(s0))))
      throw IntegrationFailure("integrate_prufer: step size underflow", a + dir * s0, last[0], last[1]);
    const State x1 = stepper.current_state();
    if (!std::isfinite(x1[0]) || !std::isfinite(x1[1]))
      throw IntegrationFailure("integrate_prufer: non-finite state", a + dir * s0, last[0], last[1]);

    const double s_cap = std::min(s1, span);

    if (event) {
      auto g = [&](double s) {
        State xi;
        stepper.calc_state(s, xi);
        return event_sign * (xi[0] - event->target);
      };
      const double g1 = g(s_cap);
      if (g1 <= 0.0) {
        double root = s_cap;
        if (g1 < 0.0) {
          const double g0 = event_sign * (last[0] - event->target);
          boost::uintmax_t iters = 200;
          auto tolf = [](double l, double r) { return std::abs(r - l) <= 1e-15 * (1.0 + std::abs(l)); };
          auto bracket = boost::math::tools::toms748_solve(g, s0, s_cap, g0, g1, tolf, iters);
          root = 0.5 * (bracket.first + bracket.second);
        }
        fill(s0, s1, root);
        stepper.calc_state(root, xs);
        xs[0] = event->target;
        if (root > 0.0) out.push_back(make_sample(root, xs));
        event_time = a + dir * root;
        break;
      }
    }

    fill(s0, s1, s_cap);
    if (s1 >= span) {
      stepper.calc_state(span, xs);
      out.push_back(make_sample(span, xs));
      break;
    }
    out.push_back(make_sample(s1, x1));
  }
  return {PruferTrajectory(params, a, std::move(out)), event_time};
}

}  // namespace pgap
