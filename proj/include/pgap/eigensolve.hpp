#pragma once
/**
 * @file eigensolve.hpp
 * @brief First nonzero Neumann eigenvalue mu_p(kappa, D) of
 *
 *     (p-1)|phi'|^{p-2} phi'' - kappa t |phi'|^{p-2} phi' = -mu |phi|^{p-2} phi
 *
 * on [-D/2, D/2].
 *
 * The first eigenfunction is odd and increasing, so the problem is posed on
 * the half interval [0, D/2] with phi(0) = 0 and phi'(D/2) = 0.  In Pruefer
 * variables that is theta(0) = 0 and theta(D/2) = pi_p/2, and mu is found by
 * shooting in lambda on the residual theta_lambda(D/2) - pi_p/2.
 *
 * The kappa = 0 value mu_0 = (p-1)(pi_p/D)^p always brackets the answer:
 * theta' >= alpha on the first quadrant when kappa <= 0, theta' <= alpha when
 * kappa >= 0.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "pgap/model_ode.hpp"

namespace pgap {

/// Raised when the lambda scan cannot bracket a root.
class BracketNotFound : public std::runtime_error {
 public:
  BracketNotFound(const std::string& what, double scan_lo, double scan_hi)
      : std::runtime_error(what + " (scanned [" + std::to_string(scan_lo) + ", " + std::to_string(scan_hi) + "])"),
        lo_(scan_lo), hi_(scan_hi) {}
  [[nodiscard]] double scan_lo() const noexcept { return lo_; }
  [[nodiscard]] double scan_hi() const noexcept { return hi_; }

 private:
  double lo_, hi_;
};

struct EigenQuery {
  EigenQuery(PExponent p_, double kappa_, double diameter_) : p(p_), kappa(kappa_), diameter(diameter_) {
    if (!std::isfinite(kappa)) throw DomainError("EigenQuery: kappa must be finite");
    if (!std::isfinite(diameter) || !(diameter > 0.0)) throw DomainError("EigenQuery: diameter must be > 0");
  }
  EigenQuery(double p_, double kappa_, double diameter_) : EigenQuery(PExponent(p_), kappa_, diameter_) {}

  PExponent p;
  double kappa;
  double diameter;
};

struct EigenResult {
  double mu = 0.0;
  double lo = 0.0;  ///< final bracket
  double hi = 0.0;
  int iterations = 0;
  /// First time theta reaches pi_p/2 from theta(0) = 0 at lambda = mu; equals abar when kappa <= 0.
  double hit_time = 0.0;
  /// theta(D/2) - pi_p/2 at lambda = mu.
  double neumann_residual = 0.0;
};

struct ShootOptions {
  double tol = 1e-8;  ///< relative bracket width
  ToleranceSpec ode{};
  int fine_scan_per_octave = 8;  ///< grid density of the certified scan for kappa > 0
  int max_doublings = 60;
};

/// Closed form mu_p(0, D) = (p-1)(pi_p/D)^p.
inline double mu_closed_form_kappa0(const PExponent& p, double diameter) {
  if (!(diameter > 0.0)) throw DomainError("mu_closed_form_kappa0: diameter must be > 0");
  return (p.value() - 1.0) * std::pow(p.pi_p() / diameter, p.value());
}

/// theta_lambda(D/2) - pi_p/2 for the half-interval problem.
inline double shooting_residual(const EigenQuery& q, double lambda, const ToleranceSpec& tol = {}) {
  const ModelParams mp(q.p, q.kappa, lambda);
  auto res = integrate_prufer(mp, 0.0, 0.0, 0.0, 0.5 * q.diameter, tol);
  return res.trajectory.samples().back().theta - 0.5 * q.p.pi_p();
}

inline EigenResult mu_shoot(const EigenQuery& q, const ShootOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw DomainError("mu_shoot: tol must be > 0");
  const double mu0 = mu_closed_form_kappa0(q.p, q.diameter);
  auto g = [&](double lam) { return shooting_residual(q, lam, opt.ode); };

  EigenResult out;
  double lo = mu0, hi = mu0, glo = 0.0, ghi = 0.0;

  if (q.kappa <= 0.0) {
    // residual is increasing in lambda and g(mu0) >= 0 up to integration noise
    ghi = g(hi);
    for (int k = 0; ghi < 0.0; ++k) {
      if (k > opt.max_doublings) throw BracketNotFound("mu_shoot: upper bracket not found", mu0, hi);
      lo = hi;
      glo = ghi;
      hi *= 2.0;
      ghi = g(hi);
    }
    if (lo != hi) {
      // bracketed by the upward walk
    } else if (ghi == 0.0) {
      lo = hi;
      glo = ghi;
    } else {
      lo = 0.5 * hi;
      glo = g(lo);
      int k = 0;
      while (glo > 0.0) {
        if (++k > opt.max_doublings) throw BracketNotFound("mu_shoot: lower bracket not found", lo, mu0);
        hi = lo;
        ghi = glo;
        lo *= 0.5;
        glo = g(lo);
      }
    }
  } else {
    // g(mu0) <= 0; no monotonicity guarantee, so walk a fine geometric grid
    // upwards and keep the first sign change.
    const double ratio = std::pow(2.0, 1.0 / opt.fine_scan_per_octave);
    glo = g(lo);
    hi = lo * ratio;
    ghi = g(hi);
    int k = 0;
    while (ghi < 0.0) {
      if (++k > opt.max_doublings * opt.fine_scan_per_octave)
        throw BracketNotFound("mu_shoot: upper bracket not found", mu0, hi);
      lo = hi;
      glo = ghi;
      hi *= ratio;
      ghi = g(hi);
    }
  }

  if (lo == hi) {
    out.mu = out.lo = out.hi = lo;
  } else {
    boost::uintmax_t iters = 200;
    auto tolf = [&](double l, double r) { return std::abs(r - l) <= opt.tol * std::abs(l); };
    auto br = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tolf, iters);
    out.lo = br.first;
    out.hi = br.second;
    out.mu = 0.5 * (br.first + br.second);
    out.iterations = static_cast<int>(iters);
  }

  const ModelParams mp(q.p, q.kappa, out.mu);
  const double half = 0.5 * q.p.pi_p();
  auto ev = integrate_prufer(mp, 0.0, 0.0, 0.0, q.diameter, opt.ode, PhaseEvent{half});
  out.hit_time = ev.event_time.value_or(std::nan(""));
  out.neumann_residual = g(out.mu);
  return out;
}

/// Neumann length of the odd model solution, 2 abar(lambda).
inline double delta_bar(const ModelParams& params, const ToleranceSpec& tol = {}) {
  return 2.0 * find_abar(params, tol);
}

/**
 * Odd eigenfunction of the model problem on [-D/2, D/2] at lambda = result.mu,
 * normalised so that phi(D/2) = 1.
 */
inline PruferTrajectory model_eigenfunction(const EigenQuery& q, const EigenResult& result,
                                            const ToleranceSpec& tol = {}) {
  const ModelParams mp(q.p, q.kappa, result.mu);
  const double half_d = 0.5 * q.diameter;
  auto fwd = integrate_prufer(mp, 0.0, 0.0, 0.0, half_d, tol);
  auto bwd = integrate_prufer(mp, 0.0, 0.0, 0.0, -half_d, tol);

  std::vector<PruferSample> samples = bwd.trajectory.samples();
  const auto& f = fwd.trajectory.samples();
  samples.insert(samples.end(), f.begin() + 1, f.end());  // t = 0 is shared

  const PruferSample& end = f.back();
  const double w_end = std::exp(end.log_r) * sin_p(q.p, end.theta) / mp.alpha();
  const double shift = -std::log(w_end);
  for (auto& s : samples) s.log_r += shift;
  return PruferTrajectory(mp, 0.0, std::move(samples));
}

}  // namespace pgap
