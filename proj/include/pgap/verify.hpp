#pragma once
/**
 * @file verify.hpp
 * @brief Discrete checks of the sharp lower bound, the Lichnerowicz-type bound
 *        and the gradient comparison on weighted segments.
 *
 * Verdicts are data.  A lower-bound violation is only declared when
 *
 *     lambda_h < mu * (1 - eps_h)
 *
 * where eps_h is the larger of
 *   - the relative error of the discrete solver on exactly solvable p = 2
 *     problems at the same N (mu = 1 for f = 0, D = pi; mu = 2 for f = -t^2/2, D = 2),
 *   - twice the Richardson estimate |lambda_N - lambda_{N/2}| / (3 lambda_N)
 *     of the segment's own discretisation error.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgap/bounds.hpp"
#include "pgap/rayleigh.hpp"

namespace pgap {

/// The range of u cannot be matched by any model profile on [a, b(a)].
class RangeContainment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- mesh tolerance

struct MeshTolerance {
  std::size_t n_cells = 0;
  double calibrated = 0.0;  ///< p = 2 exact-case relative error at this N
  double refinement = 0.0;  ///< 2 x Richardson estimate for the segment itself; 0 if not computed

  [[nodiscard]] double value() const noexcept { return std::max(calibrated, refinement); }
};

/// Relative error of the discrete solver on the exactly solvable p = 2 cases at N cells.
inline double calibrate_eps_h(std::size_t n_cells, const RayleighOptions& opt = {}) {
  const PExponent p2(2.0);
  const auto flat = make_segment(0.0, std::numbers::pi, {}, n_cells);
  const auto gauss = make_segment(-1.0, 2.0, {}, n_cells);  // mu = 2, eigenfunction t e^{-t^2/2}
  const double e1 = std::abs(discrete_first_eigenvalue(flat, p2, opt).lambda_h - 1.0);
  const double e2 = std::abs(discrete_first_eigenvalue(gauss, p2, opt).lambda_h - 2.0) / 2.0;
  return std::max(e1, e2);
}

/// Thread-safe memo of calibrate_eps_h keyed by N.
class EpsCalibration {
 public:
  double operator()(std::size_t n_cells) {
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (auto it = cache_.find(n_cells); it != cache_.end()) return it->second;
    }
    const double e = calibrate_eps_h(n_cells);
    std::lock_guard<std::mutex> lk(mu_);
    cache_.emplace(n_cells, e);
    return e;
  }

 private:
  std::mutex mu_;
  std::map<std::size_t, double> cache_;
};

inline EpsCalibration& default_calibration() {
  static EpsCalibration c;
  return c;
}

/**
 * Every other node of a non-periodic segment with an even cell count.  The
 * coarse second differences are (1,2,1)/4 averages of fine ones, so the
 * certificate carries over.
 */
inline WeightedSegment coarsen(const WeightedSegment& seg) {
  if (seg.periodic() || seg.cells() % 2 != 0 || seg.cells() < 64)
    throw DomainError("coarsen: needs a non-periodic segment with an even cell count >= 64");
  std::vector<double> f;
  f.reserve(seg.cells() / 2 + 1);
  for (std::size_t i = 0; i < seg.nodes(); i += 2) f.push_back(seg.f()[i]);
  return WeightedSegment(seg.length(), std::move(f), seg.kappa());
}

struct VerifyOptions {
  RayleighOptions rayleigh{};
  ShootOptions shoot{};
  bool refine = true;  ///< include the Richardson term (one extra solve at N/2)
};

inline MeshTolerance mesh_tolerance(const WeightedSegment& seg, const PExponent& p, const DiscreteEigenResult& res,
                                    const VerifyOptions& opt = {}) {
  MeshTolerance m;
  m.n_cells = seg.cells();
  m.calibrated = default_calibration()(seg.cells());
  if (opt.refine && !seg.periodic() && seg.cells() % 2 == 0 && seg.cells() >= 64) {
    const double coarse = discrete_first_eigenvalue(coarsen(seg), p, opt.rayleigh).lambda_h;
    m.refinement = 2.0 * std::abs(res.lambda_h - coarse) / (3.0 * res.lambda_h);
  }
  return m;
}

// ---------------------------------------------------------------- lower bound

struct LowerBoundReport {
  double p = 0.0;
  double kappa = 0.0;
  double diameter = 0.0;
  std::size_t n_cells = 0;
  double lambda_h = 0.0;
  double mu = 0.0;
  double margin = 0.0;           ///< lambda_h - mu
  double relative_margin = 0.0;  ///< (lambda_h - mu) / mu
  MeshTolerance eps_h;
  Regime regime = Regime::SharpProved;
  bool violation = false;  ///< lambda_h < mu (1 - eps_h); only meaningful when proved

  [[nodiscard]] bool passed() const noexcept { return !violation; }
};

inline LowerBoundReport check_lower_bound(const WeightedSegment& seg, const PExponent& p,
                                          const DiscreteEigenResult& res, const VerifyOptions& opt = {}) {
  LowerBoundReport r;
  r.p = p.value();
  r.kappa = seg.kappa();
  r.diameter = seg.diameter();
  r.n_cells = seg.cells();
  r.lambda_h = res.lambda_h;
  r.mu = sharp_bound(EigenQuery(p, seg.kappa(), seg.diameter()), opt.shoot).value;
  r.margin = r.lambda_h - r.mu;
  r.relative_margin = r.margin / r.mu;
  r.eps_h = mesh_tolerance(seg, p, res, opt);
  r.regime = sharp_bound_proved(p, seg.kappa()) ? Regime::SharpProved : Regime::SharpConjectured;
  r.violation = r.lambda_h < r.mu * (1.0 - r.eps_h.value());
  return r;
}

// ---------------------------------------------------------------- Lichnerowicz

struct LichnerowiczReport {
  double p = 0.0;
  double kappa = 0.0;
  std::size_t n_cells = 0;
  double lambda_h = 0.0;
  double bound = 0.0;
  double wang_li = 0.0;
  MeshTolerance eps_h;
  bool violation = false;

  [[nodiscard]] bool passed() const noexcept { return !violation; }
};

inline LichnerowiczReport check_lichnerowicz(const WeightedSegment& seg, const PExponent& p,
                                             const DiscreteEigenResult& res, const VerifyOptions& opt = {}) {
  if (!lichnerowicz_applies(p, seg.kappa()))
    throw DomainError("check_lichnerowicz: requires p >= 2 and a segment certified with kappa > 0");
  LichnerowiczReport r;
  r.p = p.value();
  r.kappa = seg.kappa();
  r.n_cells = seg.cells();
  r.lambda_h = res.lambda_h;
  r.bound = lichnerowicz_bound(p, seg.kappa());
  r.wang_li = wang_li_bound(p, seg.kappa());
  r.eps_h = mesh_tolerance(seg, p, res, opt);
  r.violation = r.lambda_h < r.bound * (1.0 - r.eps_h.value());
  return r;
}

// ---------------------------------------------------------------- gradient comparison

/**
 * Model solution on [a, b(a)] at (p, kappa, lambda) whose height m(a) equals
 * u_max, so that the range [-1, u_max] of a normalised eigenfunction is
 * exactly [phi(a), phi(b)].  m(-abar) = 1 and m decreases towards 0, so a is
 * found by bisection on [-abar, a_hi].  Requires kappa <= 0.
 */
inline ModelSolution select_model_profile(const ModelParams& mp, double u_max, const IvpOptions& ivp = {}) {
  if (!(u_max > 0.0) || u_max > 1.0 + 1e-12)
    throw RangeContainment("select_model_profile: u_max = " + detail::fmt_sci(u_max) + " is outside (0, 1]");
  const double abar = find_abar(mp, ivp.tol);
  auto top = solve_model_ivp(mp, -abar, ivp);
  if (!top.geometry.reached()) throw RangeContainment("select_model_profile: odd model solution not reached");
  if (u_max >= top.geometry.m) return top;

  double lo = -abar, hi = -abar + 0.25 * abar;
  for (int k = 0;; ++k) {
    if (k > 60) throw RangeContainment("select_model_profile: no start a with m(a) below u_max");
    if (solve_model_ivp(mp, hi, ivp).geometry.height() < u_max) break;
    lo = hi;
    hi = -abar + 2.0 * (hi + abar);
  }
  // m(lo) >= u_max > m(hi); unreached starts count as below
  for (int k = 0; k < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++k) {
    const double mid = 0.5 * (lo + hi);
    const auto g = solve_model_ivp(mp, mid, ivp).geometry;
    if (g.reached() && g.m >= u_max)
      lo = mid;
    else
      hi = mid;
  }
  auto sol = solve_model_ivp(mp, lo, ivp);
  if (!sol.geometry.reached()) throw RangeContainment("select_model_profile: selected start is unreached");
  return sol;
}

struct GradientReport {
  double max_violation = 0.0;  ///< max_i |u'_i| - phi'(Psi(u_i)); may be negative
  std::size_t worst_node = 0;
  double tolerance_h = 0.0;    ///< h max_i |u'_i|
  std::size_t violations = 0;  ///< nodes beyond tolerance_h
  double max_slope = 0.0;
  double model_a = 0.0;
  double model_b = 0.0;
  double model_m = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;

  [[nodiscard]] bool passed() const noexcept { return violations == 0; }
};

/**
 * |u'| <= phi'(Psi(u)) at every interior node, with u' the central difference.
 * tolerance_h = h max |u'| is the first-order consistency allowance of a
 * difference quotient.  `model` must cover the range of u; see
 * select_model_profile.
 */
inline GradientReport check_gradient_comparison(const WeightedSegment& seg, const DiscreteEigenResult& res,
                                                const ModelSolution& model) {
  const auto& u = res.u;
  if (u.size() != seg.nodes()) throw DomainError("check_gradient_comparison: eigenfunction does not match segment");
  GradientReport r;
  r.u_min = *std::min_element(u.begin(), u.end());
  r.u_max = *std::max_element(u.begin(), u.end());
  if (!(r.u_max > r.u_min)) throw DomainError("check_gradient_comparison: u is constant, not a first nonzero mode");

  const auto inv = InverseProfile::from_solution(model);
  const double slack = 1e-9;
  if (r.u_min < inv.w_lo() - slack || r.u_max > inv.w_hi() + slack)
    throw RangeContainment("check_gradient_comparison: range [" + detail::fmt_sci(r.u_min) + ", " +
                           detail::fmt_sci(r.u_max) + "] not inside [phi(a), phi(b)] = [" +
                           detail::fmt_sci(inv.w_lo()) + ", " + detail::fmt_sci(inv.w_hi()) +
                           "]; reselect a with geometry_scan");
  r.model_a = model.geometry.a;
  r.model_b = *model.geometry.b;
  r.model_m = model.geometry.m;

  const std::size_t n = u.size();
  const double h = seg.h();
  auto at = [&](std::size_t i) { return u[(i + n) % n]; };
  const std::size_t first = seg.periodic() ? 0 : 1;
  const std::size_t last = seg.periodic() ? n : n - 1;

  std::vector<double> slope(n, 0.0);
  for (std::size_t i = first; i < last; ++i) {
    slope[i] = std::abs(at(i + 1) - at(i + n - 1)) / (2.0 * h);
    r.max_slope = std::max(r.max_slope, slope[i]);
  }
  r.tolerance_h = h * r.max_slope;

  r.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = first; i < last; ++i) {
    const double x = std::clamp(u[i], inv.w_lo(), inv.w_hi());
    const double v = slope[i] - inv.slope_at_value(x);
    if (v > r.max_violation) {
      r.max_violation = v;
      r.worst_node = i;
    }
    if (v > r.tolerance_h) ++r.violations;
  }
  return r;
}

/// Selects the model on [a, b(a)] for the segment's kappa at lambda_h and runs the comparison.
inline GradientReport check_gradient_comparison(const WeightedSegment& seg, const PExponent& p,
                                                const DiscreteEigenResult& res) {
  if (seg.kappa() > 0.0) throw DomainError("check_gradient_comparison: model selection requires kappa <= 0");
  const double u_max = *std::max_element(res.u.begin(), res.u.end());
  const ModelParams mp(p, seg.kappa(), res.lambda_h);
  return check_gradient_comparison(seg, res, select_model_profile(mp, u_max));
}

// ---------------------------------------------------------------- perturbations

struct PerturbationSpec {
  double ramp_max = 2.0;  ///< c ~ U[0, ramp_max] for c (t - t0)_+^2
  double tilt_max = 1.0;  ///< b ~ U[-tilt_max, tilt_max] for b t
  bool none = false;      ///< model segment, no perturbation
};

/// Deterministic random convex bump on [-D/2, D/2] for a given seed; seed 0 is the model segment.
inline BumpSpec random_convex_bump(std::uint64_t seed, double diameter, const PerturbationSpec& spec = {}) {
  BumpSpec b;
  if (spec.none || seed == 0) return b;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double c = spec.ramp_max * unit(rng);
  const double t0 = diameter * (unit(rng) - 0.5);
  const double tilt = spec.tilt_max * (2.0 * unit(rng) - 1.0);
  if (c > 0.0) b.terms.push_back({Bump::Kind::RampSquared, c, t0});
  if (tilt != 0.0) b.terms.push_back({Bump::Kind::Linear, tilt, 0.0});
  return b;
}

}  // namespace pgap
