#pragma once
/**
 * @file bounds.hpp
 * @brief Lower bounds for the first nonzero eigenvalue lambda_{p,f} of the
 *        weighted p-Laplacian under Ric + Hess f >= kappa g, with the regime
 *        in which each bound is proved.
 *
 *   sharp         mu_p(kappa, D)            proved for 1 < p <= 2 or kappa <= 0
 *   Lichnerowicz  (kappa/(p-1))^{p/2}       p >= 2, kappa > 0
 *   comparison    kappa^{p/2}/(p-1)^{p-1}   kappa > 0 (reported, never used as best)
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "pgap/eigensolve.hpp"

namespace pgap {

enum class Regime { SharpProved, SharpConjectured, LichnerowiczOnly };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::SharpProved: return "sharp-proved";
    case Regime::SharpConjectured: return "sharp-conjectured";
    case Regime::LichnerowiczOnly: return "lichnerowicz-only";
  }
  return "unknown";
}

inline bool sharp_bound_proved(const PExponent& p, double kappa) { return p.value() <= 2.0 || kappa <= 0.0; }
inline bool lichnerowicz_applies(const PExponent& p, double kappa) { return p.value() >= 2.0 && kappa > 0.0; }

/// (kappa/(p-1))^{p/2}; requires p >= 2 and kappa > 0.
inline double lichnerowicz_bound(const PExponent& p, double kappa) {
  if (!lichnerowicz_applies(p, kappa)) throw DomainError("lichnerowicz_bound: requires p >= 2 and kappa > 0");
  return std::pow(kappa / (p.value() - 1.0), 0.5 * p.value());
}

/// kappa^{p/2}/(p-1)^{p-1}; requires kappa > 0.
inline double wang_li_bound(const PExponent& p, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("wang_li_bound: requires kappa > 0");
  return std::pow(kappa, 0.5 * p.value()) / std::pow(p.value() - 1.0, p.value() - 1.0);
}

struct SharpBound {
  double value;
  bool proved;  ///< false in the conjectured regime p > 2, kappa > 0
};

/// Model value mu_p(kappa, D), tagged with whether the lower bound is proved.
inline SharpBound sharp_bound(const EigenQuery& q, const ShootOptions& opt = {}) {
  const double v = q.kappa == 0.0 ? mu_closed_form_kappa0(q.p, q.diameter) : mu_shoot(q, opt).mu;
  return {v, sharp_bound_proved(q.p, q.kappa)};
}

struct BoundReport {
  double p = 0.0;
  double kappa = 0.0;
  std::optional<double> diameter;
  std::optional<double> sharp_mu;      ///< model value when a diameter is given
  bool sharp_proved = false;
  std::optional<double> lichnerowicz;  ///< only when p >= 2, kappa > 0
  std::optional<double> wang_li;       ///< only when kappa > 0
  std::optional<double> best;          ///< max over proved bounds
  Regime regime = Regime::SharpProved;
};

/**
 * All applicable bounds for (p, kappa[, D]).  A conjectured model value is
 * reported but never enters `best`.
 */
inline BoundReport bound_report(const PExponent& p, double kappa, std::optional<double> diameter,
                                const ShootOptions& opt = {}) {
  BoundReport r;
  r.p = p.value();
  r.kappa = kappa;
  r.diameter = diameter;
  r.sharp_proved = sharp_bound_proved(p, kappa);
  if (diameter) r.sharp_mu = sharp_bound(EigenQuery(p, kappa, *diameter), opt).value;
  if (lichnerowicz_applies(p, kappa)) r.lichnerowicz = lichnerowicz_bound(p, kappa);
  if (kappa > 0.0) r.wang_li = wang_li_bound(p, kappa);

  if (r.sharp_proved)
    r.regime = Regime::SharpProved;
  else
    r.regime = r.sharp_mu ? Regime::SharpConjectured : Regime::LichnerowiczOnly;

  auto take = [&](std::optional<double> v) {
    if (v) r.best = r.best ? std::max(*r.best, *v) : *v;
  };
  if (r.sharp_proved) take(r.sharp_mu);
  take(r.lichnerowicz);
  take(r.wang_li);
  return r;
}

}  // namespace pgap
