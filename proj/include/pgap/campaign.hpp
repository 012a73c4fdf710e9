#pragma once
/**
 * @file campaign.hpp
 * @brief Batches of discrete checks: random convex perturbations of the model
 *        segment over exponents, grids and seeds, and the refinement study of
 *        the unperturbed model segment.
 */

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pgap/verify.hpp"

namespace pgap {

struct CampaignSpec {
  std::vector<double> p{2.0};
  double kappa = -1.0;
  double diameter = 1.0;
  std::vector<std::size_t> n_list{2048};
  std::vector<std::uint64_t> seeds{1};
  PerturbationSpec perturbation{};
  bool gradient = true;  ///< also run the gradient comparison (kappa <= 0 only)
};

/// One (p, seed, N) run.
struct CampaignRecord {
  double p = 0.0;
  double kappa = 0.0;
  double diameter = 0.0;
  std::size_t n_cells = 0;
  std::uint64_t seed = 0;
  double lambda_h = 0.0;
  double mu = 0.0;
  double relative_margin = 0.0;
  double eps_calibrated = 0.0;
  double eps_refinement = 0.0;
  double eps_h = 0.0;
  std::string regime;
  bool bound_violation = false;
  std::optional<double> grad_max_violation;
  std::optional<double> grad_tolerance;
  std::optional<std::size_t> grad_violations;
  double residual = 0.0;
  int iterations = 0;
  std::string error;  ///< nonempty when the run failed numerically

  [[nodiscard]] bool ok() const noexcept {
    return error.empty() && !bound_violation && grad_violations.value_or(0) == 0;
  }
};

inline CampaignRecord run_campaign_case(const CampaignSpec& spec, double p_value, std::uint64_t seed,
                                        std::size_t n_cells, const VerifyOptions& opt = {}) {
  CampaignRecord rec;
  rec.p = p_value;
  rec.kappa = spec.kappa;
  rec.diameter = spec.diameter;
  rec.n_cells = n_cells;
  rec.seed = seed;
  try {
    const PExponent p(p_value);
    const auto seg = make_segment(spec.kappa, spec.diameter, random_convex_bump(seed, spec.diameter, spec.perturbation),
                                  n_cells);
    const auto res = discrete_first_eigenvalue(seg, p, opt.rayleigh);
    rec.lambda_h = res.lambda_h;
    rec.residual = res.residual;
    rec.iterations = res.iterations;

    const auto lb = check_lower_bound(seg, p, res, opt);
    rec.mu = lb.mu;
    rec.relative_margin = lb.relative_margin;
    rec.eps_calibrated = lb.eps_h.calibrated;
    rec.eps_refinement = lb.eps_h.refinement;
    rec.eps_h = lb.eps_h.value();
    rec.regime = std::string(to_string(lb.regime));
    rec.bound_violation = lb.violation && lb.regime == Regime::SharpProved;

    if (spec.gradient && spec.kappa <= 0.0) {
      const auto g = check_gradient_comparison(seg, p, res);
      rec.grad_max_violation = g.max_violation;
      rec.grad_tolerance = g.tolerance_h;
      rec.grad_violations = g.violations;
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

/// All (p, seed, N) cases, sorted by (p, seed, N).
inline std::vector<CampaignRecord> run_campaign(const CampaignSpec& spec, const VerifyOptions& opt = {}) {
  std::vector<CampaignRecord> out;
  for (double p : spec.p)
    for (auto seed : spec.seeds)
      for (auto n : spec.n_list) out.push_back(run_campaign_case(spec, p, seed, n, opt));
  std::sort(out.begin(), out.end(), [](const CampaignRecord& a, const CampaignRecord& b) {
    return std::tie(a.p, a.seed, a.n_cells) < std::tie(b.p, b.seed, b.n_cells);
  });
  return out;
}

struct SharpnessRow {
  std::size_t n_cells = 0;
  double lambda_h = 0.0;
  double relative_margin = 0.0;  ///< (lambda_h - mu) / mu
};

struct SharpnessReport {
  double p = 0.0;
  double kappa = 0.0;
  double diameter = 0.0;
  double mu = 0.0;
  std::vector<SharpnessRow> rows;  ///< increasing N

  /// |margin| strictly decreasing along the refinement.
  [[nodiscard]] bool margin_decreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (!(std::abs(rows[i].relative_margin) < std::abs(rows[i - 1].relative_margin))) return false;
    return true;
  }
  [[nodiscard]] double final_relative_margin() const { return rows.empty() ? std::nan("") : rows.back().relative_margin; }
};

/// Model segment f = kappa t^2/2 on [-D/2, D/2] at each N.
inline SharpnessReport sharpness_study(const PExponent& p, double kappa, double diameter,
                                       std::vector<std::size_t> n_list, const VerifyOptions& opt = {}) {
  std::sort(n_list.begin(), n_list.end());
  SharpnessReport r;
  r.p = p.value();
  r.kappa = kappa;
  r.diameter = diameter;
  r.mu = sharp_bound(EigenQuery(p, kappa, diameter), opt.shoot).value;
  for (auto n : n_list) {
    const auto res = discrete_first_eigenvalue(make_segment(kappa, diameter, {}, n), p, opt.rayleigh);
    r.rows.push_back({n, res.lambda_h, (res.lambda_h - r.mu) / r.mu});
  }
  return r;
}

}  // namespace pgap
