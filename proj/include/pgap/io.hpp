#pragma once
/**
 * @file io.hpp
 * @brief JSON / CSV records for eigenvalues, bound reports, verification
 *        verdicts, campaigns and trajectories.  Needs nlohmann_json.
 *
 * Doubles are written in shortest round-trip form, so parsing a record gives
 * back the emitted values bit for bit.
 */

#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pgap/campaign.hpp"

namespace pgap::io {

using ojson = nlohmann::ordered_json;

template <class T>
ojson opt_value(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

template <class T, class J>
std::optional<T> opt_get(const J& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).template get<T>();
}

// ---------------------------------------------------------------- eigenvalue

inline ojson to_json(const EigenQuery& q, const EigenResult& r) {
  return ojson{{"p", q.p.value()},
               {"kappa", q.kappa},
               {"D", q.diameter},
               {"mu", r.mu},
               {"bracket", {r.lo, r.hi}},
               {"iterations", r.iterations},
               {"method", "prufer-shooting"}};
}

struct EigenRecord {
  double p = 0.0, kappa = 0.0, diameter = 0.0, mu = 0.0, lo = 0.0, hi = 0.0;
  int iterations = 0;
  std::string method;
};

template <class J>
EigenRecord eigen_record_from_json(const J& j) {
  EigenRecord e;
  e.p = j.at("p").template get<double>();
  e.kappa = j.at("kappa").template get<double>();
  e.diameter = j.at("D").template get<double>();
  e.mu = j.at("mu").template get<double>();
  e.lo = j.at("bracket").at(0).template get<double>();
  e.hi = j.at("bracket").at(1).template get<double>();
  e.iterations = j.at("iterations").template get<int>();
  e.method = j.at("method").template get<std::string>();
  return e;
}

// ---------------------------------------------------------------- bounds

inline ojson to_json(const BoundReport& r) {
  return ojson{{"p", r.p},
               {"kappa", r.kappa},
               {"D", opt_value(r.diameter)},
               {"sharp_mu", opt_value(r.sharp_mu)},
               {"sharp_status", r.sharp_mu ? (r.sharp_proved ? "proved" : "conjectured") : "n.a."},
               {"lichnerowicz", opt_value(r.lichnerowicz)},
               {"wang_li", opt_value(r.wang_li)},
               {"best", opt_value(r.best)},
               {"regime", std::string(to_string(r.regime))}};
}

inline Regime regime_from_string(const std::string& s) {
  if (s == "sharp-proved") return Regime::SharpProved;
  if (s == "sharp-conjectured") return Regime::SharpConjectured;
  if (s == "lichnerowicz-only") return Regime::LichnerowiczOnly;
  throw DomainError("unknown regime '" + s + "'");
}

template <class J>
BoundReport bound_report_from_json(const J& j) {
  BoundReport r;
  r.p = j.at("p").template get<double>();
  r.kappa = j.at("kappa").template get<double>();
  r.diameter = opt_get<double>(j, "D");
  r.sharp_mu = opt_get<double>(j, "sharp_mu");
  r.sharp_proved = j.at("sharp_status").template get<std::string>() == "proved";
  r.lichnerowicz = opt_get<double>(j, "lichnerowicz");
  r.wang_li = opt_get<double>(j, "wang_li");
  r.best = opt_get<double>(j, "best");
  r.regime = regime_from_string(j.at("regime").template get<std::string>());
  return r;
}

// ---------------------------------------------------------------- verdicts

inline ojson to_json(const MeshTolerance& m) {
  return ojson{{"N", m.n_cells}, {"calibrated", m.calibrated}, {"refinement", m.refinement}, {"eps_h", m.value()}};
}

inline ojson to_json(const LowerBoundReport& r) {
  return ojson{{"p", r.p},
               {"kappa", r.kappa},
               {"D", r.diameter},
               {"N", r.n_cells},
               {"lambda_h", r.lambda_h},
               {"mu", r.mu},
               {"margin", r.margin},
               {"relative_margin", r.relative_margin},
               {"eps_h", to_json(r.eps_h)},
               {"regime", std::string(to_string(r.regime))},
               {"violation", r.violation}};
}

inline ojson to_json(const GradientReport& r) {
  return ojson{{"max_violation", r.max_violation},
               {"worst_node", r.worst_node},
               {"tolerance_h", r.tolerance_h},
               {"violations", r.violations},
               {"max_slope", r.max_slope},
               {"model", {{"a", r.model_a}, {"b", r.model_b}, {"m", r.model_m}}},
               {"u_range", {r.u_min, r.u_max}}};
}

inline ojson to_json(const LichnerowiczReport& r) {
  return ojson{{"p", r.p},
               {"kappa", r.kappa},
               {"N", r.n_cells},
               {"lambda_h", r.lambda_h},
               {"lichnerowicz", r.bound},
               {"wang_li", r.wang_li},
               {"eps_h", to_json(r.eps_h)},
               {"violation", r.violation}};
}

inline ojson to_json(const SharpnessReport& r) {
  ojson rows = ojson::array();
  for (const auto& row : r.rows)
    rows.push_back({{"N", row.n_cells}, {"lambda_h", row.lambda_h}, {"relative_margin", row.relative_margin}});
  return ojson{{"p", r.p},
               {"kappa", r.kappa},
               {"D", r.diameter},
               {"mu", r.mu},
               {"refinement", rows},
               {"relative_margin", r.final_relative_margin()},
               {"margin_decreasing", r.margin_decreasing()}};
}

// ---------------------------------------------------------------- campaigns

/// {p, kappa, D, N_list, seeds, perturbation}; p may be a number or a list,
/// perturbation is "none" or {ramp_max, tilt_max}.
template <class J>
CampaignSpec campaign_spec_from_json(const J& j) {
  CampaignSpec s;
  const auto& p = j.at("p");
  s.p.clear();
  if (p.is_array())
    for (const auto& v : p) s.p.push_back(v.template get<double>());
  else
    s.p.push_back(p.template get<double>());
  s.kappa = j.at("kappa").template get<double>();
  s.diameter = j.at("D").template get<double>();
  s.n_list = j.at("N_list").template get<std::vector<std::size_t>>();
  const auto& seeds = j.at("seeds");
  if (seeds.is_number_integer()) {
    // a count: seeds 1..n
    s.seeds.clear();
    for (std::uint64_t k = 1; k <= seeds.template get<std::uint64_t>(); ++k) s.seeds.push_back(k);
  } else {
    s.seeds = seeds.template get<std::vector<std::uint64_t>>();
  }
  if (j.contains("perturbation")) {
    const auto& pj = j.at("perturbation");
    if (pj.is_string()) {
      if (pj.template get<std::string>() != "none") throw DomainError("perturbation must be \"none\" or an object");
      s.perturbation.none = true;
    } else {
      s.perturbation.ramp_max = pj.value("ramp_max", s.perturbation.ramp_max);
      s.perturbation.tilt_max = pj.value("tilt_max", s.perturbation.tilt_max);
    }
  }
  if (j.contains("gradient")) s.gradient = j.at("gradient").template get<bool>();
  if (s.p.empty() || s.n_list.empty() || s.seeds.empty()) throw DomainError("campaign spec: empty p, N_list or seeds");
  if (!(s.diameter > 0.0)) throw DomainError("campaign spec: D must be > 0");
  return s;
}

inline ojson to_json(const CampaignSpec& s) {
  ojson pert = s.perturbation.none ? ojson("none")
                                   : ojson{{"ramp_max", s.perturbation.ramp_max}, {"tilt_max", s.perturbation.tilt_max}};
  return ojson{{"p", s.p},         {"kappa", s.kappa},        {"D", s.diameter},    {"N_list", s.n_list},
               {"seeds", s.seeds}, {"perturbation", pert}, {"gradient", s.gradient}};
}

inline ojson to_json(const CampaignRecord& r) {
  return ojson{{"p", r.p},
               {"kappa", r.kappa},
               {"D", r.diameter},
               {"N", r.n_cells},
               {"seed", r.seed},
               {"lambda_h", r.lambda_h},
               {"mu", r.mu},
               {"relative_margin", r.relative_margin},
               {"eps_calibrated", r.eps_calibrated},
               {"eps_refinement", r.eps_refinement},
               {"eps_h", r.eps_h},
               {"regime", r.regime},
               {"bound_violation", r.bound_violation},
               {"grad_max_violation", opt_value(r.grad_max_violation)},
               {"grad_tolerance", opt_value(r.grad_tolerance)},
               {"grad_violations", opt_value(r.grad_violations)},
               {"residual", r.residual},
               {"iterations", r.iterations},
               {"error", r.error}};
}

template <class J>
CampaignRecord campaign_record_from_json(const J& j) {
  CampaignRecord r;
  r.p = j.at("p").template get<double>();
  r.kappa = j.at("kappa").template get<double>();
  r.diameter = j.at("D").template get<double>();
  r.n_cells = j.at("N").template get<std::size_t>();
  r.seed = j.at("seed").template get<std::uint64_t>();
  r.lambda_h = j.at("lambda_h").template get<double>();
  r.mu = j.at("mu").template get<double>();
  r.relative_margin = j.at("relative_margin").template get<double>();
  r.eps_calibrated = j.at("eps_calibrated").template get<double>();
  r.eps_refinement = j.at("eps_refinement").template get<double>();
  r.eps_h = j.at("eps_h").template get<double>();
  r.regime = j.at("regime").template get<std::string>();
  r.bound_violation = j.at("bound_violation").template get<bool>();
  r.grad_max_violation = opt_get<double>(j, "grad_max_violation");
  r.grad_tolerance = opt_get<double>(j, "grad_tolerance");
  r.grad_violations = opt_get<std::size_t>(j, "grad_violations");
  r.residual = j.at("residual").template get<double>();
  r.iterations = j.at("iterations").template get<int>();
  r.error = j.at("error").template get<std::string>();
  return r;
}

/// One compact JSON object per line.
inline void write_jsonl(std::ostream& os, const std::vector<CampaignRecord>& recs) {
  for (const auto& r : recs) os << to_json(r).dump() << '\n';
}

inline std::string csv_number(double x) {
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return s.str();
}

inline void write_campaign_csv(std::ostream& os, const std::vector<CampaignRecord>& recs) {
  os << "p,kappa,D,N,seed,lambda_h,mu,relative_margin,eps_h,bound_violation,grad_max_violation,grad_tolerance,"
        "grad_violations,error\n";
  for (const auto& r : recs) {
    os << csv_number(r.p) << ',' << csv_number(r.kappa) << ',' << csv_number(r.diameter) << ',' << r.n_cells << ','
       << r.seed << ',' << csv_number(r.lambda_h) << ',' << csv_number(r.mu) << ',' << csv_number(r.relative_margin)
       << ',' << csv_number(r.eps_h) << ',' << (r.bound_violation ? 1 : 0) << ','
       << (r.grad_max_violation ? csv_number(*r.grad_max_violation) : "") << ','
       << (r.grad_tolerance ? csv_number(*r.grad_tolerance) : "") << ','
       << (r.grad_violations ? std::to_string(*r.grad_violations) : "") << ',';
    // errors are free text; quote and double embedded quotes
    std::string e = r.error;
    for (std::size_t k = 0; (k = e.find('"', k)) != std::string::npos; k += 2) e.insert(k, "\"");
    if (!e.empty()) os << '"' << e << '"';
    os << '\n';
  }
}

/// Columns t, theta, log_r, w, dw at the stored samples.
inline void write_trajectory_csv(std::ostream& os, const PruferTrajectory& traj) {
  os << "t,theta,log_r,w,dw\n";
  for (const auto& s : traj.samples()) {
    const auto pr = traj.profile(s);
    os << csv_number(s.t) << ',' << csv_number(s.theta) << ',' << csv_number(s.log_r) << ',' << csv_number(pr.w)
       << ',' << csv_number(pr.dw) << '\n';
  }
}

}  // namespace pgap::io
