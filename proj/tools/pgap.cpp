// pgap: model eigenvalues, bounds and discrete verification from the command line.
//
// Exit codes: 0 ok, 1 usage, 2 verdict failure, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgap/io.hpp"

namespace {

using pgap::io::ojson;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kVerdict = 2;
constexpr int kNumerical = 3;

struct Common {
  double p = 2.0;
  double kappa = 0.0;
  double diameter = 1.0;
  std::size_t grid = 2048;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Records go to --out, else to $PGAP_OUT_DIR/<name>.<ext>, else to stdout.
// The human summary goes to stdout when the records do not.
int emit(const Common& c, const std::string& name, const std::string& records, const std::string& summary) {
  std::string path = c.out;
  if (path.empty()) {
    if (const char* dir = std::getenv("PGAP_OUT_DIR"); dir && *dir)
      path = (std::filesystem::path(dir) / (name + "." + c.format)).string();
  }
  if (path.empty()) {
    std::cout << records;
    return kOk;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << records;
  std::cout << summary;
  return kOk;
}

std::string fmt(double x, int prec = 10) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

std::string json_line(const ojson& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- subcommands

pgap::VerifyOptions verify_options(const Common& c) {
  pgap::VerifyOptions o;
  o.shoot.tol = c.tol;
  return o;
}

int run_mu(const Common& c, const std::string& trajectory) {
  const pgap::EigenQuery q(c.p, c.kappa, c.diameter);
  pgap::ShootOptions opt;
  opt.tol = c.tol;
  const auto r = pgap::mu_shoot(q, opt);
  if (!trajectory.empty()) {
    std::ofstream f(trajectory);
    if (!f) throw UsageError("cannot write " + trajectory);
    pgap::io::write_trajectory_csv(f, pgap::model_eigenfunction(q, r));
  }
  std::string rec;
  if (c.format == "csv") {
    rec = "p,kappa,D,mu,lo,hi,iterations,method\n" + pgap::io::csv_number(c.p) + "," + pgap::io::csv_number(c.kappa) +
          "," + pgap::io::csv_number(c.diameter) + "," + pgap::io::csv_number(r.mu) + "," +
          pgap::io::csv_number(r.lo) + "," + pgap::io::csv_number(r.hi) + "," + std::to_string(r.iterations) +
          ",prufer-shooting\n";
  } else {
    rec = json_line(pgap::io::to_json(q, r));
  }
  return emit(c, "mu", rec, "mu_p(kappa, D) = " + fmt(r.mu, 12) + "\n");
}

std::string bounds_csv_header() { return "p,kappa,D,sharp_mu,sharp_status,lichnerowicz,wang_li,best,regime\n"; }

std::string bounds_csv_row(const pgap::BoundReport& r) {
  auto o = [](const std::optional<double>& v) { return v ? pgap::io::csv_number(*v) : std::string(); };
  return pgap::io::csv_number(r.p) + "," + pgap::io::csv_number(r.kappa) + "," + o(r.diameter) + "," + o(r.sharp_mu) +
         "," + (r.sharp_mu ? (r.sharp_proved ? "proved" : "conjectured") : "n.a.") + "," + o(r.lichnerowicz) + "," +
         o(r.wang_li) + "," + o(r.best) + "," + std::string(pgap::to_string(r.regime)) + "\n";
}

int run_bounds(const Common& c, bool have_diameter) {
  pgap::ShootOptions opt;
  opt.tol = c.tol;
  const auto r = pgap::bound_report(pgap::PExponent(c.p), c.kappa,
                                    have_diameter ? std::optional<double>(c.diameter) : std::nullopt, opt);
  const std::string rec =
      c.format == "csv" ? bounds_csv_header() + bounds_csv_row(r) : json_line(pgap::io::to_json(r));
  std::string summary = "regime " + std::string(pgap::to_string(r.regime));
  if (r.best) summary += ", best proved bound " + fmt(*r.best, 12);
  return emit(c, "bounds", rec, summary + "\n");
}

int run_table(const Common& c, const std::vector<double>& ps, const std::vector<double>& kappas,
              const std::vector<double>& diameters) {
  pgap::ShootOptions opt;
  opt.tol = c.tol;
  std::vector<pgap::BoundReport> rows;
  for (double p : ps)
    for (double k : kappas)
      for (double d : diameters) rows.push_back(pgap::bound_report(pgap::PExponent(p), k, d, opt));
  std::string rec;
  if (c.format == "csv") {
    rec = bounds_csv_header();
    for (const auto& r : rows) rec += bounds_csv_row(r);
  } else {
    ojson arr = ojson::array();
    for (const auto& r : rows) arr.push_back(pgap::io::to_json(r));
    rec = json_line(arr);
  }
  return emit(c, "table", rec, std::to_string(rows.size()) + " rows\n");
}

int run_sharpness(const Common& c) {
  if (c.grid < 256) throw UsageError("--grid must be >= 256 for a refinement study");
  std::vector<std::size_t> ns{c.grid / 8, c.grid / 4, c.grid / 2, c.grid};
  const auto r = pgap::sharpness_study(pgap::PExponent(c.p), c.kappa, c.diameter, ns, verify_options(c));
  std::string rec;
  if (c.format == "csv") {
    rec = "N,lambda_h,mu,relative_margin\n";
    for (const auto& row : r.rows)
      rec += std::to_string(row.n_cells) + "," + pgap::io::csv_number(row.lambda_h) + "," +
             pgap::io::csv_number(r.mu) + "," + pgap::io::csv_number(row.relative_margin) + "\n";
  } else {
    rec = json_line(pgap::io::to_json(r));
  }
  const bool ok = std::abs(r.final_relative_margin()) < 1e-2 && r.margin_decreasing();
  const int code = emit(c, "verify-sharpness", rec,
                        "relative margin " + fmt(r.final_relative_margin(), 4) + " at N = " + std::to_string(c.grid) +
                            (r.margin_decreasing() ? ", decreasing" : ", NOT decreasing") + "\n");
  return ok ? code : kVerdict;
}

int run_bound(const Common& c, const std::string& campaign_file, int seeds, bool no_perturbation) {
  pgap::CampaignSpec spec;
  if (!campaign_file.empty()) {
    std::ifstream f(campaign_file);
    if (!f) throw UsageError("cannot read " + campaign_file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("campaign spec: ") + e.what());
    }
    try {
      spec = pgap::io::campaign_spec_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("campaign spec: ") + e.what());
    }
  } else {
    spec.p = {c.p};
    spec.kappa = c.kappa;
    spec.diameter = c.diameter;
    spec.n_list = {c.grid};
    spec.seeds.clear();
    for (int k = 0; k < seeds; ++k) spec.seeds.push_back(c.seed + static_cast<std::uint64_t>(k));
    spec.perturbation.none = no_perturbation;
  }
  for (double p : spec.p)
    if (!pgap::sharp_bound_proved(pgap::PExponent(p), spec.kappa))
      throw UsageError("verify-bound: p > 2 with kappa > 0 is outside the proved regime");

  const auto recs = pgap::run_campaign(spec, verify_options(c));
  std::ostringstream os;
  if (c.format == "csv")
    pgap::io::write_campaign_csv(os, recs);
  else
    pgap::io::write_jsonl(os, recs);

  int violations = 0, errors = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : recs) {
    if (!r.error.empty()) {
      ++errors;
      continue;
    }
    if (!r.ok()) ++violations;
    worst = std::min(worst, r.relative_margin);
  }
  const int code = emit(c, "verify-bound", os.str(),
                        std::to_string(recs.size()) + " runs, " + std::to_string(violations) + " violations, " +
                            std::to_string(errors) + " numerical failures, smallest relative margin " + fmt(worst, 4) +
                            "\n");
  if (errors) return kNumerical;
  return violations ? kVerdict : code;
}

int run_gradient(const Common& c, bool no_perturbation, const std::string& trajectory) {
  if (c.kappa > 0.0) throw UsageError("verify-gradient: model selection needs kappa <= 0");
  pgap::PerturbationSpec ps;
  ps.none = no_perturbation;
  const auto seg = pgap::make_segment(c.kappa, c.diameter, pgap::random_convex_bump(c.seed, c.diameter, ps), c.grid);
  const pgap::PExponent p(c.p);
  const auto res = pgap::discrete_first_eigenvalue(seg, p);
  const double u_max = *std::max_element(res.u.begin(), res.u.end());
  const auto model = pgap::select_model_profile(pgap::ModelParams(p, c.kappa, res.lambda_h), u_max);
  const auto g = pgap::check_gradient_comparison(seg, res, model);
  if (!trajectory.empty()) {
    std::ofstream f(trajectory);
    if (!f) throw UsageError("cannot write " + trajectory);
    pgap::io::write_trajectory_csv(f, model.trajectory);
  }
  std::string rec;
  if (c.format == "csv") {
    rec = "lambda_h,max_violation,tolerance_h,violations,model_a,model_m\n" + pgap::io::csv_number(res.lambda_h) + "," +
          pgap::io::csv_number(g.max_violation) + "," + pgap::io::csv_number(g.tolerance_h) + "," +
          std::to_string(g.violations) + "," + pgap::io::csv_number(g.model_a) + "," +
          pgap::io::csv_number(g.model_m) + "\n";
  } else {
    ojson j = pgap::io::to_json(g);
    j["lambda_h"] = res.lambda_h;
    j["N"] = seg.cells();
    j["seed"] = c.seed;
    rec = json_line(j);
  }
  const int code = emit(c, "verify-gradient", rec,
                        "max violation " + fmt(g.max_violation, 4) + " vs tolerance " + fmt(g.tolerance_h, 4) + "\n");
  return g.passed() ? code : kVerdict;
}

int run_lich(const Common& c) {
  const pgap::PExponent p(c.p);
  if (!pgap::lichnerowicz_applies(p, c.kappa)) throw UsageError("verify-lich: requires p >= 2 and kappa > 0");
  const auto seg = pgap::make_segment(c.kappa, c.diameter, pgap::random_convex_bump(c.seed, c.diameter), c.grid);
  const auto res = pgap::discrete_first_eigenvalue(seg, p);
  const auto r = pgap::check_lichnerowicz(seg, p, res, verify_options(c));
  std::string rec;
  if (c.format == "csv") {
    rec = "p,kappa,N,lambda_h,lichnerowicz,wang_li,eps_h,violation\n" + pgap::io::csv_number(r.p) + "," +
          pgap::io::csv_number(r.kappa) + "," + std::to_string(r.n_cells) + "," + pgap::io::csv_number(r.lambda_h) +
          "," + pgap::io::csv_number(r.bound) + "," + pgap::io::csv_number(r.wang_li) + "," +
          pgap::io::csv_number(r.eps_h.value()) + "," + (r.violation ? "1" : "0") + "\n";
  } else {
    rec = json_line(pgap::io::to_json(r));
  }
  const int code =
      emit(c, "verify-lich", rec, "lambda_h = " + fmt(r.lambda_h, 10) + " >= " + fmt(r.bound, 10) + "\n");
  return r.passed() ? code : kVerdict;
}

int run_ptrig(const Common& c, const std::vector<double>& ts) {
  const pgap::PExponent p(c.p);
  std::string rec;
  if (c.format == "csv") {
    rec = "p,pi_p,t,sin_p,cos_p,arctan_p\n";
    for (double t : ts)
      rec += pgap::io::csv_number(c.p) + "," + pgap::io::csv_number(p.pi_p()) + "," + pgap::io::csv_number(t) + "," +
             pgap::io::csv_number(pgap::sin_p(p, t)) + "," + pgap::io::csv_number(pgap::cos_p(p, t)) + "," +
             pgap::io::csv_number(pgap::arctan_p(p, t)) + "\n";
  } else {
    ojson vals = ojson::array();
    for (double t : ts)
      vals.push_back({{"t", t}, {"sin_p", pgap::sin_p(p, t)}, {"cos_p", pgap::cos_p(p, t)}, {"arctan_p", pgap::arctan_p(p, t)}});
    rec = json_line(ojson{{"p", c.p}, {"pi_p", p.pi_p()}, {"values", vals}});
  }
  return emit(c, "ptrig", rec, "pi_p = " + fmt(p.pi_p(), 15) + "\n");
}

void add_common(CLI::App* sc, Common& c, bool geometry, bool grid) {
  sc->add_option("--p", c.p, "exponent p > 1");
  if (geometry) {
    sc->add_option("--kappa", c.kappa, "curvature lower bound");
    sc->add_option("--diameter", c.diameter, "diameter D > 0");
  }
  if (grid) {
    sc->add_option("--grid", c.grid, "number of cells N")->check(CLI::Range(std::size_t{32}, std::size_t{1} << 22));
    sc->add_option("--seed", c.seed, "perturbation seed (0: model segment)");
  }
  if (geometry) sc->add_option("--tol", c.tol, "relative bracket width for mu")->check(CLI::PositiveNumber);
  sc->add_option("--out", c.out, "output file (default: stdout or $PGAP_OUT_DIR)");
  sc->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp first-eigenvalue bounds for the weighted p-Laplacian"};
  app.require_subcommand(1);
  Common c;

  auto* mu = app.add_subcommand("mu", "model eigenvalue mu_p(kappa, D) by shooting");
  add_common(mu, c, true, false);
  std::string trajectory;
  mu->add_option("--trajectory", trajectory, "write the model eigenfunction as CSV (t,theta,log_r,w,dw)");

  auto* bounds = app.add_subcommand("bounds", "sharp, Lichnerowicz and comparison bounds with regime tag");
  add_common(bounds, c, true, false);

  auto* table = app.add_subcommand("table", "bounds over a Cartesian grid of p, kappa, D");
  std::vector<double> tp{1.5, 2.0, 3.0}, tk{-1.0, 0.0, 1.0}, td{1.0};
  table->add_option("--p", tp, "exponents")->expected(1, -1);
  table->add_option("--kappa", tk, "curvatures")->expected(1, -1);
  table->add_option("--diameter", td, "diameters")->expected(1, -1);
  table->add_option("--tol", c.tol, "relative bracket width for mu")->check(CLI::PositiveNumber);
  table->add_option("--out", c.out, "output file (default: stdout or $PGAP_OUT_DIR)");
  table->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* sharp = app.add_subcommand("verify-sharpness", "discrete eigenvalue of the model segment against mu");
  add_common(sharp, c, true, true);

  auto* vbound = app.add_subcommand("verify-bound", "lambda_h >= mu on random convex perturbations");
  add_common(vbound, c, true, true);
  std::string campaign;
  int seeds = 1;
  bool no_pert = false;
  vbound->add_option("--campaign", campaign, "campaign spec JSON {p, kappa, D, N_list, seeds, perturbation}");
  vbound->add_option("--seeds", seeds, "number of consecutive seeds starting at --seed")->check(CLI::PositiveNumber);
  vbound->add_flag("--no-perturbation", no_pert, "use the model segment");

  auto* vgrad = app.add_subcommand("verify-gradient", "|u'| <= phi'(Psi(u)) on a perturbed segment");
  add_common(vgrad, c, true, true);
  vgrad->add_flag("--no-perturbation", no_pert, "use the model segment");
  vgrad->add_option("--trajectory", trajectory, "write the selected model profile as CSV");

  auto* vlich = app.add_subcommand("verify-lich", "lambda_h >= (kappa/(p-1))^{p/2} on a Gaussian-type segment");
  add_common(vlich, c, true, true);

  auto* ptrig = app.add_subcommand("ptrig", "p-trigonometric values");
  add_common(ptrig, c, false, false);
  std::vector<double> ts{0.5};
  ptrig->add_option("--t", ts, "arguments")->expected(1, -1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }

  try {
    if (*mu) return run_mu(c, trajectory);
    if (*bounds) return run_bounds(c, bounds->count("--diameter") > 0);
    if (*table) return run_table(c, tp, tk, td);
    if (*sharp) return run_sharpness(c);
    if (*vbound) return run_bound(c, campaign, seeds, no_pert);
    if (*vgrad) return run_gradient(c, no_pert, trajectory);
    if (*vlich) return run_lich(c);
    if (*ptrig) return run_ptrig(c, ts);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const pgap::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
