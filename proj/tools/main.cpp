#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bpp/conditions.hpp"
#include "bpp/iterate.hpp"
#include "bpp/scenarios.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes (documented in the README)
constexpr int kExitOk = 0;
constexpr int kExitFalsified = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitMaxIters = 4;
constexpr int kExitStepFailed = 5;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

struct CommonOpts {
  std::string scenario;
  std::string instance_path;
  double delta = 0.5;
  double kappa = 0.5;
  double t_max = 100.0;
  std::string out_dir = ".";
  bpp::SearchConfig cfg;
  bpp::IterationConfig icfg;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_iteration) {
  cmd->add_option("--scenario", o.scenario,
                  "built-in scenario name (see `bpp scenario`)");
  cmd->add_option("--instance", o.instance_path, "instance JSON file");
  cmd->add_option("--delta", o.delta, "scenario offset delta");
  cmd->add_option("--kappa", o.kappa, "scenario scale kappa");
  cmd->add_option("--t-max", o.t_max, "scenario search cap t_max");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--tol-value", o.cfg.tol_value, "equality-with-gap slack");
  cmd->add_option("--tol-param", o.cfg.tol_param, "1-D refinement width");
  cmd->add_option("--tol-membership", o.cfg.tol_membership,
                  "set membership tolerance");
  cmd->add_option("--grid-n", o.cfg.grid_n, "coarse grid size");
  if (with_iteration) {
    cmd->add_option("--tol-step", o.icfg.tol_step, "step-length tolerance");
    cmd->add_option("--tol-residual", o.icfg.tol_residual,
                    "residual tolerance");
    cmd->add_option("--max-iters", o.icfg.max_iters, "iteration cap");
    cmd->add_option("--divergence-radius", o.icfg.divergence_radius,
                    "coordinate escape radius");
  }
}

bpp::InstanceBundle build_instance(const CommonOpts& o) {
  if (!o.instance_path.empty())
    return bpp::load_instance(o.instance_path, o.cfg);
  if (o.scenario == "registration")
    return bpp::registration_model(o.delta, o.kappa);
  if (o.scenario == "kannan-degenerate")
    return bpp::kannan_degenerate_model(o.delta);
  if (o.scenario == "counterexample")
    return bpp::necessity_counterexample(o.t_max);
  if (o.scenario.empty())
    throw CLI::ValidationError("one of --scenario or --instance is required");
  std::string known;
  for (const auto& s : bpp::list_scenarios()) known += " " + s.name;
  throw CLI::ValidationError("unknown scenario '" + o.scenario +
                             "'; known scenarios:" + known);
}

// canonical argument echo used for bitwise replay; --out is excluded
std::vector<std::string> echo_args(const CommonOpts& o, bool with_iteration) {
  std::vector<std::string> a;
  auto push = [&](const std::string& k, const std::string& v) {
    a.push_back(k);
    a.push_back(v);
  };
  if (!o.instance_path.empty()) {
    push("--instance", o.instance_path);
  } else {
    push("--scenario", o.scenario);
    if (o.scenario == "registration") {
      push("--delta", bpp::format_double(o.delta));
      push("--kappa", bpp::format_double(o.kappa));
    } else if (o.scenario == "kannan-degenerate") {
      push("--delta", bpp::format_double(o.delta));
    } else if (o.scenario == "counterexample") {
      push("--t-max", bpp::format_double(o.t_max));
    }
  }
  push("--tol-value", bpp::format_double(o.cfg.tol_value));
  push("--tol-param", bpp::format_double(o.cfg.tol_param));
  push("--tol-membership", bpp::format_double(o.cfg.tol_membership));
  push("--grid-n", std::to_string(o.cfg.grid_n));
  if (with_iteration) {
    push("--tol-step", bpp::format_double(o.icfg.tol_step));
    push("--tol-residual", bpp::format_double(o.icfg.tol_residual));
    push("--max-iters", std::to_string(o.icfg.max_iters));
    push("--divergence-radius", bpp::format_double(o.icfg.divergence_radius));
  }
  return a;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

void write_manifest(const CommonOpts& o, const std::string& command,
                    const std::vector<std::string>& args,
                    const std::string& provenance,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["args"] = args;
  j["provenance"] = provenance;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& f : outputs) outs.push_back(f);
  outs.push_back("manifest.json");
  j["outputs"] = outs;
  write_file(std::filesystem::path(o.out_dir) / "manifest.json",
             j.dump(2) + "\n");
}

bpp::Point parse_x0(const std::string& s) {
  bpp::Point p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) p.coords.push_back(std::stod(tok));
  if (p.coords.empty())
    throw std::invalid_argument("--x0: expected comma-separated coordinates");
  return p;
}

int run_solve(const CommonOpts& o, const std::string& x0_str) {
  const bpp::InstanceBundle inst = build_instance(o);
  const bpp::ProximityStructure prox = bpp::analyze(inst, o.cfg);
  const bpp::Point x0 = parse_x0(x0_str);
  const bpp::IterationTrace trace =
      bpp::run_iteration(x0, inst, prox, o.cfg, o.icfg);
  std::filesystem::create_directories(o.out_dir);
  std::ostringstream csv;
  bpp::write_trace_csv(trace, csv);
  write_file(std::filesystem::path(o.out_dir) / "trace.csv", csv.str());
  const std::string summary = bpp::trace_summary_json(trace);
  write_file(std::filesystem::path(o.out_dir) / "summary.json", summary + "\n");
  auto args = echo_args(o, true);
  args.push_back("--x0");
  args.push_back(x0_str);
  write_manifest(o, "solve", args, inst.provenance,
                 {"trace.csv", "summary.json"});
  std::cout << summary << "\n";
  switch (trace.status) {
    case bpp::IterationStatus::Converged:
      return kExitOk;
    case bpp::IterationStatus::Diverged:
      return kExitDiverged;
    case bpp::IterationStatus::MaxIters:
      return kExitMaxIters;
    case bpp::IterationStatus::StepFailed:
      return kExitStepFailed;
  }
  return kExitData;
}

int run_verify(const CommonOpts& o, const std::string& condition,
               const std::string& sampler, std::size_t n, std::uint64_t seed,
               double beta_const, bool beta_given, double alpha,
               bool alpha_given, std::size_t horizon, double escape_radius) {
  const bpp::InstanceBundle inst = build_instance(o);
  bpp::SamplerOptions opts;
  opts.n = n;
  opts.seed = seed;
  if (sampler == "grid")
    opts.strategy = bpp::SamplerOptions::Strategy::Grid;
  else if (sampler == "random")
    opts.strategy = bpp::SamplerOptions::Strategy::Random;
  else if (sampler == "exhaustive")
    opts.strategy = bpp::SamplerOptions::Strategy::Exhaustive;
  else
    throw CLI::ValidationError("unknown sampler '" + sampler + "'");

  bpp::ConditionReport report;
  if (condition == "subseq-convergence") {
    std::vector<bpp::Point> probe;
    if (inst.A.kind() == bpp::PointSet::Kind::Param1D) {
      const bool unbounded = inst.A.unbounded();
      for (std::size_t i = 1; i <= horizon; ++i) {
        const double t = unbounded
                             ? inst.A.lo() + double(i)
                             : inst.A.lo() + (inst.A.hi() - inst.A.lo()) *
                                                 double(i) / double(horizon);
        probe.push_back(inst.A.at(t));
      }
    } else {
      for (std::size_t i = 0; i < horizon; ++i)
        probe.push_back(inst.A.points()[i % inst.A.points().size()]);
    }
    report = bpp::probe_subsequential_convergence(inst.S, {probe}, horizon,
                                                  o.cfg.tol_value,
                                                  escape_radius);
  } else {
    const bpp::ProximityStructure prox = bpp::analyze(inst, o.cfg);
    auto beta = [&]() -> bpp::GeraghtyFunction {
      if (beta_given) return bpp::beta_constant(beta_const);
      if (inst.beta) return *inst.beta;
      throw CLI::ValidationError(
          "condition needs a beta: pass --beta-const or use an instance "
          "with an attached beta");
    };
    auto need_alpha = [&]() {
      if (!alpha_given)
        throw CLI::ValidationError("condition needs --alpha");
      return alpha;
    };
    if (condition == "s-proximal-geraghty")
      report = bpp::check_s_proximal_geraghty(inst, prox, beta(), o.cfg, opts);
    else if (condition == "s-proximal-kannan-geraghty")
      report = bpp::check_s_proximal_kannan_geraghty(inst, prox, beta(), o.cfg,
                                                     opts);
    else if (condition == "proximal-contraction-first-kind")
      report = bpp::check_proximal_contraction_first_kind(
          inst, prox, need_alpha(), o.cfg, opts);
    else if (condition == "proximal-kannan")
      report = bpp::check_proximal_kannan(inst, prox, need_alpha(), o.cfg, opts);
    else if (condition == "weak-proximal-kannan")
      report = bpp::check_weak_proximal_kannan(inst, prox, need_alpha(), o.cfg,
                                               opts);
    else
      throw CLI::ValidationError("unknown condition '" + condition + "'");
  }
  std::filesystem::create_directories(o.out_dir);
  const std::string text = bpp::report_to_json(report);
  write_file(std::filesystem::path(o.out_dir) / "report.json", text + "\n");
  auto args = echo_args(o, false);
  auto push = [&](const std::string& k, const std::string& v) {
    args.push_back(k);
    args.push_back(v);
  };
  push("--condition", condition);
  push("--sampler", sampler);
  push("--n", std::to_string(n));
  push("--seed", std::to_string(seed));
  if (beta_given) push("--beta-const", bpp::format_double(beta_const));
  if (alpha_given) push("--alpha", bpp::format_double(alpha));
  push("--horizon", std::to_string(horizon));
  push("--escape-radius", bpp::format_double(escape_radius));
  write_manifest(o, "verify", args, inst.provenance, {"report.json"});
  std::cout << text << "\n";
  return (report.verdict == bpp::Verdict::Falsified ||
          report.verdict == bpp::Verdict::FalsifiedAtHorizon)
             ? kExitFalsified
             : kExitOk;
}

int run_oracle(const CommonOpts& o, std::size_t grid_points, double tol_res,
               double t_lo, double t_hi, bool range_given) {
  const bpp::InstanceBundle inst = build_instance(o);
  const bpp::ProximityStructure prox = bpp::analyze(inst, o.cfg);
  std::optional<bpp::ParamInterval> range;
  if (range_given) range = bpp::ParamInterval{t_lo, t_hi};
  const auto hits = bpp::brute_force_best_proximity(inst, prox, o.cfg, tol_res,
                                                    grid_points, range);
  nlohmann::json j;
  j["gap"] = prox.gap;
  j["tol_residual"] = tol_res;
  j["grid_points"] = grid_points;
  j["count"] = hits.size();
  auto& hj = j["hits"] = nlohmann::json::array();
  for (const auto& h : hits) {
    nlohmann::json e;
    e["x"] = h.x.coords;
    e["residual"] = h.residual;
    hj.push_back(e);
  }
  std::filesystem::create_directories(o.out_dir);
  const std::string text = j.dump(2);
  write_file(std::filesystem::path(o.out_dir) / "oracle.json", text + "\n");
  auto args = echo_args(o, false);
  args.push_back("--oracle-grid");
  args.push_back(std::to_string(grid_points));
  args.push_back("--tol-residual");
  args.push_back(bpp::format_double(tol_res));
  if (range_given) {
    args.push_back("--t-lo");
    args.push_back(bpp::format_double(t_lo));
    args.push_back("--t-hi");
    args.push_back(bpp::format_double(t_hi));
  }
  write_manifest(o, "oracle", args, inst.provenance, {"oracle.json"});
  std::cout << text << "\n";
  return kExitOk;
}

int run_scenario_list(bool as_json) {
  const auto list = bpp::list_scenarios();
  if (as_json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : list)
      j.push_back({{"name", s.name}, {"params", s.params},
                   {"description", s.description}});
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& s : list)
      std::cout << s.name << "\n  params: " << s.params << "\n  "
                << s.description << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"best proximity point solver and condition checker"};
  app.require_subcommand(1);

  CommonOpts solve_o, verify_o, oracle_o;
  std::string x0_str = "0,0";
  auto* solve = app.add_subcommand("solve", "run the proximal iteration");
  add_common(solve, solve_o, true);
  solve->add_option("--x0", x0_str, "start point, comma-separated")->required();

  auto* verify = app.add_subcommand("verify", "check a contraction condition");
  add_common(verify, verify_o, false);
  std::string condition, sampler = "grid";
  std::size_t n_samples = 32, horizon = 200;
  std::uint64_t seed = 0;
  double beta_const = 0, alpha = 0, escape_radius = 1e-3;
  verify->add_option("--condition", condition, "condition id")->required();
  verify->add_option("--sampler", sampler, "grid|random|exhaustive");
  verify->add_option("--n", n_samples, "sample count");
  verify->add_option("--seed", seed, "random sampler seed");
  auto* bopt = verify->add_option("--beta-const", beta_const,
                                  "constant Geraghty function");
  auto* aopt = verify->add_option("--alpha", alpha, "contraction constant");
  verify->add_option("--horizon", horizon, "probe horizon");
  verify->add_option("--escape-radius", escape_radius,
                     "cluster radius for the subsequential probe");

  auto* oracle = app.add_subcommand("oracle", "brute-force best proximity set");
  add_common(oracle, oracle_o, false);
  std::size_t oracle_grid = 10001;
  double oracle_tol = 1e-9, t_lo = 0, t_hi = 0;
  oracle->add_option("--oracle-grid", oracle_grid, "grid points over A");
  oracle->add_option("--tol-residual", oracle_tol, "acceptance residual");
  auto* tlo = oracle->add_option("--t-lo", t_lo, "parameter range start");
  auto* thi = oracle->add_option("--t-hi", t_hi, "parameter range end");

  auto* scen = app.add_subcommand("scenario", "list built-in scenarios");
  bool scen_json = false;
  scen->add_flag("--json", scen_json, "machine-readable listing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) return run_solve(solve_o, x0_str);
    if (verify->parsed())
      return run_verify(verify_o, condition, sampler, n_samples, seed,
                        beta_const, bopt->count() > 0, alpha,
                        aopt->count() > 0, horizon, escape_radius);
    if (oracle->parsed())
      return run_oracle(oracle_o, oracle_grid, oracle_tol, t_lo, t_hi,
                        tlo->count() > 0 && thi->count() > 0);
    if (scen->parsed()) return run_scenario_list(scen_json);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
