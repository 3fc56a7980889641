#include "corona/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "corona/config.hpp"
#include "corona/error.hpp"
#include "corona/optimizer.hpp"
#include "corona/plan.hpp"
#include "corona/sim.hpp"
#include "corona/table.hpp"
#include "corona/validate.hpp"

namespace corona {

namespace {

struct Options {
  std::string config_path;
  std::string variant;
  std::string out_path;
  std::string format;
  std::size_t k = 0;
  std::string plan_path;
  std::size_t rounds = 200;
  std::uint64_t seed = 1;
  double lifetime_scale = 1.0;
  std::string mode = "fixed";
  double bound = 0.03;
};

int exit_code_for(ErrorKind kind, bool reading_plan) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::IndexOutOfRange:
      return kExitConfigError;
    case ErrorKind::ParseError:
    case ErrorKind::SchemaMismatch:
      return reading_plan ? kExitBadPlanFile : kExitConfigError;
    case ErrorKind::ModelInfeasible:
    case ErrorKind::Infeasible:
    case ErrorKind::InfeasibleProvision:
    case ErrorKind::GridTooLarge:
      return kExitInfeasible;
    case ErrorKind::NonConvergence:
      return kExitNonConvergence;
    case ErrorKind::IoError:
      return kExitIoError;
  }
  return kExitConfigError;
}

RunConfig resolve_config(const Options& opts) {
  RunConfig cfg = opts.config_path.empty() ? RunConfig{} : load_run_config(opts.config_path);
  if (!opts.variant.empty()) cfg.variant = parse_variant(opts.variant);
  if (!opts.out_path.empty()) cfg.out_path = opts.out_path;
  if (!opts.format.empty()) cfg.format = parse_table_format(opts.format);
  cfg.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::IoError, fmt::format("cannot open {} for writing", path));
  file << text;
  if (!file) throw Error(ErrorKind::IoError, fmt::format("failed writing {}", path));
}

int cmd_sweep(const Options& opts, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(opts);
  const SweepResult result = sweep(cfg.spec, cfg.cost, cfg.variant, cfg.solver);
  const std::string table = render_sweep_table(result, cfg.format);
  if (cfg.out_path.empty()) {
    out << table;
  } else {
    write_text(cfg.out_path, table);
  }
  int status = kExitOk;
  for (const Solution& s : result.per_k) {
    if (!s.converged) {
      err << fmt::format("error: NonConvergence: k={} stopped after {} evaluations without converging\n", s.k,
                         s.evaluations);
      status = kExitNonConvergence;
    }
  }
  return status;
}

std::string format_widths(const CoronaLayout& layout) {
  std::vector<std::string> parts;
  for (double w : layout.widths()) parts.push_back(fmt::format("{:.1f}", w));
  return fmt::format("{}", fmt::join(parts, ", "));
}

int cmd_plan(const Options& opts, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(opts);
  std::optional<Solution> chosen;
  if (opts.k > 0) {
    chosen = optimize_widths(cfg.spec, cfg.cost, opts.k, cfg.variant, cfg.solver);
  } else {
    chosen = sweep(cfg.spec, cfg.cost, cfg.variant, cfg.solver).best_solution();
  }
  if (!chosen->converged) {
    err << fmt::format("error: NonConvergence: k={} did not converge\n", chosen->k);
    return kExitNonConvergence;
  }
  const DeploymentPlan plan = build_plan(cfg.spec, cfg.cost, *chosen);
  const std::string path = cfg.out_path.empty() ? "plan.json" : cfg.out_path;
  write_plan(plan, path);
  out << fmt::format("k: {}\nvariant: {}\nwidths_m: {}\ncpua: {:.7f}\ntotal_energy_J_per_min: {:.8f}\nplan: {}\n",
                     chosen->k, to_string(cfg.variant), format_widths(chosen->widths), chosen->cpua_value,
                     chosen->total_energy, path);
  return kExitOk;
}

int cmd_simulate(const Options& opts, std::ostream& out) {
  DistanceMode mode = DistanceMode::FixedPower;
  if (opts.mode == "geometric") {
    mode = DistanceMode::Geometric;
  } else if (opts.mode != "fixed") {
    throw Error(ErrorKind::InvalidArgument, fmt::format("unknown distance mode '{}' (expected fixed|geometric)", opts.mode));
  }
  const SimConfig sim{opts.rounds, opts.seed, opts.lifetime_scale, mode};
  sim.validate();

  const DeploymentPlan plan = read_plan(opts.plan_path);
  World world = place_nodes(plan, opts.seed);
  const SimulationReport report = run(std::move(world), plan, sim);
  const DeviationSummary deviation = compare_to_model(report, plan.spec, plan, opts.bound);

  const std::string trace_path = opts.out_path.empty() ? "trace.csv" : opts.out_path;
  {
    std::ofstream trace(trace_path, std::ios::binary);
    if (!trace) throw Error(ErrorKind::IoError, fmt::format("cannot open {} for writing", trace_path));
    write_trace_csv(report, trace);
    if (!trace) throw Error(ErrorKind::IoError, fmt::format("failed writing {}", trace_path));
  }
  const std::string summary = summary_text(report, deviation);
  write_text(trace_path + ".summary.txt", summary);
  out << summary;
  return kExitOk;
}

int cmd_validate(const Options& opts, std::ostream& out) {
  const RunConfig cfg = resolve_config(opts);
  const std::vector<PropertyResult> results = run_property_suites(cfg);
  std::size_t passed = 0;
  std::size_t failed = 0;
  for (const PropertyResult& r : results) {
    const char* tag = r.status == CheckStatus::Pass ? "PASS" : r.status == CheckStatus::Fail ? "FAIL" : "SKIP";
    out << fmt::format("{} {} {}\n", tag, r.name, r.detail);
    passed += r.status == CheckStatus::Pass ? 1 : 0;
    failed += r.status == CheckStatus::Fail ? 1 : 0;
  }
  out << fmt::format("validate: {} passed, {} failed\n", passed, failed);
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Corona-based sensor deployment planner"};
  app.name("corona");
  app.require_subcommand(1);
  Options opts;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "Run configuration (JSON); defaults to the bundled reference parameters");
    cmd->add_option("--variant", opts.variant, "baseline|improved")->check(CLI::IsMember({"baseline", "improved"}));
  };

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Optimize widths for every feasible corona count");
  add_config(sweep_cmd);
  sweep_cmd->add_option("--out", opts.out_path, "Write the table here instead of stdout");
  sweep_cmd->add_option("--format", opts.format, "md|csv")->check(CLI::IsMember({"md", "csv"}));

  CLI::App* plan_cmd = app.add_subcommand("plan", "Solve and write a deployment plan");
  add_config(plan_cmd);
  plan_cmd->add_option("--k", opts.k, "Corona count (default: best over the sweep)")->check(CLI::PositiveNumber);
  plan_cmd->add_option("--out", opts.out_path, "Plan file path (default plan.json)");

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run the round-based simulator on a plan file");
  sim_cmd->add_option("plan", opts.plan_path, "Deployment plan file")->required();
  sim_cmd->add_option("--rounds", opts.rounds, "Rounds to simulate (one round per minute)");
  sim_cmd->add_option("--seed", opts.seed, "Random seed");
  sim_cmd->add_option("--lifetime-scale", opts.lifetime_scale, "Scale for initial energy, in (0, 1]");
  sim_cmd->add_option("--mode", opts.mode, "fixed|geometric")->check(CLI::IsMember({"fixed", "geometric"}));
  sim_cmd->add_option("--bound", opts.bound, "Deviation bound reported as PASS/FAIL");
  sim_cmd->add_option("--out", opts.out_path, "Trace CSV path (default trace.csv)");

  CLI::App* validate_cmd = app.add_subcommand("validate", "Run the model and solver self-checks");
  add_config(validate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  const bool reading_plan = sim_cmd->parsed();
  try {
    if (sweep_cmd->parsed()) return cmd_sweep(opts, out, err);
    if (plan_cmd->parsed()) return cmd_plan(opts, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(opts, out);
    return cmd_validate(opts, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind(), reading_plan);
  }
}

}  // namespace corona
