#include "acs/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "acs/analysis.hpp"
#include "acs/equilibrium.hpp"
#include "acs/io.hpp"
#include "acs/mechanism.hpp"
#include "acs/optimum.hpp"

namespace acs::cli {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string instance_path;
  std::string scenario;
  std::optional<double> a;
  std::vector<double> r;
  std::optional<double> capacity;
  std::vector<double> x;
  std::size_t n = 2;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  double target_q = 0.99;
  double grid = 1e-3;
  double epsilon = 1e-4;
  std::size_t jobs = 1;
  std::string format;
  std::string out;
};

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = std::make_shared<spdlog::logger>(
        "acs_poa", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("ACS_POA_LOG")) {
      const std::string level(env);
      if (level == "error") l->set_level(spdlog::level::err);
      else if (level == "warn") l->set_level(spdlog::level::warn);
      else if (level == "info") l->set_level(spdlog::level::info);
      else if (level == "debug") l->set_level(spdlog::level::debug);
    }
    return l;
  }();
  return log;
}

Instance load_instance(const RunConfig& cfg) {
  const bool inline_given = !cfg.scenario.empty() || cfg.a || !cfg.r.empty() || cfg.capacity;
  if (!cfg.instance_path.empty()) {
    if (inline_given)
      throw ValidationError("give either --instance or inline --scenario/--a/--r/--capacity, not both");
    std::ifstream in(cfg.instance_path);
    if (!in) throw IoError("cannot read instance file '" + cfg.instance_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return io::parse_instance(buf.str());
  }
  if (cfg.scenario.empty()) throw ValidationError("missing --scenario (or --instance)");
  if (!cfg.a) throw ValidationError("missing --a");
  if (cfg.r.empty()) throw ValidationError("missing --r");
  return Instance(scenario_from_string(cfg.scenario), *cfg.a, cfg.r, cfg.capacity.value_or(1.0));
}

void require_format(const RunConfig& cfg, std::initializer_list<std::string_view> allowed) {
  if (cfg.format.empty()) return;
  if (std::find(allowed.begin(), allowed.end(), cfg.format) == allowed.end())
    throw ValidationError("--format " + cfg.format + " is not supported by this command");
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open output file '" + cfg.out + "'");
  file << text;
  if (!file.flush()) throw IoError("failed writing output file '" + cfg.out + "'");
}

void emit_json(const RunConfig& cfg, std::ostream& out, const io::json& doc) {
  emit(cfg, out, doc.dump(2) + "\n");
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {"json"});
  const Instance instance = load_instance(cfg);
  const EquilibriumResult result = solve_equilibrium(instance);
  logger()->info("solved n={} q={} residual={}", instance.n(), result.q, result.foc_residual);
  if (!result.capacity_feasible)
    logger()->warn("equilibrium total rate {} exceeds capacity {}", result.q, instance.capacity());
  emit_json(cfg, out, io::equilibrium_json(instance, result));
  return kOk;
}

int cmd_optimum(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {"json"});
  const Instance instance = load_instance(cfg);
  emit_json(cfg, out, io::optimum_json(instance, solve_optimum(instance)));
  return kOk;
}

int cmd_poa(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {"json"});
  const Instance instance = load_instance(cfg);
  const PoaReport report = poa(instance);
  if (!report.capacity_feasible)
    logger()->warn("equilibrium is capacity-infeasible; POA reported for audit only");
  emit_json(cfg, out, io::poa_json(report));
  return kOk;
}

Scenario sampled_scenario(const RunConfig& cfg) {
  if (cfg.scenario.empty()) throw ValidationError("missing --scenario");
  if (!cfg.instance_path.empty() || cfg.a || !cfg.r.empty())
    throw ValidationError("sampling commands draw their own instances; drop --instance/--a/--r");
  if (cfg.samples == 0) throw ValidationError("--samples must be at least 1");
  if (cfg.jobs == 0) throw ValidationError("--jobs must be at least 1");
  return scenario_from_string(cfg.scenario);
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {"csv", "svg"});
  SweepOptions opts;
  opts.scenario = sampled_scenario(cfg);
  opts.n = cfg.n;
  opts.samples = cfg.samples;
  opts.seed = cfg.seed;
  opts.target_q = cfg.target_q;
  opts.capacity = cfg.capacity.value_or(1.0);
  opts.jobs = cfg.jobs;
  const SweepResult result = monte_carlo_sweep(opts);
  if (result.skipped > 0) logger()->warn("{} samples skipped (no equilibrium found)", result.skipped);

  std::ostringstream text;
  if (cfg.format == "svg") {
    const double reference = opts.scenario == Scenario::RoutingOnly
                                 ? kRoutingClaim
                                 : (opts.n == 2 ? kTwoUserCodingClaim : kLargeCodingClaim);
    std::ostringstream title;
    title << "POA of " << opts.samples << " random " << to_string(opts.scenario)
          << " instances (n=" << opts.n << ")";
    io::write_sweep_svg(text, result.records, reference, title.str());
  } else {
    io::write_sweep_csv(text, result.records);
  }
  emit(cfg, out, text.str());
  return kOk;
}

int cmd_audit(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {"json", "csv"});
  AuditOptions opts;
  opts.scenario = sampled_scenario(cfg);
  opts.n = cfg.n;
  opts.samples = cfg.samples;
  opts.seed = cfg.seed;
  opts.capacity = cfg.capacity.value_or(1.0);
  opts.jobs = cfg.jobs;
  const AuditReport report = audit_bounds(opts);

  if (cfg.format == "json") {
    emit_json(cfg, out, io::audit_json(report));
  } else if (cfg.format == "csv") {
    std::ostringstream text;
    io::write_sweep_csv(text, report.records);
    emit(cfg, out, text.str());
  } else {
    emit(cfg, out, report.summary());
  }
  return kOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {"json"});
  if (!(cfg.grid > 0.0) || !(cfg.epsilon > 0.0))
    throw ValidationError("--grid and --epsilon must be positive");
  const Instance instance = load_instance(cfg);

  io::json doc = io::instance_json(instance);
  Allocation x;
  if (cfg.x.empty()) {
    x = solve_equilibrium(instance).x_star;
    doc["allocation_source"] = "closed_form";
  } else {
    x = Allocation(instance.from_caller_order(cfg.x));
    doc["allocation_source"] = "given";
  }
  doc["allocation"] = instance.to_caller_order(x.values());

  const EpsilonNashReport nash = verify_epsilon_nash(instance, x, cfg.grid, cfg.epsilon);
  doc["epsilon_nash"] = {{"passed", nash.passed},
                         {"grid", cfg.grid},
                         {"epsilon", cfg.epsilon},
                         {"worst", {{"user", instance.order()[nash.worst.user]},
                                    {"rate", nash.worst.rate},
                                    {"gain", nash.worst.gain}}}};

  bool converged = false;
  double distance = std::numeric_limits<double>::infinity();
  try {
    const EquilibriumResult br = best_response_iterate(instance, Allocation::zeros(instance.n()));
    converged = true;
    distance = 0.0;
    for (std::size_t i = 0; i < instance.n(); ++i)
      distance = std::max(distance, std::abs(br.x_star[i] - x[i]));
    doc["best_response"] = {{"converged", true},
                            {"x", instance.to_caller_order(br.x_star.values())},
                            {"iterations", br.iterations},
                            {"sup_distance", distance}};
  } catch (const NonConvergenceError& e) {
    doc["best_response"] = {{"converged", false},
                            {"x", instance.to_caller_order(e.last_iterate().values())},
                            {"iterations", e.iterations()},
                            {"last_step", e.last_step()}};
  }

  const OptimumResult exact = solve_optimum(instance);
  const OptimumResult grid = grid_optimum(instance, cfg.grid);
  const double gap = std::abs(exact.value - grid.value);
  doc["optimum"] = {{"exact", exact.value}, {"grid", grid.value}, {"difference", gap}};

  const bool pass = nash.passed && converged && distance <= 1e-6 && gap <= 5.0 * cfg.grid;
  doc["pass"] = pass;
  emit_json(cfg, out, doc);
  return kOk;
}

void add_instance_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--instance", cfg.instance_path, "Instance JSON file");
  cmd.add_option("--scenario", cfg.scenario, "routing_only or coding_pair");
  cmd.add_option("--a", cfg.a, "Price slope");
  cmd.add_option("--r", cfg.r, "Utility slopes, comma separated")->delimiter(',');
  cmd.add_option("--capacity", cfg.capacity, "Link capacity (default 1)");
  cmd.add_option("--format", cfg.format, "Output format");
  cmd.add_option("--out", cfg.out, "Write output to this file");
}

void add_sampling_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--scenario", cfg.scenario, "routing_only or coding_pair");
  cmd.add_option("--n", cfg.n, "Users per instance");
  cmd.add_option("--samples", cfg.samples, "Number of sampled instances");
  cmd.add_option("--seed", cfg.seed, "Base seed");
  cmd.add_option("--capacity", cfg.capacity, "Link capacity (default 1)");
  cmd.add_option("--jobs", cfg.jobs, "Worker threads");
  cmd.add_option("--format", cfg.format, "Output format");
  cmd.add_option("--out", cfg.out, "Write output to this file");
  // Accepted so that mixing instance flags is reported as a validation error.
  cmd.add_option("--instance", cfg.instance_path)->group("");
  cmd.add_option("--a", cfg.a)->group("");
  cmd.add_option("--r", cfg.r)->delimiter(',')->group("");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Equilibria, optima and price of anarchy for average-cost-sharing link games",
               "acs_poa"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Nash equilibrium with prices and surpluses");
  add_instance_options(*solve, cfg);
  auto* optimum = app.add_subcommand("optimum", "Surplus-maximizing allocation");
  add_instance_options(*optimum, cfg);
  auto* poa_cmd = app.add_subcommand("poa", "Price of anarchy report");
  add_instance_options(*poa_cmd, cfg);
  auto* oracle = app.add_subcommand("oracle", "Cross-check with best response and grid search");
  add_instance_options(*oracle, cfg);
  oracle->add_option("--grid", cfg.grid, "Grid step");
  oracle->add_option("--epsilon", cfg.epsilon, "Tolerated unilateral gain");
  oracle->add_option("--x", cfg.x, "Allocation to verify (default: closed-form equilibrium)")
      ->delimiter(',');
  auto* sweep = app.add_subcommand("sweep", "Seeded Monte Carlo POA sweep");
  add_sampling_options(*sweep, cfg);
  sweep->add_option("--target-q", cfg.target_q, "Equilibrium total rate to calibrate to");
  auto* audit = app.add_subcommand("audit", "Compare measured POA against published bounds");
  add_sampling_options(*audit, cfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg, out);
    if (optimum->parsed()) return cmd_optimum(cfg, out);
    if (poa_cmd->parsed()) return cmd_poa(cfg, out);
    if (oracle->parsed()) return cmd_oracle(cfg, out);
    if (sweep->parsed()) return cmd_sweep(cfg, out);
    if (audit->parsed()) return cmd_audit(cfg, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  }
  return kValidation;
}

}  // namespace acs::cli
