#include "bidgame/cli.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace bidgame {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string num(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const Json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

Json validity_json(const ValidityReport& report) {
  Json flags = Json::array();
  for (const auto& f : report.flags) {
    flags.push_back({{"name", f.name},
                     {"pass", f.pass},
                     {"margin", f.margin},
                     {"detail", f.detail}});
  }
  return flags;
}

Json entry_json(const ReportEntry& e) {
  Json witness = Json::object();
  for (const auto& [key, value] : e.witness) witness[key] = value;
  Json out = {{"name", e.name},       {"pass", e.pass},
              {"margin", e.margin},   {"witness", witness},
              {"tolerance", e.tolerance}, {"samples", e.samples}};
  if (!e.note.empty()) out["note"] = e.note;
  return out;
}

Json report_json(const AssumptionReport& report) {
  Json out = Json::array();
  for (const auto& e : report.entries) out.push_back(entry_json(e));
  return out;
}

Json profile_json(const StrategyProfile& profile) {
  Json players = Json::array();
  for (std::size_t i = 0; i < profile.n_players(); ++i) {
    Json pairs = Json::array();
    const auto& p = profile.player(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      pairs.push_back(Json::array({p.costs()[k], p[k]}));
    }
    players.push_back(std::move(pairs));
  }
  return players;
}

Json flow_json(const FlowSummary& s) {
  return {{"status", to_string(s.status)},
          {"steps", s.steps},
          {"time", s.time},
          {"drift_norm", s.drift_norm}};
}

Json flow_json(const FlowTrace& t) {
  return flow_json(FlowSummary{t.status, t.steps, t.final_time(),
                               t.final_drift_norm()});
}

Json instance_json(const MarketParams& params) {
  Json players = Json::array();
  for (const auto& p : params.players()) {
    players.push_back({{"type_interval", {p.types.lo(), p.types.hi()}},
                       {"bid_interval", {p.bids.lo(), p.bids.hi()}},
                       {"grid", p.grid.size()}});
  }
  return {{"demand", params.demand()},
          {"loss_coeff", params.loss_coeff()},
          {"players", players}};
}

std::vector<std::string> required_flags(const RunConfig& config) {
  return config.require.empty() ? default_required_flags() : config.require;
}

void append_profile_rows(std::ostringstream& csv, const std::string& key,
                         const StrategyProfile& profile) {
  for (std::size_t i = 0; i < profile.n_players(); ++i) {
    const auto& p = profile.player(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      csv << key << ',' << i << ',' << num(p.costs()[k]) << ',' << num(p[k])
          << '\n';
    }
  }
}

std::string flow_csv(const FlowTrace& trace) {
  std::ostringstream csv;
  csv << "t,player,cost_node,bid\n";
  for (const auto& s : trace.samples) append_profile_rows(csv, num(s.time), s.profile);
  return csv.str();
}

std::string briter_csv(const IterationTrace& trace) {
  std::ostringstream csv;
  csv << "iter,player,cost_node,bid\n";
  for (std::size_t k = 0; k < trace.profiles.size(); ++k) {
    append_profile_rows(csv, std::to_string(k), trace.profiles[k]);
  }
  return csv.str();
}

// Lowest, middle and highest type node of player 0, as written in the CSVs.
std::vector<std::string> plotted_nodes(const MarketParams& params) {
  const auto nodes = params.player(0).grid.nodes();
  std::vector<std::size_t> idx = {0, nodes.size() / 2, nodes.size() - 1};
  std::vector<std::string> out;
  for (std::size_t k : idx) {
    const std::string s = num(nodes[k]);
    if (out.empty() || out.back() != s) out.push_back(s);
  }
  return out;
}

std::string plot_script(const MarketParams& params) {
  const auto nodes = plotted_nodes(params);
  std::ostringstream gp;
  gp << "# Renders best-reply iteration and flow trajectories from the CSVs\n"
        "# in this directory: gnuplot plot.gp\n"
        "set datafile separator ','\n"
        "set terminal svg size 900,600 dynamic\n"
        "set key outside right\n"
        "set grid\n"
        "\n"
        "set output 'briter.svg'\n"
        "set title 'Best-reply iteration from truthful bids (player 0)'\n"
        "set xlabel 'iteration'\n"
        "set ylabel 'bid'\n"
        "plot \\\n";
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    gp << "  'briter.csv' every ::1 using ((strcol(2) eq '0' && strcol(3) eq '"
       << nodes[q] << "') ? $1 : 1/0):4 with linespoints title 'c = "
       << nodes[q] << "'" << (q + 1 < nodes.size() ? ", \\\n" : "\n");
  }
  gp << "\n"
        "set output 'flow.svg'\n"
        "set title 'Gradient flow from below and from above (player 0)'\n"
        "set xlabel 't'\n"
        "plot \\\n";
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    for (const char* file : {"flow.csv", "flow_upper.csv"}) {
      const bool last = q + 1 == nodes.size() && std::string(file) == "flow_upper.csv";
      gp << "  '" << file
         << "' every ::1 using ((strcol(2) eq '0' && strcol(3) eq '" << nodes[q]
         << "') ? $1 : 1/0):4 with lines title '" << file << " c = "
         << nodes[q] << "'" << (last ? "\n" : ", \\\n");
    }
  }
  gp << "unset output\n";
  return gp.str();
}

void prepare(const fs::path& out_dir) { fs::create_directories(out_dir); }

}  // namespace

int cmd_validate(const RunConfig& config, const fs::path& out_dir,
                 std::ostream& log) {
  const MarketParams& params = config.params();
  const ValidityReport report = validate_params(params);
  const auto required = required_flags(config);
  const bool pass = report.passes(required);
  prepare(out_dir);
  write_json(out_dir / "validity.json",
             Json{{"pass", pass},
                  {"required", required},
                  {"flags", validity_json(report)}});
  for (const auto& f : report.flags) {
    log << (f.pass ? "pass " : "FAIL ") << f.name << " (margin "
        << num(f.margin) << ")\n";
  }
  return pass ? kExitOk : kExitFlagsFailed;
}

int cmd_solve(const RunConfig& config, const fs::path& out_dir,
              std::ostream& log) {
  const MarketParams& params = config.params();
  const EquilibriumResult result = extremal_equilibria(params, config.solver);
  const AssumptionReport report = run_all_checks(
      params, result, config.solver.uniqueness_tol, config.diagnostics);

  Json doc = {
      {"verdict", to_string(result.verdict)},
      {"sup_distance", result.sup_distance},
      {"uniqueness_tol", config.solver.uniqueness_tol},
      {"certification_tol", config.solver.certification_tol},
      {"upper_initialization", result.upper_initialization},
      {"lower_strictly_interior", result.lower_strictly_interior},
      {"lower",
       {{"flow", flow_json(result.lower_flow)},
        {"residuals", result.lower_residuals},
        {"players", profile_json(result.lower)}}},
      {"upper",
       {{"flow", flow_json(result.upper_flow)},
        {"residuals", result.upper_residuals},
        {"players", profile_json(result.upper)}}},
      {"validity", validity_json(result.validity)},
  };
  prepare(out_dir);
  write_json(out_dir / "equilibrium.json", doc);
  write_json(out_dir / "report.json", report_json(report));
  log << "verdict " << to_string(result.verdict) << ", sup distance "
      << num(result.sup_distance) << "\n";
  return result.verdict == Verdict::kUndetermined ? kExitUndetermined
                                                  : kExitOk;
}

int cmd_dynamics(const RunConfig& config, const fs::path& out_dir,
                 std::ostream& log) {
  const MarketParams& params = config.params();
  const StrategyProfile truthful = StrategyProfile::identity(params);
  const IterationTrace iteration =
      best_reply_iteration(params, truthful, config.iteration);
  const FlowTrace lower = flow_dynamics(params, truthful, config.solver.flow);
  const FlowTrace upper = flow_dynamics(
      params, StrategyProfile::constant_top(params), config.solver.flow);

  prepare(out_dir);
  write_text(out_dir / "flow.csv", flow_csv(lower));
  write_text(out_dir / "flow_upper.csv", flow_csv(upper));
  write_text(out_dir / "briter.csv", briter_csv(iteration));
  write_text(out_dir / "plot.gp", plot_script(params));
  write_json(out_dir / "dynamics.json",
             Json{{"instance", instance_json(params)},
                  {"best_reply_iteration",
                   {{"status", to_string(iteration.status)},
                    {"iterations", iteration.iterations()},
                    {"period", iteration.period}}},
                  {"lower_flow", flow_json(lower)},
                  {"upper_flow", flow_json(upper)}});
  log << "best-reply iteration " << to_string(iteration.status);
  if (iteration.status == IterationStatus::kCycleDetected) {
    log << " (period " << iteration.period << ")";
  }
  log << "; flow from below " << to_string(lower.status) << ", from above "
      << to_string(upper.status) << "\n";
  const bool converged = lower.status == FlowStatus::kConverged &&
                         upper.status == FlowStatus::kConverged;
  return converged ? kExitOk : kExitUndetermined;
}

int cmd_check(const RunConfig& config, const fs::path& out_dir,
              std::ostream& log) {
  const MarketParams& params = config.params();
  const AssumptionReport report = run_instance_checks(params, config.diagnostics);
  prepare(out_dir);
  write_json(out_dir / "report.json", report_json(report));
  for (const auto& e : report.entries) {
    log << (e.pass ? "pass " : "FAIL ") << e.name << "\n";
  }
  return report.all_pass() ? kExitOk : kExitFlagsFailed;
}

int cmd_sweep(const RunConfig& config, const fs::path& out_dir,
              std::ostream& log) {
  if (!config.sweep_ranges) throw ConfigError("config key 'sweep': missing");
  const SweepResult result = feasibility_search(*config.sweep_ranges, config.sweep);
  const auto& required =
      config.sweep.required.empty() ? default_required_flags() : config.sweep.required;
  Json candidates = Json::array();
  for (const auto& c : result.candidates) {
    Json inst = instance_json(c.params);
    candidates.push_back({{"index", c.index},
                          {"satisfied", c.satisfied},
                          {"margin", c.margin},
                          {"instance", inst},
                          {"flags", validity_json(c.validity)}});
  }
  prepare(out_dir);
  write_json(out_dir / "sweep.json",
             Json{{"evaluated", result.evaluated},
                  {"malformed", result.malformed},
                  {"best_satisfied", result.best_satisfied},
                  {"required", required},
                  {"candidates", candidates}});
  log << result.candidates.size() << " candidates out of " << result.evaluated
      << " points\n";
  return result.candidates.empty() ? kExitFlagsFailed : kExitOk;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibrium engine for Bayesian bidding games"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "./out";
  std::optional<std::size_t> grid;
  std::optional<double> tol;
  std::optional<double> step;
  std::optional<std::uint64_t> seed;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, const fs::path&, std::ostream&);
  };
  const Command commands[] = {
      {"validate", "Report the instance's validity flags", cmd_validate},
      {"solve", "Compute extremal equilibria and certify them", cmd_solve},
      {"dynamics", "Write best-reply and flow trajectories", cmd_dynamics},
      {"check", "Run the assumption diagnostics only", cmd_check},
      {"sweep", "Search parameter space for feasible instances", cmd_sweep},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "Run configuration (JSON)")
        ->required();
    sub->add_option("--out", out_dir, "Output directory")
        ->capture_default_str();
    sub->add_option("--grid", grid, "Type grid nodes per player");
    sub->add_option("--tol", tol, "Flow drift tolerance");
    sub->add_option("--step", step, "Euler step");
    sub->add_option("--seed", seed, "Sampling seed");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    RunConfig config = load_config(config_path);
    apply_overrides(config, Overrides{grid, tol, step, seed});
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (subs[k]->parsed()) return commands[k].run(config, out_dir, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace bidgame
