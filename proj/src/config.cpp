#include "bidgame/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bidgame {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config key '" + path + "': " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(),
                    [&key](const char* a) { return key == a; });
    if (!known) {
      throw ConfigError("unknown config key '" + join(path, key) + "'");
    }
  }
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

double as_positive(const json& v, const std::string& path) {
  const double x = as_number(v, path);
  if (!(x > 0.0)) fail(path, "must be positive");
  return x;
}

std::size_t as_count(const json& v, const std::string& path,
                     std::size_t minimum) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    fail(path, "expected an integer");
  }
  const auto x = v.get<long long>();
  if (x < static_cast<long long>(minimum)) {
    fail(path, "must be at least " + std::to_string(minimum));
  }
  return static_cast<std::size_t>(x);
}

std::uint64_t as_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    fail(path, "expected a non-negative integer");
  }
  if (v.is_number_integer() && v.get<long long>() < 0) {
    fail(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::pair<double, double> as_pair(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [lo, hi]");
  return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
}

Interval as_interval(const json& v, const std::string& path) {
  const auto [lo, hi] = as_pair(v, path);
  if (!(lo < hi)) fail(path, "interval needs lo < hi");
  return Interval(lo, hi);
}

Range as_range(const json& v, const std::string& path) {
  const auto [lo, hi] = as_pair(v, path);
  if (!(lo <= hi)) fail(path, "range needs lo <= hi");
  return {lo, hi};
}

std::vector<std::string> as_flag_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a list of flag names");
  const auto& known = all_flag_names();
  std::vector<std::string> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string item = path + "[" + std::to_string(k) + "]";
    if (!v[k].is_string()) fail(item, "expected a flag name");
    const auto name = v[k].get<std::string>();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      fail(item, "unknown flag '" + name + "'");
    }
    out.push_back(name);
  }
  return out;
}

DensitySpec as_density(const json& v, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == "uniform") return DensitySpec::uniform();
    fail(path, "unknown density '" + v.get<std::string>() + "'");
  }
  reject_unknown(v, path, {"kind", "at", "values"});
  if (!v.contains("kind") || !v["kind"].is_string()) {
    fail(join(path, "kind"), "expected \"uniform\", \"point\" or \"tabulated\"");
  }
  const auto kind = v["kind"].get<std::string>();
  if (kind == "uniform") return DensitySpec::uniform();
  if (kind == "point") {
    if (!v.contains("at")) fail(join(path, "at"), "missing");
    return DensitySpec::point_mass(as_number(v["at"], join(path, "at")));
  }
  if (kind == "tabulated") {
    const std::string vp = join(path, "values");
    if (!v.contains("values") || !v["values"].is_array()) {
      fail(vp, "expected a list of density values");
    }
    std::vector<double> values;
    for (std::size_t k = 0; k < v["values"].size(); ++k) {
      const double x =
          as_number(v["values"][k], vp + "[" + std::to_string(k) + "]");
      if (x < 0.0) fail(vp, "density values must be non-negative");
      values.push_back(x);
    }
    return DensitySpec::tabulated(std::move(values));
  }
  fail(join(path, "kind"), "unknown density kind '" + kind + "'");
}

PlayerSpec build_player(const json& doc, const std::string& path,
                        std::size_t nodes) {
  for (const char* key : {"type_interval", "bid_interval"}) {
    if (!doc.contains(key)) fail(join(path, key), "missing");
  }
  const Interval types =
      as_interval(doc["type_interval"], join(path, "type_interval"));
  const Interval bids =
      as_interval(doc["bid_interval"], join(path, "bid_interval"));
  DensitySpec density = DensitySpec::uniform();
  if (doc.contains("density")) {
    density = as_density(doc["density"], join(path, "density"));
  }
  try {
    return PlayerSpec(types, bids, std::move(density), nodes);
  } catch (const std::exception& e) {
    fail(path.empty() ? "density" : path, e.what());
  }
}

MarketParams build_instance(const json& root) {
  const double demand = as_positive(root["demand"], "demand");
  if (!root.contains("loss_coeff")) fail("loss_coeff", "missing");
  const double loss = as_positive(root["loss_coeff"], "loss_coeff");
  const std::size_t nodes =
      root.contains("grid") ? as_count(root["grid"], "grid", 2)
                            : kDefaultGridNodes;

  std::vector<PlayerSpec> players;
  const json players_doc = root.contains("players") ? root["players"] : json(2);
  if (players_doc.is_array()) {
    for (const char* key : {"type_interval", "bid_interval", "density"}) {
      if (root.contains(key)) {
        fail(key, "give per-player intervals inside \"players\" instead");
      }
    }
    if (players_doc.empty()) fail("players", "at least one player");
    for (std::size_t i = 0; i < players_doc.size(); ++i) {
      const std::string path = "players[" + std::to_string(i) + "]";
      reject_unknown(players_doc[i], path,
                     {"type_interval", "bid_interval", "density"});
      players.push_back(build_player(players_doc[i], path, nodes));
    }
  } else {
    const std::size_t n = as_count(players_doc, "players", 1);
    json shared = json::object();
    for (const char* key : {"type_interval", "bid_interval", "density"}) {
      if (root.contains(key)) shared[key] = root[key];
    }
    const PlayerSpec spec = build_player(shared, "", nodes);
    players.assign(n, spec);
  }
  return MarketParams(std::move(players), demand, loss);
}

void read_solver(const json& doc, RunConfig& config) {
  const std::string p = "solver";
  reject_unknown(doc, p,
                 {"step", "t_max", "tol", "stride", "clip_patience",
                  "uniqueness_tol", "certification_tol", "interior_margin",
                  "max_iter", "iteration_tol", "cycle_window", "cycle_tol",
                  "update", "scan_points"});
  FlowOptions& flow = config.solver.flow;
  if (doc.contains("step")) flow.step = as_positive(doc["step"], p + ".step");
  if (doc.contains("t_max")) flow.t_max = as_positive(doc["t_max"], p + ".t_max");
  if (doc.contains("tol")) flow.tol = as_positive(doc["tol"], p + ".tol");
  if (doc.contains("stride")) flow.stride = as_count(doc["stride"], p + ".stride", 1);
  if (doc.contains("clip_patience")) {
    flow.clip_patience = as_count(doc["clip_patience"], p + ".clip_patience", 1);
  }
  if (doc.contains("uniqueness_tol")) {
    config.solver.uniqueness_tol =
        as_positive(doc["uniqueness_tol"], p + ".uniqueness_tol");
  }
  if (doc.contains("certification_tol")) {
    config.solver.certification_tol =
        as_positive(doc["certification_tol"], p + ".certification_tol");
  }
  if (doc.contains("interior_margin")) {
    config.solver.interior_margin =
        as_positive(doc["interior_margin"], p + ".interior_margin");
  }
  IterationOptions& it = config.iteration;
  if (doc.contains("max_iter")) it.max_iter = as_count(doc["max_iter"], p + ".max_iter", 1);
  if (doc.contains("iteration_tol")) {
    it.tol = as_positive(doc["iteration_tol"], p + ".iteration_tol");
  }
  if (doc.contains("cycle_window")) {
    it.cycle_window = as_count(doc["cycle_window"], p + ".cycle_window", 2);
  }
  if (doc.contains("cycle_tol")) {
    it.cycle_tol = as_positive(doc["cycle_tol"], p + ".cycle_tol");
  }
  if (doc.contains("update")) {
    const auto& u = doc["update"];
    if (u == "jacobi") {
      it.update = UpdateRule::kJacobi;
    } else if (u == "gauss_seidel") {
      it.update = UpdateRule::kGaussSeidel;
    } else {
      fail(p + ".update", "expected \"jacobi\" or \"gauss_seidel\"");
    }
  }
  if (doc.contains("scan_points")) {
    const std::size_t scan = as_count(doc["scan_points"], p + ".scan_points", 2);
    config.solver.best_reply.scan_points = scan;
  }
  it.best_reply = config.solver.best_reply;
}

void read_diagnostics(const json& doc, RunConfig& config) {
  const std::string p = "diagnostics";
  reject_unknown(doc, p, {"samples", "seed", "alphas"});
  if (doc.contains("samples")) {
    config.diagnostics.samples = as_count(doc["samples"], p + ".samples", 2);
  }
  if (doc.contains("seed")) config.diagnostics.seed = as_seed(doc["seed"], p + ".seed");
  if (doc.contains("alphas")) {
    const auto& a = doc["alphas"];
    if (!a.is_array() || a.empty()) fail(p + ".alphas", "expected a list");
    config.diagnostics.alphas.clear();
    for (std::size_t k = 0; k < a.size(); ++k) {
      config.diagnostics.alphas.push_back(
          as_positive(a[k], p + ".alphas[" + std::to_string(k) + "]"));
    }
  }
}

void read_sweep(const json& doc, RunConfig& config) {
  const std::string p = "sweep";
  reject_unknown(doc, p, {"ranges", "budget", "require", "top", "seed"});
  if (!doc.contains("ranges")) fail(p + ".ranges", "missing");
  const auto& r = doc["ranges"];
  const std::string rp = p + ".ranges";
  reject_unknown(r, rp,
                 {"demand", "loss_coeff", "cost_lo", "cost_hi", "bid_lo",
                  "bid_hi"});
  SweepRanges ranges{};
  Range* slots[] = {&ranges.demand, &ranges.loss_coeff, &ranges.cost_lo,
                    &ranges.cost_hi, &ranges.bid_lo, &ranges.bid_hi};
  const char* names[] = {"demand", "loss_coeff", "cost_lo",
                         "cost_hi", "bid_lo",     "bid_hi"};
  for (int k = 0; k < 6; ++k) {
    if (!r.contains(names[k])) fail(join(rp, names[k]), "missing");
    *slots[k] = as_range(r[names[k]], join(rp, names[k]));
  }
  config.sweep_ranges = ranges;
  if (doc.contains("budget")) {
    config.sweep.budget = as_count(doc["budget"], p + ".budget", 1);
  }
  if (doc.contains("require")) {
    config.sweep.required = as_flag_list(doc["require"], p + ".require");
  }
  if (doc.contains("top")) config.sweep.top = as_count(doc["top"], p + ".top", 0);
  if (doc.contains("seed")) config.sweep.seed = as_seed(doc["seed"], p + ".seed");
}

}  // namespace

const MarketParams& RunConfig::params() const {
  if (!instance) {
    throw ConfigError(
        "config key 'demand': missing (this command needs an instance)");
  }
  return *instance;
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min(e.byte, text.size());
    const auto line =
        1 + std::count(text.begin(), text.begin() + static_cast<long>(upto > 0 ? upto - 1 : 0), '\n');
    throw ConfigError("JSON syntax error at line " + std::to_string(line) +
                      ": " + e.what());
  }
  reject_unknown(root, "",
                 {"demand", "loss_coeff", "players", "type_interval",
                  "bid_interval", "density", "grid", "solver", "diagnostics",
                  "sweep", "require"});

  RunConfig config;
  if (root.contains("solver")) read_solver(root["solver"], config);
  if (root.contains("diagnostics")) read_diagnostics(root["diagnostics"], config);
  if (root.contains("sweep")) read_sweep(root["sweep"], config);
  if (root.contains("require")) {
    config.require = as_flag_list(root["require"], "require");
  }
  if (root.contains("demand")) {
    try {
      config.instance = build_instance(root);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("invalid instance: ") + e.what());
    }
  } else {
    for (const char* key : {"loss_coeff", "players", "type_interval",
                            "bid_interval", "density", "grid"}) {
      if (root.contains(key)) fail("demand", "missing");
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void apply_overrides(RunConfig& config, const Overrides& overrides) {
  if (overrides.grid) {
    if (*overrides.grid < 2) throw ConfigError("--grid must be at least 2");
    if (config.instance) config.instance = config.instance->regridded(*overrides.grid);
  }
  if (overrides.tol) {
    if (!(*overrides.tol > 0.0)) throw ConfigError("--tol must be positive");
    config.solver.flow.tol = *overrides.tol;
  }
  if (overrides.step) {
    if (!(*overrides.step > 0.0)) throw ConfigError("--step must be positive");
    config.solver.flow.step = *overrides.step;
  }
  if (overrides.seed) {
    config.diagnostics.seed = *overrides.seed;
    config.sweep.seed = *overrides.seed;
  }
}

}  // namespace bidgame
