#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bidgame/diagnostics.hpp"
#include "bidgame/equilibrium.hpp"
#include "bidgame/model.hpp"

namespace bidgame {

// Malformed or inconsistent run configuration. The message names the
// offending key (dotted path) or the line of a JSON syntax error.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // Absent when the file describes only a sweep.
  std::optional<MarketParams> instance;
  SolverConfig solver;
  IterationOptions iteration;
  DiagnosticsOptions diagnostics;
  std::optional<SweepRanges> sweep_ranges;
  SweepOptions sweep;
  // Flags that cmd_validate requires; empty means default_required_flags().
  std::vector<std::string> require;

  const MarketParams& params() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<std::size_t> grid;
  std::optional<double> tol;
  std::optional<double> step;
  std::optional<std::uint64_t> seed;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

}  // namespace bidgame
