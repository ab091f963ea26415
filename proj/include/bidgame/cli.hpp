#pragma once

#include <filesystem>
#include <ostream>

#include "bidgame/config.hpp"

namespace bidgame {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitFlagsFailed = 2,
  kExitUndetermined = 3,
};

// Each command writes its files into `out_dir` (created if missing) and
// returns an ExitCode. Human-readable progress goes to `log`.
int cmd_validate(const RunConfig& config, const std::filesystem::path& out_dir,
                 std::ostream& log);
int cmd_solve(const RunConfig& config, const std::filesystem::path& out_dir,
              std::ostream& log);
int cmd_dynamics(const RunConfig& config, const std::filesystem::path& out_dir,
                 std::ostream& log);
int cmd_check(const RunConfig& config, const std::filesystem::path& out_dir,
              std::ostream& log);
int cmd_sweep(const RunConfig& config, const std::filesystem::path& out_dir,
              std::ostream& log);

// Full command line: subcommand, --config, --out, --grid, --tol, --step,
// --seed.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace bidgame
