#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kExe = BIDGAME_EXE;
const fs::path kConfigs = CONFIG_DIR;

// Fresh output directory per call, removed on destruction.
class Scratch {
 public:
  Scratch() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() /
           ("bidgame_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }
  fs::path operator/(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
};

int run(const std::string& args) {
  const std::string cmd = "\"" + kExe + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run(const std::string& sub, const std::string& config, const Scratch& out,
        const std::string& extra = "") {
  return run(sub + " --config \"" + (kConfigs / config).string() + "\" --out \"" +
             out.dir().string() + "\" " + extra);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("exit codes") {
  Scratch out;
  CHECK(run("validate", "feasible.json", out) == 0);
  CHECK(read_json(out / "validity.json")["pass"] == true);
  CHECK(run("validate", "infeasible.json", out) == 2);
  CHECK(read_json(out / "validity.json")["pass"] == false);
  CHECK(run("validate", "truncated.json", out) == 1);
  CHECK(run("validate", "no_such_file.json", out) == 1);
  CHECK(run("validate", "feasible.json", out, "--grid 1") == 1);
  CHECK(run("validate --out /tmp") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("sweep", "feasible.json", out) == 1);
  CHECK(run("dynamics", "infeasible.json", out) == 3);
  CHECK(run("check", "feasible.json", out) == 0);
}

TEST_CASE("solve writes certified, reproducible output") {
  Scratch a, b;
  REQUIRE(run("solve", "feasible.json", a) == 0);
  REQUIRE(run("solve", "feasible.json", b) == 0);
  for (const char* name : {"equilibrium.json", "report.json"}) {
    INFO(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }
  const auto eq = read_json(a / "equilibrium.json");
  CHECK(eq["verdict"] == "unique");
  CHECK(eq["sup_distance"].get<double>() <= eq["uniqueness_tol"].get<double>());
  CHECK(eq["lower"]["players"].size() == 2);
  CHECK(eq["lower"]["players"][0].size() == 51);
  for (const auto& e : read_json(a / "report.json")) {
    INFO(e["name"].get<std::string>());
    CHECK(e["pass"] == true);
  }

  Scratch c;
  CHECK(run("solve", "infeasible.json", c) == 3);
  CHECK(read_json(c / "equilibrium.json")["verdict"] == "undetermined");
}

TEST_CASE("dynamics files") {
  Scratch out;
  REQUIRE(run("dynamics", "feasible.json", out, "--grid 11") == 0);
  for (const char* name : {"flow.csv", "flow_upper.csv"}) {
    const auto rows = read_csv(out / name);
    REQUIRE(rows.size() > 1);
    CHECK(rows[0] == std::vector<std::string>{"t", "player", "cost_node", "bid"});
  }
  CHECK(read_csv(out / "briter.csv").at(0) ==
        std::vector<std::string>{"iter", "player", "cost_node", "bid"});

  SUBCASE("bids rise along the flow from truthful bids") {
    std::map<std::pair<std::string, std::string>, double> last;
    std::set<std::string> nodes;
    const auto rows = read_csv(out / "flow.csv");
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const auto key = std::make_pair(rows[k][1], rows[k][2]);
      const double bid = std::stod(rows[k][3]);
      if (auto it = last.find(key); it != last.end()) CHECK(bid >= it->second - 1e-9);
      last[key] = bid;
      nodes.insert(rows[k][2]);
    }
    CHECK(nodes.size() == 11);
  }
  SUBCASE("plot script reads only files that exist") {
    const std::string gp = slurp(out / "plot.gp");
    const std::regex quoted("'([A-Za-z_]+\\.csv)'");
    std::set<std::string> used;
    for (std::sregex_iterator it(gp.begin(), gp.end(), quoted), end; it != end; ++it) {
      used.insert((*it)[1]);
    }
    CHECK(used == std::set<std::string>{"briter.csv", "flow.csv", "flow_upper.csv"});
    for (const auto& f : used) CHECK(fs::exists(out / f));
  }
}

TEST_CASE("best-reply iteration cycles on the oscillation instance") {
  Scratch out;
  REQUIRE(run("dynamics", "oscillation.json", out) == 0);
  const auto dyn = read_json(out / "dynamics.json");
  REQUIRE(dyn["best_reply_iteration"]["status"] == "cycle_detected");
  const int period = dyn["best_reply_iteration"]["period"].get<int>();
  CHECK(period >= 2);
  CHECK(dyn["lower_flow"]["status"] == "converged");
  CHECK(dyn["upper_flow"]["status"] == "converged");

  // The last `period` iterates repeat the block before them.
  std::map<int, std::vector<double>> by_iter;
  const auto rows = read_csv(out / "briter.csv");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    by_iter[std::stoi(rows[k][0])].push_back(std::stod(rows[k][3]));
  }
  const int last = by_iter.rbegin()->first;
  const auto& end = by_iter.at(last);
  const auto& back = by_iter.at(last - period);
  REQUIRE(end.size() == back.size());
  for (std::size_t k = 0; k < end.size(); ++k) CHECK(std::abs(end[k] - back[k]) <= 1e-6);
  double spread = 0.0;
  for (std::size_t k = 0; k < end.size(); ++k) {
    spread = std::max(spread, std::abs(end[k] - by_iter.at(last - 1)[k]));
  }
  CHECK(spread > 1e-6);
}

TEST_CASE("sweep output") {
  Scratch out;
  REQUIRE(run("sweep", "sweep_narrow.json", out) == 0);
  const auto s = read_json(out / "sweep.json");
  CHECK(s["evaluated"] == 10000);
  CHECK(s["candidates"].size() == 5);
  CHECK(s["required"].size() == 5);
  for (const auto& c : s["candidates"]) CHECK(c["margin"].get<double>() >= 0.0);
}

TEST_CASE("full information reproduces the benchmark bid") {
  Scratch out;
  REQUIRE(run("solve", "full_information.json", out) == 0);
  const auto eq = read_json(out / "equilibrium.json");
  for (const char* side : {"lower", "upper"}) {
    for (const auto& player : eq[side]["players"]) {
      REQUIRE(player.size() == 1);
      CHECK(player[0][0].get<double>() == 1.0);
      CHECK(player[0][1].get<double>() == doctest::Approx(1.25).epsilon(1e-5));
    }
  }
}
