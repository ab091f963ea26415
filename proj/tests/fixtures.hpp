#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bidgame/diagnostics.hpp"
#include "bidgame/model.hpp"

namespace fixtures {

// Narrow type intervals; every required flag is attainable here.
inline bidgame::SweepRanges narrow_ranges() {
  return {{0.5, 2.0}, {0.01, 0.2}, {1.0, 1.0},
          {1.001, 1.01}, {0.8, 1.0}, {1.0, 1.8}};
}

// Wider ranges where best-reply iteration on coarse grids oscillates.
inline bidgame::SweepRanges oscillation_ranges() {
  return {{0.3, 2.3}, {0.005, 0.1}, {1.0, 1.0},
          {1.05, 3.0}, {0.5, 1.0}, {1.5, 6.0}};
}

// The best `count` feasible instances of the narrow sweep, regridded.
inline std::vector<bidgame::MarketParams> feasible_instances(
    std::size_t count, std::size_t nodes = bidgame::kDefaultGridNodes) {
  bidgame::SweepOptions opts;
  opts.top = count;
  opts.grid_nodes = nodes;
  std::vector<bidgame::MarketParams> out;
  for (auto& c : bidgame::feasibility_search(narrow_ranges(), opts).candidates) {
    out.push_back(c.params);
  }
  return out;
}

inline bidgame::MarketParams feasible_instance(
    std::size_t nodes = bidgame::kDefaultGridNodes) {
  return feasible_instances(1, nodes).front();
}

// Symmetric full-information game: both players' costs are c for sure.
inline bidgame::MarketParams full_information(double c, double d, double r,
                                              double b_lo, double b_hi) {
  return bidgame::MarketParams::symmetric(
      2, bidgame::Interval(c, c * 1.01), bidgame::Interval(b_lo, b_hi), d, r,
      bidgame::DensitySpec::point_mass(c));
}

inline std::mt19937_64 rng(std::uint64_t seed = 12345) {
  return std::mt19937_64(seed);
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

}  // namespace fixtures
