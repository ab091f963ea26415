#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bidgame/model.hpp"
#include "bidgame/strategy.hpp"

namespace bidgame {

enum class ArgmaxMethod {
  // Golden section when the kernel certifies concavity of the payoff over the
  // search box, grid scan plus golden refinement otherwise.
  kAuto,
  kGolden,
  kScan,
};

struct BestReplyOptions {
  ArgmaxMethod method = ArgmaxMethod::kAuto;
  std::size_t scan_points = 1000;
  // Scan cells within this much of the maximum count as ties; the smallest
  // bid wins.
  double tie_tol = 1e-12;
};

// A maximiser of the ex-ante payoff over the player's bid interval against
// the other players' strategies in `profile`. Bids below cost are weakly
// dominated (K >= 0), so the search runs over [max(b_*, cost), b^*].
double best_reply_bid(const MarketParams& params, std::size_t player,
                      double cost, const StrategyProfile& profile,
                      const BestReplyOptions& opts = {});

// best_reply_bid at every node of the player's type grid.
PlayerStrategy best_reply_profile(const MarketParams& params,
                                  std::size_t player,
                                  const StrategyProfile& profile,
                                  const BestReplyOptions& opts = {});

// Simultaneous best reply of every player to `profile`.
StrategyProfile best_reply_map(const MarketParams& params,
                               const StrategyProfile& profile,
                               const BestReplyOptions& opts = {});

// Per player: max over grid nodes of |sigma(c) - best_reply_bid(c)|.
std::vector<double> best_reply_residuals(const MarketParams& params,
                                         const StrategyProfile& profile,
                                         const BestReplyOptions& opts = {});

enum class UpdateRule { kJacobi, kGaussSeidel };
enum class IterationStatus { kConverged, kCycleDetected, kMaxIter };

struct IterationOptions {
  std::size_t max_iter = 200;
  double tol = 1e-8;
  UpdateRule update = UpdateRule::kJacobi;
  std::size_t cycle_window = 8;
  double cycle_tol = 1e-6;
  BestReplyOptions best_reply;
};

struct IterationTrace {
  // profiles[0] is the initial profile, profiles[k] the k-th iterate.
  std::vector<StrategyProfile> profiles;
  IterationStatus status = IterationStatus::kMaxIter;
  std::size_t period = 0;

  std::size_t iterations() const { return profiles.size() - 1; }
};

IterationTrace best_reply_iteration(const MarketParams& params,
                                    const StrategyProfile& initial,
                                    const IterationOptions& opts = {});

enum class FlowStatus { kConverged, kMaxTime, kLeftBidInterval };

struct FlowOptions {
  // Euler step; zero selects 0.01 * (b^* - b_*) using the narrowest player.
  double step = 0.0;
  double t_max = 1e4;
  // Convergence threshold on the sup-norm of the drift.
  double tol = 1e-8;
  // Record every `stride`-th step (the initial and final states always).
  std::size_t stride = 10;
  // Consecutive clipped steps tolerated before giving up.
  std::size_t clip_patience = 100;
};

double default_flow_step(const MarketParams& params);

struct FlowSample {
  double time;
  StrategyProfile profile;
  double drift_norm;
};

struct FlowTrace {
  std::vector<FlowSample> samples;
  FlowStatus status = FlowStatus::kMaxTime;
  std::size_t steps = 0;
  double step = 0.0;

  const StrategyProfile& final_profile() const {
    return samples.back().profile;
  }
  double final_drift_norm() const { return samples.back().drift_norm; }
  double final_time() const { return samples.back().time; }
};

// d/db of the ex-ante payoff at each player's current bid, node by node.
std::vector<std::vector<double>> flow_drift(const MarketParams& params,
                                            const StrategyProfile& profile);

// Explicit Euler integration of d sigma^i(c)/dt = dPi^i/db (sigma^i(c), c),
// clipping bids into the bid interval after every step.
FlowTrace flow_dynamics(const MarketParams& params,
                        const StrategyProfile& initial,
                        const FlowOptions& opts = {});

enum class Verdict { kUnique, kNotUnique, kUndetermined };

struct SolverConfig {
  FlowOptions flow;
  double uniqueness_tol = 1e-4;
  double certification_tol = 1e-4;
  double interior_margin = 1e-6;
  BestReplyOptions best_reply;
};

struct FlowSummary {
  FlowStatus status;
  std::size_t steps;
  double time;
  double drift_norm;
};

struct EquilibriumResult {
  // Limit of the flow started from sigma(c) = c.
  StrategyProfile lower;
  // Limit of the flow started from the constant top profile b^*.
  StrategyProfile upper;
  FlowSummary lower_flow;
  FlowSummary upper_flow;
  double sup_distance;
  Verdict verdict;
  std::vector<double> lower_residuals;
  std::vector<double> upper_residuals;
  // Every bid of `lower` sits at least interior_margin inside the bid
  // interval.
  bool lower_strictly_interior;
  ValidityReport validity;
  std::string upper_initialization;
};

EquilibriumResult extremal_equilibria(const MarketParams& params,
                                      const SolverConfig& config = {});

std::string to_string(IterationStatus status);
std::string to_string(FlowStatus status);
std::string to_string(Verdict verdict);

}  // namespace bidgame
