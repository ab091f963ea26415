#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bidgame/equilibrium.hpp"
#include "bidgame/model.hpp"
#include "bidgame/sampling.hpp"
#include "bidgame/strategy.hpp"

namespace bidgame {

// One certificate. margin is signed slack: positive (or zero, for weak
// conditions) when the property holds at the worst sample. The witness is
// that worst sample, as named coordinates.
struct ReportEntry {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::vector<std::pair<std::string, double>> witness;
  double tolerance = 0.0;
  std::size_t samples = 0;
  std::string note;
};

struct AssumptionReport {
  std::vector<ReportEntry> entries;

  bool all_pass() const;
  // Throws std::out_of_range for an unknown name.
  const ReportEntry& entry(const std::string& name) const;
  bool has(const std::string& name) const;
};

namespace checks {
inline constexpr const char* kKernelMonotonicity = "kernel_monotonicity";
inline constexpr const char* kIncreasingDifferences = "increasing_differences";
inline constexpr const char* kPayoffConcavity = "payoff_concavity";
inline constexpr const char* kCostCrossPartial = "cost_cross_partial";
inline constexpr const char* kBestReplyTypeMonotone = "best_reply_type_monotone";
inline constexpr const char* kScalingInvariance = "scaling_invariance";
inline constexpr const char* kBidBounds = "bid_bounds";
inline constexpr const char* kBestReplyContinuity = "best_reply_continuity";
inline constexpr const char* kAlphaBound = "alpha_bound";
inline constexpr const char* kUniqueness = "uniqueness";
inline constexpr const char* kKernelPartialFd = "kernel_partial_fd";
inline constexpr const char* kPayoffGradientFd = "payoff_gradient_fd";
inline constexpr const char* kPartialXyFd = "payoff_partial_xy_fd";
inline constexpr const char* kPartialXxFd = "payoff_partial_xx_fd";
inline constexpr const char* kPartialXcFd = "payoff_partial_xc_fd";
}  // namespace checks

inline constexpr std::size_t kDefaultSamples = 1000;

// Kernel monotonicity on the whole bid box: K nonincreasing in the own bid and
// nondecreasing in every opponent bid (tolerance 1e-12). samples >= 2.
ReportEntry check_kernel_monotonicity(const MarketParams& params,
                                      std::size_t samples,
                                      std::uint64_t seed = kDefaultSeed);

// Strict positivity of d2 pi / dx dy at smooth points of the bid box, from
// the kernel's closed form when it has one, with a second-difference sign
// cross-check at every sample.
ReportEntry check_increasing_differences(const MarketParams& params,
                                         std::size_t samples,
                                         std::uint64_t seed = kDefaultSeed);

// payoff_concavity (d2 pi / dx2 < 0), cost_cross_partial (d2 pi / dx dc > 0)
// and best_reply_type_monotone (best replies strictly increasing along every
// type grid against `opponents`, the identity profile when absent).
std::vector<ReportEntry> check_concavity_and_type_monotonicity(
    const MarketParams& params, std::size_t samples,
    std::uint64_t seed = kDefaultSeed,
    const std::optional<StrategyProfile>& opponents = std::nullopt);

// K(a x, a y) = K(x, y) to 1e-12 for every a in alphas, plus covariance of
// the best reply: BR(a c; a sigma) = a BR(c; sigma) to 1e-6 relative.
ReportEntry check_scaling_invariance(const MarketParams& params,
                                     const std::vector<double>& alphas,
                                     std::size_t samples,
                                     std::uint64_t seed = kDefaultSeed);

// Every bid of both extremal profiles lies in
// [c_* / (1 - 2 r d), c^* / (1 - 2 r d)] within 1e-6.
ReportEntry check_bid_bounds(const MarketParams& params,
                             const EquilibriumResult& result);

// Best replies to the extremal profiles on n and 2n - 1 nodes: the largest
// jump between neighbouring nodes must shrink by a factor below 0.6.
ReportEntry check_best_reply_continuity(const MarketParams& params,
                                        const EquilibriumResult& result);

// max over players and nodes of upper(c^*) lower(c) / upper(c) <= b^*.
ReportEntry check_alpha_bound(const MarketParams& params,
                              const EquilibriumResult& result);

// Verdict of extremal_equilibria as an entry (margin: tol - distance).
ReportEntry check_uniqueness(const EquilibriumResult& result,
                             double uniqueness_tol);

// Analytic derivatives against central differences at smooth points:
// kernel partial (step 1e-6, 1e-5 relative), payoff gradient (1e-5
// relative) and the closed-form second partials (1e-4 relative).
std::vector<ReportEntry> check_derivatives(const MarketParams& params,
                                           std::size_t samples,
                                           std::uint64_t seed = kDefaultSeed);

struct DiagnosticsOptions {
  std::size_t samples = kDefaultSamples;
  std::uint64_t seed = kDefaultSeed;
  std::vector<double> alphas = {0.5, 2.0, 10.0};
};

// Every instance-level check (no equilibrium needed).
AssumptionReport run_instance_checks(const MarketParams& params,
                                     const DiagnosticsOptions& opts = {});

// Instance checks plus the equilibrium-level certificates on `result`; type
// monotonicity is then evaluated against the lower equilibrium.
AssumptionReport run_all_checks(const MarketParams& params,
                                const EquilibriumResult& result,
                                double uniqueness_tol,
                                const DiagnosticsOptions& opts = {});

struct Range {
  double lo;
  double hi;
};

struct SweepRanges {
  Range demand;
  Range loss_coeff;
  Range cost_lo;
  Range cost_hi;
  Range bid_lo;
  Range bid_hi;
};

struct SweepOptions {
  std::size_t budget = 10000;
  // Flags a candidate must satisfy; empty selects default_required_flags().
  std::vector<std::string> required;
  std::uint64_t seed = kDefaultSeed;
  std::size_t grid_nodes = kDefaultGridNodes;
  // Maximum number of candidates returned (0 keeps all).
  std::size_t top = 0;
};

struct SweepCandidate {
  // Position in the sweep sequence.
  std::size_t index;
  MarketParams params;
  ValidityReport validity;
  std::size_t satisfied;
  // Smallest margin among the required flags.
  double margin;
};

struct SweepResult {
  // Candidates meeting every required flag, by satisfied count (desc), then
  // margin (desc), then index.
  std::vector<SweepCandidate> candidates;
  std::size_t evaluated = 0;
  // Points rejected before flag evaluation (c_* >= c^*, b_* >= b^*, ...).
  std::size_t malformed = 0;
  // Most flags met by any sample, whether or not it was accepted.
  std::size_t best_satisfied = 0;
};

// Deterministic low-discrepancy sweep over (d, r, c_*, c^*, b_*, b^*) for
// symmetric two-player instances with uniform densities. Every point counts
// against the budget, malformed ones included. budget >= 1.
SweepResult feasibility_search(const SweepRanges& ranges,
                               const SweepOptions& opts = {});

struct OscillationSearchOptions {
  // Number of sweep points examined.
  std::size_t budget = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::size_t grid_nodes = 11;
  IterationOptions iteration;
  FlowOptions flow;
  // Stop at the first instance found.
  bool stop_at_first = true;
};

struct OscillationWitness {
  std::size_t index;
  MarketParams params;
  IterationTrace iteration;
  FlowTrace lower_flow;
  FlowTrace upper_flow;
};

struct OscillationSearchResult {
  std::vector<OscillationWitness> found;
  std::size_t evaluated = 0;
  // Instances whose best-reply iteration cycled, regardless of the flows.
  std::size_t cycling = 0;
};

// Looks for instances where best-reply iteration from sigma(c) = c ends in a
// cycle while the flow converges from both sigma(c) = c and the constant top
// profile. Malformed sweep points count against the budget.
OscillationSearchResult search_oscillating_instance(
    const SweepRanges& ranges, const OscillationSearchOptions& opts = {});

}  // namespace bidgame
