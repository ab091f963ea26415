#include "bidgame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bidgame/payoff.hpp"

namespace bidgame {
namespace {

constexpr double kInvPhi = 0.6180339887498949;

struct SearchBox {
  double lo;
  double hi;
};

SearchBox search_box(const Interval& bids, double cost) {
  if (cost > bids.lo() && cost < bids.hi()) return {cost, bids.hi()};
  return {bids.lo(), bids.hi()};
}

// Golden-section maximisation on [lo, hi]; ties move the bracket left.
template <typename F>
double golden_maximize(F&& f, double lo, double hi, double x_tol) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > x_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Sharpens a golden-section estimate with bisection on the payoff gradient,
// and snaps to a bound when the gradient points out of the box there.
template <typename G>
double polish(G&& grad, double x0, double lo, double hi, double radius) {
  if (x0 - lo <= radius && grad(lo) <= 0.0) return lo;
  if (hi - x0 <= radius && grad(hi) >= 0.0) return hi;
  double a = std::max(lo, x0 - radius);
  double b = std::min(hi, x0 + radius);
  if (!(grad(a) > 0.0 && grad(b) < 0.0)) return x0;
  for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() *
                                            std::max(1.0, std::abs(b));
       ++it) {
    const double m = 0.5 * (a + b);
    if (grad(m) > 0.0) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

bool concavity_certified(const MarketParams& params, std::size_t player,
                         double cost, const StrategyProfile& profile,
                         const SearchBox& box) {
  double opp_lo = std::numeric_limits<double>::infinity();
  double opp_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < profile.n_players(); ++j) {
    if (j == player) continue;
    opp_lo = std::min(opp_lo, profile.player(j).min_bid());
    opp_hi = std::max(opp_hi, profile.player(j).max_bid());
  }
  return params.kernel().payoff_concave_on(box.lo, box.hi, opp_lo, opp_hi,
                                           cost);
}

}  // namespace

double best_reply_bid(const MarketParams& params, std::size_t player,
                      double cost, const StrategyProfile& profile,
                      const BestReplyOptions& opts) {
  const auto& bids = params.player(player).bids;
  const SearchBox box = search_box(bids, cost);
  auto payoff = [&](double b) {
    return expected_payoff(params, player, b, cost, profile);
  };
  auto grad = [&](double b) {
    return expected_payoff_gradient(params, player, b, cost, profile);
  };

  ArgmaxMethod method = opts.method;
  if (method == ArgmaxMethod::kAuto) {
    method = concavity_certified(params, player, cost, profile, box)
                 ? ArgmaxMethod::kGolden
                 : ArgmaxMethod::kScan;
  }

  double lo = box.lo;
  double hi = box.hi;
  if (method == ArgmaxMethod::kScan) {
    const std::size_t n = std::max<std::size_t>(opts.scan_points, 3);
    const double h = (box.hi - box.lo) / static_cast<double>(n - 1);
    std::vector<double> values(n);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      const double b = k + 1 == n ? box.hi : box.lo + static_cast<double>(k) * h;
      values[k] = payoff(b);
      best = std::max(best, values[k]);
    }
    std::size_t k_best = 0;
    while (values[k_best] < best - opts.tie_tol) ++k_best;
    lo = k_best == 0 ? box.lo : box.lo + static_cast<double>(k_best - 1) * h;
    hi = k_best + 1 >= n ? box.hi
                         : std::min(box.hi, box.lo + static_cast<double>(k_best + 1) * h);
  }

  const double width = box.hi - box.lo;
  const double x0 = golden_maximize(payoff, lo, hi, 1e-7 * width);
  return polish(grad, x0, box.lo, box.hi, 1e-5 * width);
}

PlayerStrategy best_reply_profile(const MarketParams& params,
                                  std::size_t player,
                                  const StrategyProfile& profile,
                                  const BestReplyOptions& opts) {
  const auto nodes = params.player(player).grid.nodes();
  std::vector<double> bids;
  bids.reserve(nodes.size());
  for (double c : nodes) {
    bids.push_back(best_reply_bid(params, player, c, profile, opts));
  }
  return PlayerStrategy(std::vector<double>(nodes.begin(), nodes.end()),
                        std::move(bids));
}

StrategyProfile best_reply_map(const MarketParams& params,
                               const StrategyProfile& profile,
                               const BestReplyOptions& opts) {
  StrategyProfile next = profile;
  for (std::size_t i = 0; i < params.n_players(); ++i) {
    next = next.with_player(i, best_reply_profile(params, i, profile, opts));
  }
  return next;
}

std::vector<double> best_reply_residuals(const MarketParams& params,
                                         const StrategyProfile& profile,
                                         const BestReplyOptions& opts) {
  std::vector<double> residuals;
  for (std::size_t i = 0; i < params.n_players(); ++i) {
    const auto br = best_reply_profile(params, i, profile, opts);
    const auto& own = profile.player(i);
    double worst = 0.0;
    for (std::size_t k = 0; k < own.size(); ++k) {
      worst = std::max(worst, std::abs(own[k] - br[k]));
    }
    residuals.push_back(worst);
  }
  return residuals;
}

IterationTrace best_reply_iteration(const MarketParams& params,
                                    const StrategyProfile& initial,
                                    const IterationOptions& opts) {
  IterationTrace trace;
  trace.profiles.push_back(initial);
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    const StrategyProfile& current = trace.profiles.back();
    StrategyProfile next = current;
    if (opts.update == UpdateRule::kJacobi) {
      next = best_reply_map(params, current, opts.best_reply);
    } else {
      for (std::size_t i = 0; i < params.n_players(); ++i) {
        next = next.with_player(
            i, best_reply_profile(params, i, next, opts.best_reply));
      }
    }
    const double step = sup_distance(next, current);
    trace.profiles.push_back(std::move(next));
    if (step < opts.tol) {
      trace.status = IterationStatus::kConverged;
      return trace;
    }

    const auto& latest = trace.profiles.back();
    const std::size_t last = trace.profiles.size() - 1;
    for (std::size_t p = 2; p <= opts.cycle_window && p <= last; ++p) {
      if (sup_distance(latest, trace.profiles[last - p]) >= opts.cycle_tol) {
        continue;
      }
      // Only count genuine cycles whose intermediate members are distinct.
      bool distinct = true;
      for (std::size_t q = 1; q < p; ++q) {
        if (sup_distance(latest, trace.profiles[last - q]) < opts.cycle_tol) {
          distinct = false;
          break;
        }
      }
      if (distinct) {
        trace.status = IterationStatus::kCycleDetected;
        trace.period = p;
        return trace;
      }
    }
  }
  trace.status = IterationStatus::kMaxIter;
  return trace;
}

double default_flow_step(const MarketParams& params) {
  return 0.01 * params.min_bid_width();
}

std::vector<std::vector<double>> flow_drift(const MarketParams& params,
                                            const StrategyProfile& profile) {
  std::vector<std::vector<double>> drift(params.n_players());
  for (std::size_t i = 0; i < params.n_players(); ++i) {
    const auto& own = profile.player(i);
    const auto costs = own.costs();
    drift[i].resize(own.size());
    for (std::size_t k = 0; k < own.size(); ++k) {
      drift[i][k] =
          expected_payoff_gradient(params, i, own[k], costs[k], profile);
    }
  }
  return drift;
}

namespace {

double sup_norm(const std::vector<std::vector<double>>& v) {
  double norm = 0.0;
  for (const auto& row : v) {
    for (double x : row) norm = std::max(norm, std::abs(x));
  }
  return norm;
}

}  // namespace

FlowTrace flow_dynamics(const MarketParams& params,
                        const StrategyProfile& initial,
                        const FlowOptions& opts) {
  const double h = opts.step > 0.0 ? opts.step : default_flow_step(params);
  if (!(opts.tol > 0.0) || !(opts.t_max > 0.0)) {
    throw std::invalid_argument("flow_dynamics: tol and t_max must be > 0");
  }
  const std::size_t stride = std::max<std::size_t>(opts.stride, 1);

  FlowTrace trace;
  trace.step = h;
  StrategyProfile profile = initial;
  auto drift = flow_drift(params, profile);
  double norm = sup_norm(drift);
  double t = 0.0;
  trace.samples.push_back({t, profile, norm});

  std::size_t clipped_run = 0;
  bool recorded_last = true;
  while (true) {
    if (norm < opts.tol) {
      trace.status = FlowStatus::kConverged;
      break;
    }
    if (t >= opts.t_max) {
      trace.status = FlowStatus::kMaxTime;
      break;
    }
    auto bids = profile.bid_table();
    bool clipped = false;
    for (std::size_t i = 0; i < bids.size(); ++i) {
      const auto& box = params.player(i).bids;
      for (std::size_t k = 0; k < bids[i].size(); ++k) {
        const double moved = bids[i][k] + h * drift[i][k];
        bids[i][k] = box.clamp(moved);
        clipped = clipped || bids[i][k] != moved;
      }
    }
    profile = StrategyProfile(params, std::move(bids));
    ++trace.steps;
    t = static_cast<double>(trace.steps) * h;
    drift = flow_drift(params, profile);
    norm = sup_norm(drift);

    recorded_last = trace.steps % stride == 0;
    if (recorded_last) trace.samples.push_back({t, profile, norm});

    clipped_run = clipped ? clipped_run + 1 : 0;
    if (clipped_run > opts.clip_patience) {
      trace.status = FlowStatus::kLeftBidInterval;
      break;
    }
  }
  if (!recorded_last) trace.samples.push_back({t, profile, norm});
  return trace;
}

EquilibriumResult extremal_equilibria(const MarketParams& params,
                                      const SolverConfig& config) {
  auto validity = validate_params(params);
  const auto below = flow_dynamics(params, StrategyProfile::identity(params),
                                   config.flow);
  const auto above = flow_dynamics(
      params, StrategyProfile::constant_top(params), config.flow);

  const auto& lower = below.final_profile();
  const auto& upper = above.final_profile();
  auto lower_res = best_reply_residuals(params, lower, config.best_reply);
  auto upper_res = best_reply_residuals(params, upper, config.best_reply);
  const double distance = sup_distance(lower, upper);

  Verdict verdict = Verdict::kUndetermined;
  const double worst_residual =
      std::max(*std::max_element(lower_res.begin(), lower_res.end()),
               *std::max_element(upper_res.begin(), upper_res.end()));
  if (below.status == FlowStatus::kConverged &&
      above.status == FlowStatus::kConverged &&
      worst_residual < config.certification_tol) {
    verdict = distance < config.uniqueness_tol ? Verdict::kUnique
                                               : Verdict::kNotUnique;
  }

  bool interior = true;
  for (std::size_t i = 0; i < lower.n_players(); ++i) {
    const auto& box = params.player(i).bids;
    for (double b : lower.player(i).bids()) {
      interior = interior && b > box.lo() + config.interior_margin &&
                 b < box.hi() - config.interior_margin;
    }
  }

  return EquilibriumResult{
      lower,
      upper,
      {below.status, below.steps, below.final_time(), below.final_drift_norm()},
      {above.status, above.steps, above.final_time(), above.final_drift_norm()},
      distance,
      verdict,
      std::move(lower_res),
      std::move(upper_res),
      interior,
      std::move(validity),
      "constant_top"};
}

std::string to_string(IterationStatus status) {
  switch (status) {
    case IterationStatus::kConverged:
      return "converged";
    case IterationStatus::kCycleDetected:
      return "cycle_detected";
    case IterationStatus::kMaxIter:
      return "max_iter";
  }
  return "unknown";
}

std::string to_string(FlowStatus status) {
  switch (status) {
    case FlowStatus::kConverged:
      return "converged";
    case FlowStatus::kMaxTime:
      return "max_time";
    case FlowStatus::kLeftBidInterval:
      return "left_bid_interval";
  }
  return "unknown";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kUnique:
      return "unique";
    case Verdict::kNotUnique:
      return "not_unique";
    case Verdict::kUndetermined:
      return "undetermined";
  }
  return "unknown";
}

}  // namespace bidgame
