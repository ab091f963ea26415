#include "bidgame/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bidgame/payoff.hpp"

namespace bidgame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMonotonicityTol = 1e-12;
constexpr double kKernelScaleTol = 1e-12;
constexpr double kCovarianceTol = 1e-6;
constexpr double kBidBoundTol = 1e-6;
constexpr double kContinuityRatio = 0.6;
constexpr double kKernelPartialTol = 1e-5;
constexpr double kGradientTol = 1e-5;
constexpr double kSecondPartialTol = 1e-4;
// Rejection sampling gives up after this many draws per requested sample.
constexpr std::size_t kDrawsPerSample = 20;

using Witness = std::vector<std::pair<std::string, double>>;

struct Box {
  double lo;
  double hi;
};

Box bid_box(const MarketParams& params) {
  return {params.min_bid_floor(), params.max_bid_ceiling()};
}

Box type_box(const MarketParams& params) {
  return {params.min_cost(), params.max_cost()};
}

double at(const Box& box, double u) { return lerp_unit(u, box.lo, box.hi); }

std::size_t pick(double u, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
}

// Keeps the worst (smallest) margin seen together with its witness.
struct Worst {
  double margin = kInf;
  Witness witness;

  void offer(double m, Witness w) {
    if (m < margin) {
      margin = m;
      witness = std::move(w);
    }
  }
};

ReportEntry make_entry(const char* name, bool pass, const Worst& worst,
                       double tolerance, std::size_t samples,
                       std::string note = {}) {
  return {name, pass, worst.margin, worst.witness, tolerance, samples,
          std::move(note)};
}

ReportEntry vacuous(const char* name, double tolerance, std::string note) {
  return {name, false, std::numeric_limits<double>::quiet_NaN(), {},
          tolerance, 0, std::move(note)};
}

double relative_gap(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// A random opponent vector with one distinguished coordinate `k` set to y.
std::vector<double> opponent_vector(const std::vector<double>& u,
                                    std::size_t offset, std::size_t count,
                                    const Box& box, std::size_t k, double y) {
  std::vector<double> opp(count);
  for (std::size_t m = 0; m < count; ++m) opp[m] = at(box, u[offset + m]);
  opp[k] = y;
  return opp;
}

// True when the kernel is smooth on the square of half-width h around
// (x, opp) in the (x, opp[k]) plane.
bool smooth_stencil(const KernelModel& model, double x,
                    std::vector<double> opp, std::size_t k, double hx,
                    double hy) {
  const double y = opp[k];
  for (double dx : {-hx, 0.0, hx}) {
    for (double dy : {-hy, 0.0, hy}) {
      opp[k] = y + dy;
      if (!model.smooth_at(x + dx, opp)) return false;
    }
  }
  return true;
}

double payoff_at(const KernelModel& model, double x, double c,
                 const std::vector<double>& opp) {
  return pointwise_payoff(x, c, opp, model);
}

double fd_xy(const KernelModel& model, double x, double c,
             std::vector<double> opp, std::size_t k, double h) {
  const double y = opp[k];
  auto eval = [&](double dx, double dy) {
    opp[k] = y + dy;
    return payoff_at(model, x + dx, c, opp);
  };
  return (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4 * h * h);
}

double fd_xx(const KernelModel& model, double x, double c,
             const std::vector<double>& opp, double h) {
  return (payoff_at(model, x + h, c, opp) - 2 * payoff_at(model, x, c, opp) +
          payoff_at(model, x - h, c, opp)) /
         (h * h);
}

double fd_xc(const KernelModel& model, double x, double c,
             const std::vector<double>& opp, double h) {
  return (payoff_at(model, x + h, c + h, opp) -
          payoff_at(model, x + h, c - h, opp) -
          payoff_at(model, x - h, c + h, opp) +
          payoff_at(model, x - h, c - h, opp)) /
         (4 * h * h);
}

// Shared sampling loop for the second-order sign checks. `body` returns
// false to reject a draw.
template <typename Body>
std::size_t sample_smooth_points(const MarketParams& params,
                                 std::size_t samples, std::uint64_t seed,
                                 Body&& body) {
  const std::size_t n_opp = params.n_players() - 1;
  LowDiscrepancySampler sampler(3 + n_opp, seed);
  const Box bids = bid_box(params);
  const Box types = type_box(params);
  const KernelModel& model = params.kernel();
  std::size_t accepted = 0;
  for (std::size_t draw = 0;
       draw < kDrawsPerSample * samples && accepted < samples; ++draw) {
    const auto u = sampler.next();
    const double x = at(bids, u[0]);
    const double c = at(types, u[1]);
    const std::size_t k = pick(u[2], n_opp);
    const auto opp = opponent_vector(u, 3, n_opp, bids, k, at(bids, u[3 + k]));
    const double h = 1e-4 * std::max(x, opp[k]);
    if (!smooth_stencil(model, x, opp, k, h, h)) continue;
    if (body(model, x, c, opp, k, h)) ++accepted;
  }
  return accepted;
}

Witness point_witness(double x, double c, const std::vector<double>& opp,
                      std::size_t k, double value) {
  return {{"x", x}, {"y", opp[k]}, {"c", c}, {"value", value}};
}

std::vector<StrategyProfile> extremal_profiles(const EquilibriumResult& r) {
  return {r.lower, r.upper};
}

double max_jump(std::span<const double> v) {
  double jump = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    jump = std::max(jump, std::abs(v[k] - v[k - 1]));
  }
  return jump;
}

StrategyProfile transfer(const MarketParams& target,
                         const StrategyProfile& source) {
  return StrategyProfile::from_function(
      target, [&source](std::size_t i, double c) {
        return source.player(i)(c);
      });
}

}  // namespace

bool AssumptionReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ReportEntry& e) { return e.pass; });
}

bool AssumptionReport::has(const std::string& name) const {
  return std::any_of(entries.begin(), entries.end(),
                     [&name](const ReportEntry& e) { return e.name == name; });
}

const ReportEntry& AssumptionReport::entry(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e;
  }
  throw std::out_of_range("no report entry named '" + name + "'");
}

ReportEntry check_kernel_monotonicity(const MarketParams& params,
                                      std::size_t samples,
                                      std::uint64_t seed) {
  if (samples < 2) {
    throw std::invalid_argument(
        "check_kernel_monotonicity: at least two samples required");
  }
  const std::size_t n_opp = params.n_players() - 1;
  const KernelModel& model = params.kernel();
  const Box bids = bid_box(params);
  LowDiscrepancySampler sampler(4 + n_opp, seed);
  Worst worst;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto u = sampler.next();
    const double x1 = at(bids, std::min(u[0], u[1]));
    const double x2 = at(bids, std::max(u[0], u[1]));
    const std::size_t k = pick(u[2], n_opp);
    const double y_extra = at(bids, u[3]);
    auto opp = opponent_vector(u, 4, n_opp, bids, k, at(bids, u[4 + k]));
    const double y1 = std::min(opp[k], y_extra);
    const double y2 = std::max(opp[k], y_extra);
    const double x = at(bids, 0.5 * (u[0] + u[1]));

    const double own_drop = model.eval(x1, opp) - model.eval(x2, opp);
    worst.offer(own_drop, {{"own_low", x1},
                           {"own_high", x2},
                           {"opp", opp[k]},
                           {"increase_in_own", -own_drop}});
    opp[k] = y1;
    const double k_lo = model.eval(x, opp);
    opp[k] = y2;
    const double opp_rise = model.eval(x, opp) - k_lo;
    worst.offer(opp_rise, {{"own", x},
                           {"opp_low", y1},
                           {"opp_high", y2},
                           {"decrease_in_opp", -opp_rise}});
  }
  return make_entry(checks::kKernelMonotonicity,
                    worst.margin >= -kMonotonicityTol, worst, kMonotonicityTol,
                    samples);
}

ReportEntry check_increasing_differences(const MarketParams& params,
                                         std::size_t samples,
                                         std::uint64_t seed) {
  Worst worst;
  std::size_t mismatches = 0;
  Witness mismatch;
  const std::size_t accepted = sample_smooth_points(
      params, samples, seed,
      [&](const KernelModel& model, double x, double c,
          const std::vector<double>& opp, std::size_t k, double h) {
        const double fd = fd_xy(model, x, c, opp, k, h);
        double value = fd;
        if (const auto closed = model.payoff_partials(x, opp, c)) {
          value = closed->xy;
          if ((value > 0) != (fd > 0) && relative_gap(value, fd, 0.0) > 1e-3) {
            if (mismatches++ == 0) mismatch = point_witness(x, c, opp, k, fd);
          }
        }
        worst.offer(value, point_witness(x, c, opp, k, value));
        return true;
      });
  if (accepted == 0) {
    return vacuous(checks::kIncreasingDifferences, 0.0,
                   "no smooth sample points in the bid box");
  }
  if (mismatches > 0) {
    ReportEntry e = make_entry(checks::kIncreasingDifferences, false, worst,
                               0.0, accepted,
                               std::to_string(mismatches) +
                                   " finite-difference sign disagreements");
    e.witness = mismatch;
    return e;
  }
  return make_entry(checks::kIncreasingDifferences, worst.margin > 0.0, worst,
                    0.0, accepted);
}

std::vector<ReportEntry> check_concavity_and_type_monotonicity(
    const MarketParams& params, std::size_t samples, std::uint64_t seed,
    const std::optional<StrategyProfile>& opponents) {
  Worst concave;
  Worst cross;
  const std::size_t accepted = sample_smooth_points(
      params, samples, seed,
      [&](const KernelModel& model, double x, double c,
          const std::vector<double>& opp, std::size_t k, double h) {
        if (!model.smooth_at(x, opp) ||
            !model.smooth_at(x + h, opp) || !model.smooth_at(x - h, opp)) {
          return false;
        }
        double xx = fd_xx(model, x, c, opp, h);
        double xc = fd_xc(model, x, c, opp, h);
        if (const auto closed = model.payoff_partials(x, opp, c)) {
          xx = closed->xx;
          xc = closed->xc;
        }
        concave.offer(-xx, point_witness(x, c, opp, k, xx));
        cross.offer(xc, point_witness(x, c, opp, k, xc));
        return true;
      });

  std::vector<ReportEntry> out;
  if (accepted == 0) {
    out.push_back(vacuous(checks::kPayoffConcavity, 0.0,
                          "no smooth sample points in the bid box"));
    out.push_back(vacuous(checks::kCostCrossPartial, 0.0,
                          "no smooth sample points in the bid box"));
  } else {
    out.push_back(make_entry(checks::kPayoffConcavity, concave.margin > 0.0,
                             concave, 0.0, accepted));
    out.push_back(make_entry(checks::kCostCrossPartial, cross.margin > 0.0,
                             cross, 0.0, accepted));
  }

  const StrategyProfile against =
      opponents ? *opponents : StrategyProfile::identity(params);
  Worst mono;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < params.n_players(); ++i) {
    const PlayerStrategy br = best_reply_profile(params, i, against);
    for (std::size_t k = 1; k < br.size(); ++k) {
      ++pairs;
      const double rise = br[k] - br[k - 1];
      mono.offer(rise, {{"player", static_cast<double>(i)},
                        {"cost_low", br.costs()[k - 1]},
                        {"cost_high", br.costs()[k]},
                        {"bid_low", br[k - 1]},
                        {"bid_high", br[k]}});
    }
  }
  const std::string note = opponents ? "certified on computed equilibria"
                                     : "against the truthful profile";
  if (pairs == 0) {
    ReportEntry e{checks::kBestReplyTypeMonotone, true, 0.0, {}, 0.0, 0,
                  "single-node type grids"};
    out.push_back(e);
  } else {
    out.push_back(make_entry(checks::kBestReplyTypeMonotone, mono.margin > 0.0,
                             mono, 0.0, pairs, note));
  }
  return out;
}

ReportEntry check_scaling_invariance(const MarketParams& params,
                                     const std::vector<double>& alphas,
                                     std::size_t samples,
                                     std::uint64_t seed) {
  for (double a : alphas) {
    if (!(a > 0.0)) {
      throw std::invalid_argument(
          "check_scaling_invariance: scale factors must be positive");
    }
  }
  const std::size_t n_opp = params.n_players() - 1;
  const KernelModel& model = params.kernel();
  const Box bids = bid_box(params);
  LowDiscrepancySampler sampler(1 + n_opp, seed);

  // Slack is normalised by the tolerance so both parts share one scale.
  Worst worst;
  std::size_t count = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto u = sampler.next();
    const double x = at(bids, u[0]);
    std::vector<double> opp(n_opp);
    for (std::size_t m = 0; m < n_opp; ++m) opp[m] = at(bids, u[1 + m]);
    const double base = model.eval(x, opp);
    for (double a : alphas) {
      std::vector<double> scaled_opp(opp);
      for (double& y : scaled_opp) y *= a;
      const double dev = std::abs(model.eval(a * x, scaled_opp) - base);
      ++count;
      worst.offer(1.0 - dev / kKernelScaleTol,
                  {{"alpha", a}, {"own", x}, {"opp", opp[0]},
                   {"kernel_deviation", dev}});
    }
  }

  const StrategyProfile sigma = StrategyProfile::identity(params);
  for (double a : alphas) {
    const MarketParams scaled = params.scaled(a);
    const StrategyProfile scaled_sigma = StrategyProfile::from_function(
        scaled, [&](std::size_t i, double c) {
          return scaled.player(i).bids.clamp(a * sigma.player(i)(c / a));
        });
    for (std::size_t i = 0; i < params.n_players(); ++i) {
      const auto nodes = params.player(i).grid.nodes();
      const std::size_t picks = std::min<std::size_t>(5, nodes.size());
      for (std::size_t q = 0; q < picks; ++q) {
        const std::size_t k =
            picks == 1 ? 0 : q * (nodes.size() - 1) / (picks - 1);
        const double c = nodes[k];
        const double expect = a * best_reply_bid(params, i, c, sigma);
        const double got = best_reply_bid(scaled, i, a * c, scaled_sigma);
        const double dev = std::abs(got - expect) / std::max(1.0, std::abs(expect));
        ++count;
        worst.offer(1.0 - dev / kCovarianceTol,
                    {{"alpha", a}, {"player", static_cast<double>(i)},
                     {"cost", c}, {"scaled_best_reply", got},
                     {"expected", expect}, {"relative_deviation", dev}});
      }
    }
  }
  return make_entry(checks::kScalingInvariance, worst.margin >= 0.0, worst,
                    kKernelScaleTol, count,
                    "margin is 1 - deviation / tolerance; kernel tolerance "
                    "1e-12, best-reply covariance tolerance 1e-6");
}

ReportEntry check_bid_bounds(const MarketParams& params,
                             const EquilibriumResult& result) {
  const double slack = 1.0 - 2.0 * params.demand() * params.loss_coeff();
  if (!(slack > 0.0)) {
    return vacuous(checks::kBidBounds, kBidBoundTol,
                   "bound undefined when 2 d r >= 1");
  }
  Worst worst;
  std::size_t count = 0;
  const auto profiles = extremal_profiles(result);
  for (std::size_t which = 0; which < profiles.size(); ++which) {
    for (std::size_t i = 0; i < params.n_players(); ++i) {
      const double lo = params.player(i).types.lo() / slack;
      const double hi = params.player(i).types.hi() / slack;
      const auto& p = profiles[which].player(i);
      for (std::size_t k = 0; k < p.size(); ++k) {
        ++count;
        worst.offer(std::min(p[k] - lo, hi - p[k]),
                    {{"profile", static_cast<double>(which)},
                     {"player", static_cast<double>(i)},
                     {"cost", p.costs()[k]},
                     {"bid", p[k]},
                     {"bound_low", lo},
                     {"bound_high", hi}});
      }
    }
  }
  return make_entry(checks::kBidBounds, worst.margin >= -kBidBoundTol, worst,
                    kBidBoundTol, count, "profile 0 is lower, 1 is upper");
}

ReportEntry check_best_reply_continuity(const MarketParams& params,
                                        const EquilibriumResult& result) {
  std::size_t nodes = 0;
  for (const auto& p : params.players()) nodes = std::max(nodes, p.grid.size());
  if (nodes < 2) {
    return {checks::kBestReplyContinuity, true, kContinuityRatio, {},
            kContinuityRatio, 0, "single-node type grids"};
  }
  const MarketParams fine = params.regridded(2 * nodes - 1);
  Worst worst;
  std::size_t count = 0;
  const auto profiles = extremal_profiles(result);
  for (std::size_t which = 0; which < profiles.size(); ++which) {
    const StrategyProfile fine_profile = transfer(fine, profiles[which]);
    for (std::size_t i = 0; i < params.n_players(); ++i) {
      const double coarse_jump =
          max_jump(best_reply_profile(params, i, profiles[which]).bids());
      const double fine_jump =
          max_jump(best_reply_profile(fine, i, fine_profile).bids());
      const double ratio = coarse_jump > 1e-12 ? fine_jump / coarse_jump : 0.0;
      ++count;
      worst.offer(kContinuityRatio - ratio,
                  {{"profile", static_cast<double>(which)},
                   {"player", static_cast<double>(i)},
                   {"coarse_jump", coarse_jump},
                   {"fine_jump", fine_jump},
                   {"ratio", ratio}});
    }
  }
  return make_entry(checks::kBestReplyContinuity, worst.margin > 0.0, worst,
                    kContinuityRatio, count,
                    "margin is 0.6 minus the jump ratio after refinement");
}

ReportEntry check_alpha_bound(const MarketParams& params,
                              const EquilibriumResult& result) {
  Worst worst;
  std::size_t count = 0;
  for (std::size_t i = 0; i < params.n_players(); ++i) {
    const auto& lower = result.lower.player(i);
    const auto& upper = result.upper.player(i);
    const double top = upper[upper.size() - 1];
    const double ceiling = params.player(i).bids.hi();
    for (std::size_t k = 0; k < lower.size(); ++k) {
      ++count;
      const double value = top * lower[k] / upper[k];
      worst.offer(ceiling - value, {{"player", static_cast<double>(i)},
                                    {"cost", lower.costs()[k]},
                                    {"value", value},
                                    {"b_upper", ceiling}});
    }
  }
  return make_entry(checks::kAlphaBound, worst.margin >= 0.0, worst, 0.0,
                    count);
}

ReportEntry check_uniqueness(const EquilibriumResult& result,
                             double uniqueness_tol) {
  Worst worst;
  worst.offer(uniqueness_tol - result.sup_distance,
              {{"sup_distance", result.sup_distance}});
  return make_entry(checks::kUniqueness, result.verdict == Verdict::kUnique,
                    worst, uniqueness_tol, 1,
                    "verdict " + to_string(result.verdict));
}

std::vector<ReportEntry> check_derivatives(const MarketParams& params,
                                           std::size_t samples,
                                           std::uint64_t seed) {
  const std::size_t n_opp = params.n_players() - 1;
  const KernelModel& model = params.kernel();
  const Box bids = bid_box(params);
  std::vector<ReportEntry> out;

  {
    LowDiscrepancySampler sampler(2 + n_opp, seed);
    Worst worst;
    std::size_t accepted = 0;
    for (std::size_t draw = 0;
         draw < kDrawsPerSample * samples && accepted < samples; ++draw) {
      const auto u = sampler.next();
      const double x = at(bids, u[0]);
      const auto opp = opponent_vector(u, 2, n_opp, bids, 0, at(bids, u[2]));
      const double h = 1e-6;
      if (!smooth_stencil(model, x, opp, 0, 10 * h, 0.0)) continue;
      ++accepted;
      const double analytic = model.partial_own(x, opp);
      const double fd =
          (model.eval(x + h, opp) - model.eval(x - h, opp)) / (2 * h);
      const double gap = relative_gap(analytic, fd, 1e-300);
      worst.offer(kKernelPartialTol - gap, {{"own", x},
                                            {"opp", opp[0]},
                                            {"analytic", analytic},
                                            {"finite_difference", fd}});
    }
    out.push_back(accepted == 0
                      ? vacuous(checks::kKernelPartialFd, kKernelPartialTol,
                                "no smooth sample points")
                      : make_entry(checks::kKernelPartialFd,
                                   worst.margin >= 0.0, worst,
                                   kKernelPartialTol, accepted,
                                   "margin is tolerance minus relative gap"));
  }

  {
    const StrategyProfile sigma = StrategyProfile::identity(params);
    LowDiscrepancySampler sampler(3, seed);
    Worst worst;
    std::size_t accepted = 0;
    for (std::size_t draw = 0;
         draw < kDrawsPerSample * samples && accepted < samples; ++draw) {
      const auto u = sampler.next();
      const std::size_t i = pick(u[0], params.n_players());
      const auto nodes = params.player(i).grid.nodes();
      const double c = nodes[pick(u[1], nodes.size())];
      const Interval& own = params.player(i).bids;
      const double x = lerp_unit(u[2], own.lo(), own.hi());
      const double h = 1e-6 * std::max(1.0, std::abs(x));
      bool smooth = true;
      for (std::size_t j = 0; j < params.n_players() && smooth; ++j) {
        if (j == i) continue;
        for (double y : sigma.player(j).bids()) {
          std::vector<double> opp(n_opp, y);
          if (!smooth_stencil(model, x, opp, 0, 10 * h, 0.0)) {
            smooth = false;
            break;
          }
        }
      }
      if (!smooth) continue;
      ++accepted;
      const double analytic = expected_payoff_gradient(params, i, x, c, sigma);
      const double fd = (expected_payoff(params, i, x + h, c, sigma) -
                         expected_payoff(params, i, x - h, c, sigma)) /
                        (2 * h);
      // Unit floor: near the first-order condition both values vanish.
      const double gap = relative_gap(analytic, fd, 1.0);
      worst.offer(kGradientTol - gap, {{"player", static_cast<double>(i)},
                                       {"own", x},
                                       {"cost", c},
                                       {"analytic", analytic},
                                       {"finite_difference", fd}});
    }
    out.push_back(accepted == 0
                      ? vacuous(checks::kPayoffGradientFd, kGradientTol,
                                "no smooth sample points")
                      : make_entry(checks::kPayoffGradientFd,
                                   worst.margin >= 0.0, worst, kGradientTol,
                                   accepted,
                                   "relative gap with unit floor, against "
                                   "the truthful opponent profile"));
  }

  Worst xy;
  Worst xx;
  Worst xc;
  bool closed_forms = true;
  const std::size_t accepted = sample_smooth_points(
      params, samples, seed ^ 0x9e3779b97f4a7c15ULL,
      [&](const KernelModel& m, double x, double c,
          const std::vector<double>& opp, std::size_t k, double h) {
        const auto closed = m.payoff_partials(x, opp, c);
        if (!closed) {
          closed_forms = false;
          return false;
        }
        const double fxy = fd_xy(m, x, c, opp, k, h);
        const double fxx = fd_xx(m, x, c, opp, h);
        const double fxc = fd_xc(m, x, c, opp, h);
        auto offer = [&](Worst& w, double a, double f) {
          w.offer(kSecondPartialTol - relative_gap(a, f, 1e-300),
                  {{"x", x}, {"y", opp[k]}, {"c", c}, {"closed_form", a},
                   {"finite_difference", f}});
        };
        offer(xy, closed->xy, fxy);
        offer(xx, closed->xx, fxx);
        offer(xc, closed->xc, fxc);
        return true;
      });
  const char* names[] = {checks::kPartialXyFd, checks::kPartialXxFd,
                         checks::kPartialXcFd};
  const Worst* worsts[] = {&xy, &xx, &xc};
  for (int q = 0; q < 3; ++q) {
    if (accepted == 0) {
      out.push_back(vacuous(names[q], kSecondPartialTol,
                            closed_forms ? "no smooth sample points"
                                         : "kernel has no closed forms"));
    } else {
      out.push_back(make_entry(names[q], worsts[q]->margin >= 0.0, *worsts[q],
                               kSecondPartialTol, accepted,
                               "margin is tolerance minus relative gap"));
    }
  }
  return out;
}

AssumptionReport run_instance_checks(const MarketParams& params,
                                     const DiagnosticsOptions& opts) {
  AssumptionReport report;
  auto& e = report.entries;
  e.push_back(check_kernel_monotonicity(params, opts.samples, opts.seed));
  e.push_back(check_increasing_differences(params, opts.samples, opts.seed));
  for (auto& entry :
       check_concavity_and_type_monotonicity(params, opts.samples, opts.seed)) {
    e.push_back(std::move(entry));
  }
  e.push_back(
      check_scaling_invariance(params, opts.alphas, opts.samples, opts.seed));
  for (auto& entry : check_derivatives(params, opts.samples, opts.seed)) {
    e.push_back(std::move(entry));
  }
  return report;
}

AssumptionReport run_all_checks(const MarketParams& params,
                                const EquilibriumResult& result,
                                double uniqueness_tol,
                                const DiagnosticsOptions& opts) {
  AssumptionReport report;
  auto& e = report.entries;
  e.push_back(check_kernel_monotonicity(params, opts.samples, opts.seed));
  e.push_back(check_increasing_differences(params, opts.samples, opts.seed));
  for (auto& entry : check_concavity_and_type_monotonicity(
           params, opts.samples, opts.seed, result.lower)) {
    e.push_back(std::move(entry));
  }
  e.push_back(
      check_scaling_invariance(params, opts.alphas, opts.samples, opts.seed));
  e.push_back(check_bid_bounds(params, result));
  e.push_back(check_best_reply_continuity(params, result));
  e.push_back(check_alpha_bound(params, result));
  e.push_back(check_uniqueness(result, uniqueness_tol));
  for (auto& entry : check_derivatives(params, opts.samples, opts.seed)) {
    e.push_back(std::move(entry));
  }
  return report;
}

namespace {

struct SweepPoint {
  double d, r, c_lo, c_hi, b_lo, b_hi;
};

SweepPoint map_point(const SweepRanges& ranges, const std::vector<double>& u) {
  auto m = [](const Range& range, double v) {
    return lerp_unit(v, range.lo, range.hi);
  };
  return {m(ranges.demand, u[0]),  m(ranges.loss_coeff, u[1]),
          m(ranges.cost_lo, u[2]), m(ranges.cost_hi, u[3]),
          m(ranges.bid_lo, u[4]),  m(ranges.bid_hi, u[5])};
}

void check_ranges(const SweepRanges& ranges) {
  for (const Range* r : {&ranges.demand, &ranges.loss_coeff, &ranges.cost_lo,
                         &ranges.cost_hi, &ranges.bid_lo, &ranges.bid_hi}) {
    if (!(r->lo <= r->hi) || !std::isfinite(r->lo) || !std::isfinite(r->hi)) {
      throw std::invalid_argument("sweep range must satisfy lo <= hi");
    }
  }
}

std::optional<MarketParams> build_point(const SweepPoint& p,
                                        std::size_t nodes) {
  if (!(p.c_lo < p.c_hi) || !(p.b_lo < p.b_hi) || !(p.d > 0.0) ||
      !(p.r > 0.0)) {
    return std::nullopt;
  }
  try {
    return MarketParams::symmetric(2, Interval(p.c_lo, p.c_hi),
                                   Interval(p.b_lo, p.b_hi), p.d, p.r, {},
                                   nodes);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

SweepResult feasibility_search(const SweepRanges& ranges,
                               const SweepOptions& opts) {
  if (opts.budget < 1) {
    throw std::invalid_argument("feasibility_search: budget must be >= 1");
  }
  check_ranges(ranges);
  const std::vector<std::string>& required =
      opts.required.empty() ? default_required_flags() : opts.required;
  for (const auto& name : required) {
    const auto& known = all_flag_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw std::invalid_argument("feasibility_search: unknown flag '" + name +
                                  "'");
    }
  }

  LowDiscrepancySampler sampler(6, opts.seed);
  SweepResult result;
  for (std::size_t idx = 0; idx < opts.budget; ++idx) {
    const SweepPoint point = map_point(ranges, sampler.next());
    ++result.evaluated;
    auto params = build_point(point, opts.grid_nodes);
    if (!params) {
      ++result.malformed;
      continue;
    }
    ValidityReport validity = validate_params(*params);
    const std::size_t satisfied = validity.satisfied_count();
    result.best_satisfied = std::max(result.best_satisfied, satisfied);
    if (!validity.passes(required)) continue;
    double margin = kInf;
    for (const auto& name : required) {
      const double m = validity.flag(name).margin;
      if (!std::isnan(m)) margin = std::min(margin, m);
    }
    result.candidates.push_back(
        {idx, std::move(*params), std::move(validity), satisfied, margin});
  }
  std::stable_sort(result.candidates.begin(), result.candidates.end(),
                   [](const SweepCandidate& a, const SweepCandidate& b) {
                     if (a.satisfied != b.satisfied) {
                       return a.satisfied > b.satisfied;
                     }
                     if (a.margin != b.margin) return a.margin > b.margin;
                     return a.index < b.index;
                   });
  if (opts.top > 0 && result.candidates.size() > opts.top) {
    result.candidates.erase(result.candidates.begin() + opts.top,
                            result.candidates.end());
  }
  return result;
}

OscillationSearchResult search_oscillating_instance(
    const SweepRanges& ranges, const OscillationSearchOptions& opts) {
  check_ranges(ranges);
  LowDiscrepancySampler sampler(6, opts.seed);
  OscillationSearchResult result;
  for (std::size_t idx = 0; idx < opts.budget; ++idx) {
    const SweepPoint point = map_point(ranges, sampler.next());
    ++result.evaluated;
    auto params = build_point(point, opts.grid_nodes);
    if (!params || !params->has_kernel()) continue;
    const StrategyProfile truthful = StrategyProfile::identity(*params);
    IterationTrace iteration =
        best_reply_iteration(*params, truthful, opts.iteration);
    if (iteration.status != IterationStatus::kCycleDetected) continue;
    ++result.cycling;
    FlowTrace lower = flow_dynamics(*params, truthful, opts.flow);
    if (lower.status != FlowStatus::kConverged) continue;
    FlowTrace upper = flow_dynamics(
        *params, StrategyProfile::constant_top(*params), opts.flow);
    if (upper.status != FlowStatus::kConverged) continue;
    result.found.push_back({idx, std::move(*params), std::move(iteration),
                            std::move(lower), std::move(upper)});
    if (opts.stop_at_first) break;
  }
  return result;
}

}  // namespace bidgame
