#include "bidgame/payoff.hpp"

#include <stdexcept>
#include <vector>

namespace bidgame {

QuadratureRule QuadratureRule::for_player(const MarketParams& params,
                                          std::size_t player) {
  return QuadratureRule(params.player(player).density.masses());
}

double QuadratureRule::apply(std::span<const double> values) const {
  if (values.size() != weights_.size()) {
    throw std::invalid_argument("QuadratureRule::apply: size mismatch");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    sum += weights_[k] * values[k];
  }
  return sum;
}

double pointwise_payoff(double own_bid, double cost,
                        std::span<const double> opp_bids,
                        const KernelModel& model) {
  return (own_bid - cost) * model.eval(own_bid, opp_bids);
}

namespace {

// Sums weight * integrand(opponent bids) over the product of opponent grids.
template <typename Integrand>
double integrate_opponents(const MarketParams& params, std::size_t player,
                           const StrategyProfile& profile,
                           Integrand&& integrand) {
  const std::size_t n = params.n_players();
  if (player >= n) {
    throw std::invalid_argument("expected_payoff: player index out of range");
  }
  if (profile.n_players() != n) {
    throw std::invalid_argument("expected_payoff: profile/params mismatch");
  }

  if (n == 2) {
    const std::size_t j = 1 - player;
    const auto w = params.player(j).density.masses();
    const auto bids = profile.player(j).bids();
    double sum = 0.0;
    for (std::size_t k = 0; k < bids.size(); ++k) {
      const double y = bids[k];
      sum += w[k] * integrand(std::span<const double>(&y, 1));
    }
    return sum;
  }

  std::vector<std::size_t> opponents;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != player) opponents.push_back(j);
  }
  std::vector<std::size_t> index(opponents.size(), 0);
  std::vector<double> opp_bids(opponents.size());
  double sum = 0.0;
  while (true) {
    double weight = 1.0;
    for (std::size_t m = 0; m < opponents.size(); ++m) {
      const std::size_t j = opponents[m];
      weight *= params.player(j).density.masses()[index[m]];
      opp_bids[m] = profile.player(j)[index[m]];
    }
    if (weight > 0.0) sum += weight * integrand(opp_bids);
    std::size_t m = 0;
    for (; m < opponents.size(); ++m) {
      if (++index[m] < params.player(opponents[m]).grid.size()) break;
      index[m] = 0;
    }
    if (m == opponents.size()) break;
  }
  return sum;
}

}  // namespace

double expected_payoff(const MarketParams& params, std::size_t player,
                       double own_bid, double cost,
                       const StrategyProfile& profile) {
  const KernelModel& model = params.kernel();
  const double margin = own_bid - cost;
  return integrate_opponents(
      params, player, profile, [&](std::span<const double> opp) {
        return margin * model.eval(own_bid, opp);
      });
}

double expected_payoff_gradient(const MarketParams& params,
                                std::size_t player, double own_bid,
                                double cost, const StrategyProfile& profile) {
  const KernelModel& model = params.kernel();
  const double margin = own_bid - cost;
  return integrate_opponents(
      params, player, profile, [&](std::span<const double> opp) {
        return model.eval(own_bid, opp) +
               margin * model.partial_own(own_bid, opp);
      });
}

}  // namespace bidgame
