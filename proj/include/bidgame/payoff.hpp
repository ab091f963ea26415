#pragma once

#include <cstddef>
#include <span>

#include "bidgame/kernel.hpp"
#include "bidgame/model.hpp"
#include "bidgame/strategy.hpp"

namespace bidgame {

// Composite trapezoid probability weights for one player's type grid,
// already multiplied by the density. Non-owning view into the params.
class QuadratureRule {
 public:
  static QuadratureRule for_player(const MarketParams& params,
                                   std::size_t player);

  std::span<const double> weights() const { return weights_; }
  double apply(std::span<const double> values) const;

 private:
  explicit QuadratureRule(std::span<const double> w) : weights_(w) {}
  std::span<const double> weights_;
};

// pi = (own_bid - cost) * K(own_bid, opp_bids).
double pointwise_payoff(double own_bid, double cost,
                        std::span<const double> opp_bids,
                        const KernelModel& model);

inline double pointwise_payoff(double own_bid, double cost, double opp_bid,
                               const KernelModel& model) {
  return pointwise_payoff(own_bid, cost, std::span<const double>(&opp_bid, 1),
                          model);
}

// Ex-ante payoff of `player` bidding own_bid with type cost while the others
// follow `profile` (the player's own entry is ignored). Opponent types are
// independent, so the integral is a tensor product of per-player rules.
double expected_payoff(const MarketParams& params, std::size_t player,
                       double own_bid, double cost,
                       const StrategyProfile& profile);

// d/d(own_bid) of expected_payoff, integrating K + (b - c) dK/db with the
// kernel's own-bid derivative (one-sided on branch switches).
double expected_payoff_gradient(const MarketParams& params,
                                std::size_t player, double own_bid,
                                double cost, const StrategyProfile& profile);

}  // namespace bidgame
