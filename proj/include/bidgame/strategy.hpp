#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bidgame/model.hpp"

namespace bidgame {

// Bid function of one player, sampled on its type grid and evaluated between
// nodes by linear interpolation (constant beyond the end nodes).
class PlayerStrategy {
 public:
  PlayerStrategy(std::vector<double> costs, std::vector<double> bids);

  std::span<const double> costs() const { return costs_; }
  std::span<const double> bids() const { return bids_; }
  std::size_t size() const { return bids_.size(); }
  double operator[](std::size_t k) const { return bids_[k]; }
  double operator()(double cost) const;

  double min_bid() const;
  double max_bid() const;

 private:
  std::vector<double> costs_;
  std::vector<double> bids_;
};

// One bid function per player; every bid lies inside its player's bid
// interval.
class StrategyProfile {
 public:
  // bids[i] must align with params.player(i).grid. Values within a relative
  // 1e-12 of the bid interval are snapped onto it; anything further out
  // throws std::invalid_argument.
  StrategyProfile(const MarketParams& params,
                  std::vector<std::vector<double>> bids);

  // sigma(c) = c, clamped into the bid interval.
  static StrategyProfile identity(const MarketParams& params);
  // sigma(c) = b^* for every player.
  static StrategyProfile constant_top(const MarketParams& params);
  static StrategyProfile constant(const MarketParams& params, double bid);
  static StrategyProfile from_function(
      const MarketParams& params,
      const std::function<double(std::size_t player, double cost)>& f);

  std::size_t n_players() const { return players_.size(); }
  const PlayerStrategy& player(std::size_t i) const { return players_.at(i); }
  const std::vector<PlayerStrategy>& players() const { return players_; }

  StrategyProfile with_player(std::size_t i, PlayerStrategy strategy) const;
  std::vector<std::vector<double>> bid_table() const;

 private:
  StrategyProfile() = default;
  std::vector<PlayerStrategy> players_;
};

// Largest |a - b| over all players and nodes. Profiles must share grids.
double sup_distance(const StrategyProfile& a, const StrategyProfile& b);

// a <= b + tol at every node.
bool pointwise_leq(const StrategyProfile& a, const StrategyProfile& b,
                   double tol);

}  // namespace bidgame
