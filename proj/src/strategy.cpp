#include "bidgame/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bidgame {

PlayerStrategy::PlayerStrategy(std::vector<double> costs,
                               std::vector<double> bids)
    : costs_(std::move(costs)), bids_(std::move(bids)) {
  if (costs_.empty() || costs_.size() != bids_.size()) {
    throw std::invalid_argument(
        "PlayerStrategy: costs and bids must be nonempty and aligned");
  }
}

double PlayerStrategy::operator()(double cost) const {
  if (costs_.size() == 1 || cost <= costs_.front()) return bids_.front();
  if (cost >= costs_.back()) return bids_.back();
  const auto it = std::upper_bound(costs_.begin(), costs_.end(), cost);
  const auto k = static_cast<std::size_t>(it - costs_.begin());
  const double c0 = costs_[k - 1];
  const double c1 = costs_[k];
  if (cost == c0) return bids_[k - 1];
  const double frac = (cost - c0) / (c1 - c0);
  return bids_[k - 1] + frac * (bids_[k] - bids_[k - 1]);
}

double PlayerStrategy::min_bid() const {
  return *std::min_element(bids_.begin(), bids_.end());
}

double PlayerStrategy::max_bid() const {
  return *std::max_element(bids_.begin(), bids_.end());
}

StrategyProfile::StrategyProfile(const MarketParams& params,
                                 std::vector<std::vector<double>> bids) {
  if (bids.size() != params.n_players()) {
    throw std::invalid_argument("StrategyProfile: one bid vector per player");
  }
  players_.reserve(bids.size());
  for (std::size_t i = 0; i < bids.size(); ++i) {
    const auto& spec = params.player(i);
    auto& b = bids[i];
    if (b.size() != spec.grid.size()) {
      throw std::invalid_argument(
          "StrategyProfile: bid vector does not match the type grid");
    }
    const double slack =
        1e-12 * std::max({1.0, std::abs(spec.bids.lo()),
                          std::abs(spec.bids.hi())});
    for (double& v : b) {
      if (!(v >= spec.bids.lo() - slack && v <= spec.bids.hi() + slack)) {
        std::ostringstream msg;
        msg << "StrategyProfile: bid " << v << " of player " << i
            << " outside [" << spec.bids.lo() << ", " << spec.bids.hi()
            << "]";
        throw std::invalid_argument(msg.str());
      }
      v = spec.bids.clamp(v);
    }
    const auto nodes = spec.grid.nodes();
    players_.emplace_back(std::vector<double>(nodes.begin(), nodes.end()),
                          std::move(b));
  }
}

StrategyProfile StrategyProfile::from_function(
    const MarketParams& params,
    const std::function<double(std::size_t, double)>& f) {
  std::vector<std::vector<double>> bids(params.n_players());
  for (std::size_t i = 0; i < params.n_players(); ++i) {
    for (double c : params.player(i).grid.nodes()) bids[i].push_back(f(i, c));
  }
  return StrategyProfile(params, std::move(bids));
}

StrategyProfile StrategyProfile::identity(const MarketParams& params) {
  return from_function(params, [&params](std::size_t i, double c) {
    return params.player(i).bids.clamp(c);
  });
}

StrategyProfile StrategyProfile::constant_top(const MarketParams& params) {
  return from_function(params, [&params](std::size_t i, double) {
    return params.player(i).bids.hi();
  });
}

StrategyProfile StrategyProfile::constant(const MarketParams& params,
                                          double bid) {
  return from_function(params, [bid](std::size_t, double) { return bid; });
}

StrategyProfile StrategyProfile::with_player(std::size_t i,
                                             PlayerStrategy strategy) const {
  if (i >= players_.size() ||
      strategy.size() != players_[i].size()) {
    throw std::invalid_argument("StrategyProfile::with_player: bad player");
  }
  StrategyProfile copy = *this;
  copy.players_[i] = std::move(strategy);
  return copy;
}

std::vector<std::vector<double>> StrategyProfile::bid_table() const {
  std::vector<std::vector<double>> out;
  out.reserve(players_.size());
  for (const auto& p : players_) {
    out.emplace_back(p.bids().begin(), p.bids().end());
  }
  return out;
}

double sup_distance(const StrategyProfile& a, const StrategyProfile& b) {
  if (a.n_players() != b.n_players()) {
    throw std::invalid_argument("sup_distance: player count mismatch");
  }
  double dist = 0.0;
  for (std::size_t i = 0; i < a.n_players(); ++i) {
    const auto& pa = a.player(i);
    const auto& pb = b.player(i);
    if (pa.size() != pb.size()) {
      throw std::invalid_argument("sup_distance: grid mismatch");
    }
    for (std::size_t k = 0; k < pa.size(); ++k) {
      dist = std::max(dist, std::abs(pa[k] - pb[k]));
    }
  }
  return dist;
}

bool pointwise_leq(const StrategyProfile& a, const StrategyProfile& b,
                   double tol) {
  if (a.n_players() != b.n_players()) {
    throw std::invalid_argument("pointwise_leq: player count mismatch");
  }
  for (std::size_t i = 0; i < a.n_players(); ++i) {
    const auto& pa = a.player(i);
    const auto& pb = b.player(i);
    if (pa.size() != pb.size()) {
      throw std::invalid_argument("pointwise_leq: grid mismatch");
    }
    for (std::size_t k = 0; k < pa.size(); ++k) {
      if (pa[k] > pb[k] + tol) return false;
    }
  }
  return true;
}

}  // namespace bidgame
