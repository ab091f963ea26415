#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bidgame/kernel.hpp"

namespace bidgame {

// Closed interval [lo, hi] with lo < hi.
class Interval {
 public:
  Interval(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& other) const {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }
  double clamp(double x) const;
  Interval scaled(double factor) const;

 private:
  double lo_;
  double hi_;
};

// Discretisation of a type interval. Either at least two strictly increasing
// nodes spanning the interval, or a single node (point-mass types).
class TypeGrid {
 public:
  explicit TypeGrid(std::vector<double> nodes);
  static TypeGrid uniform(const Interval& span, std::size_t nodes);
  static TypeGrid point(double type);

  std::span<const double> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t k) const { return nodes_[k]; }
  bool is_point() const { return nodes_.size() == 1; }

 private:
  struct PointTag {};
  TypeGrid(PointTag, double type);

  std::vector<double> nodes_;
};

// Composite trapezoid weights of a grid (a single node gets weight 1).
std::vector<double> trapezoid_weights(std::span<const double> nodes);

// Type density sampled at grid nodes, normalised so that its trapezoid
// integral over the grid is one. masses() are the matching probability
// weights (trapezoid weight times density).
class Density {
 public:
  Density(const TypeGrid& grid, std::vector<double> values);
  static Density uniform(const TypeGrid& grid);

  std::span<const double> values() const { return values_; }
  std::span<const double> masses() const { return masses_; }

 private:
  std::vector<double> values_;
  std::vector<double> masses_;
};

// How a player's density is specified independently of the grid, so that the
// instance can be regridded.
struct DensitySpec {
  enum class Kind { kUniform, kPointMass, kTabulated };

  static DensitySpec uniform() { return {}; }
  static DensitySpec point_mass(double at);
  static DensitySpec tabulated(std::vector<double> values);

  Kind kind = Kind::kUniform;
  double at = 0.0;
  // Density values at uniformly spaced types from lo to hi, interpolated
  // linearly onto whatever grid is requested.
  std::vector<double> values;
};

struct PlayerSpec {
  PlayerSpec(Interval types, Interval bids, DensitySpec density_spec,
             std::size_t nodes);

  Interval types;
  Interval bids;
  DensitySpec density_spec;
  TypeGrid grid;
  Density density;
};

inline constexpr std::size_t kDefaultGridNodes = 51;

// Full game instance: per-player type and bid intervals, densities, demand d
// and loss coefficient r, plus the market kernel (the two-node electricity
// kernel unless replaced).
class MarketParams {
 public:
  MarketParams(std::vector<PlayerSpec> players, double demand,
               double loss_coeff);

  // Two-player (or n-player) instance where everybody shares the same data.
  static MarketParams symmetric(std::size_t n_players, Interval types,
                                Interval bids, double demand,
                                double loss_coeff,
                                const DensitySpec& density = {},
                                std::size_t nodes = kDefaultGridNodes);

  MarketParams with_kernel(std::shared_ptr<const KernelModel> kernel) const;
  MarketParams regridded(std::size_t nodes) const;
  // Multiplies every type, bid and interval endpoint by factor.
  MarketParams scaled(double factor) const;

  std::size_t n_players() const { return players_.size(); }
  const PlayerSpec& player(std::size_t i) const { return players_.at(i); }
  const std::vector<PlayerSpec>& players() const { return players_; }
  double demand() const { return demand_; }
  double loss_coeff() const { return loss_coeff_; }
  bool has_kernel() const { return kernel_ != nullptr; }
  // Throws DomainError when no kernel could be built (2 d r > 1).
  const KernelModel& kernel() const;
  std::shared_ptr<const KernelModel> kernel_ptr() const { return kernel_; }

  double min_cost() const;
  double max_cost() const;
  double min_bid_floor() const;
  double max_bid_ceiling() const;
  // Smallest bid-interval width over players.
  double min_bid_width() const;

 private:
  std::vector<PlayerSpec> players_;
  double demand_;
  double loss_coeff_;
  std::shared_ptr<const KernelModel> kernel_;
};

struct ValidityFlag {
  std::string name;
  bool pass = false;
  // Signed slack; positive when the condition holds. NaN when undefined.
  double margin = 0.0;
  std::string detail;
};

struct ValidityReport {
  std::vector<ValidityFlag> flags;

  bool all_pass() const;
  // True when every named flag passes. Unknown names throw.
  bool passes(std::span<const std::string> names) const;
  const ValidityFlag& flag(const std::string& name) const;
  std::size_t satisfied_count() const;
};

namespace flags {
inline constexpr const char* kCostFloorPositive = "cost_floor_positive";
inline constexpr const char* kTypesWithinBids = "types_within_bids";
inline constexpr const char* kLossProductBelowHalf = "loss_product_below_half";
inline constexpr const char* kBidRatioBelowTwo = "bid_ratio_below_two";
inline constexpr const char* kInteriorKernelOnBox = "interior_kernel_on_box";
inline constexpr const char* kBidBoundWithinBox = "bid_bound_within_box";
}  // namespace flags

// Every flag in report order.
const std::vector<std::string>& all_flag_names();
// The flags that can hold simultaneously; interior_kernel_on_box is excluded
// because together with types_within_bids and bid_bound_within_box it is
// never satisfiable.
const std::vector<std::string>& default_required_flags();

ValidityReport validate_params(const MarketParams& params);

}  // namespace bidgame
