#include "bidgame/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bidgame {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    std::ostringstream msg;
    msg << "Interval: need finite lo < hi, got [" << lo << ", " << hi << "]";
    throw std::invalid_argument(msg.str());
  }
}

double Interval::clamp(double x) const { return std::clamp(x, lo_, hi_); }

Interval Interval::scaled(double factor) const {
  if (!(factor > 0.0)) {
    throw std::invalid_argument("Interval::scaled: factor must be positive");
  }
  return Interval(lo_ * factor, hi_ * factor);
}

TypeGrid::TypeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) {
    throw std::invalid_argument("TypeGrid: at least two nodes required");
  }
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (!std::isfinite(nodes_[k])) {
      throw std::invalid_argument("TypeGrid: nodes must be finite");
    }
    if (k > 0 && !(nodes_[k] > nodes_[k - 1])) {
      throw std::invalid_argument("TypeGrid: nodes must strictly increase");
    }
  }
}

TypeGrid::TypeGrid(PointTag, double type) : nodes_{type} {
  if (!std::isfinite(type)) {
    throw std::invalid_argument("TypeGrid: point type must be finite");
  }
}

TypeGrid TypeGrid::uniform(const Interval& span, std::size_t nodes) {
  if (nodes < 2) {
    throw std::invalid_argument("TypeGrid::uniform: at least two nodes");
  }
  std::vector<double> x(nodes);
  const double step = span.width() / static_cast<double>(nodes - 1);
  for (std::size_t k = 0; k < nodes; ++k) {
    x[k] = span.lo() + static_cast<double>(k) * step;
  }
  x.back() = span.hi();
  return TypeGrid(std::move(x));
}

TypeGrid TypeGrid::point(double type) { return TypeGrid(PointTag{}, type); }

std::vector<double> trapezoid_weights(std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  if (n == 0) return {};
  if (n == 1) return {1.0};
  std::vector<double> w(n);
  w.front() = 0.5 * (nodes[1] - nodes[0]);
  w.back() = 0.5 * (nodes[n - 1] - nodes[n - 2]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    w[k] = 0.5 * (nodes[k + 1] - nodes[k - 1]);
  }
  return w;
}

Density::Density(const TypeGrid& grid, std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.size() != grid.size()) {
    throw std::invalid_argument("Density: one value per grid node required");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("Density: values must be finite and >= 0");
    }
  }
  const auto w = trapezoid_weights(grid.nodes());
  double integral = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) integral += w[k] * values_[k];
  if (!(integral > 0.0)) {
    throw std::invalid_argument("Density: zero total mass");
  }
  masses_.resize(values_.size());
  for (std::size_t k = 0; k < values_.size(); ++k) {
    values_[k] /= integral;
    masses_[k] = w[k] * values_[k];
  }
  const double total = std::accumulate(masses_.begin(), masses_.end(), 0.0);
  for (double& m : masses_) m /= total;
}

Density Density::uniform(const TypeGrid& grid) {
  return Density(grid, std::vector<double>(grid.size(), 1.0));
}

DensitySpec DensitySpec::point_mass(double at) {
  DensitySpec spec;
  spec.kind = Kind::kPointMass;
  spec.at = at;
  return spec;
}

DensitySpec DensitySpec::tabulated(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("DensitySpec: empty tabulated density");
  }
  DensitySpec spec;
  spec.kind = Kind::kTabulated;
  spec.values = std::move(values);
  return spec;
}

namespace {

TypeGrid make_grid(const Interval& types, const DensitySpec& spec,
                   std::size_t nodes) {
  if (spec.kind == DensitySpec::Kind::kPointMass) {
    if (!types.contains(spec.at)) {
      throw std::invalid_argument(
          "PlayerSpec: point-mass type outside the type interval");
    }
    return TypeGrid::point(spec.at);
  }
  return TypeGrid::uniform(types, nodes);
}

Density make_density(const Interval& types, const DensitySpec& spec,
                     const TypeGrid& grid) {
  switch (spec.kind) {
    case DensitySpec::Kind::kPointMass:
    case DensitySpec::Kind::kUniform:
      return Density::uniform(grid);
    case DensitySpec::Kind::kTabulated:
      break;
  }
  const auto& tab = spec.values;
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (tab.size() == 1) {
      values[k] = tab[0];
      continue;
    }
    const double pos = (grid[k] - types.lo()) / types.width() *
                       static_cast<double>(tab.size() - 1);
    const auto j = std::min(static_cast<std::size_t>(std::max(pos, 0.0)),
                            tab.size() - 2);
    const double frac = std::clamp(pos - static_cast<double>(j), 0.0, 1.0);
    values[k] = (1.0 - frac) * tab[j] + frac * tab[j + 1];
  }
  return Density(grid, std::move(values));
}

}  // namespace

PlayerSpec::PlayerSpec(Interval types_in, Interval bids_in,
                       DensitySpec density_spec_in, std::size_t nodes)
    : types(types_in),
      bids(bids_in),
      density_spec(std::move(density_spec_in)),
      grid(make_grid(types, density_spec, nodes)),
      density(make_density(types, density_spec, grid)) {}

MarketParams::MarketParams(std::vector<PlayerSpec> players, double demand,
                           double loss_coeff)
    : players_(std::move(players)), demand_(demand), loss_coeff_(loss_coeff) {
  if (players_.empty()) {
    throw std::invalid_argument("MarketParams: at least one player");
  }
  if (!std::isfinite(demand) || !(demand > 0.0)) {
    throw std::invalid_argument("MarketParams: demand must be positive");
  }
  if (!std::isfinite(loss_coeff) || !(loss_coeff > 0.0)) {
    throw std::invalid_argument(
        "MarketParams: loss coefficient must be positive");
  }
  if (players_.size() == 2 && 2.0 * demand * loss_coeff <= 1.0) {
    kernel_ = std::make_shared<ElectricityKernel>(demand, loss_coeff);
  }
}

MarketParams MarketParams::symmetric(std::size_t n_players, Interval types,
                                     Interval bids, double demand,
                                     double loss_coeff,
                                     const DensitySpec& density,
                                     std::size_t nodes) {
  std::vector<PlayerSpec> players;
  players.reserve(n_players);
  for (std::size_t i = 0; i < n_players; ++i) {
    players.emplace_back(types, bids, density, nodes);
  }
  return MarketParams(std::move(players), demand, loss_coeff);
}

MarketParams MarketParams::with_kernel(
    std::shared_ptr<const KernelModel> kernel) const {
  if (!kernel) {
    throw std::invalid_argument("MarketParams::with_kernel: null kernel");
  }
  MarketParams copy = *this;
  copy.kernel_ = std::move(kernel);
  return copy;
}

MarketParams MarketParams::regridded(std::size_t nodes) const {
  std::vector<PlayerSpec> players;
  players.reserve(players_.size());
  for (const auto& p : players_) {
    players.emplace_back(p.types, p.bids, p.density_spec, nodes);
  }
  MarketParams copy(std::move(players), demand_, loss_coeff_);
  copy.kernel_ = kernel_;
  return copy;
}

MarketParams MarketParams::scaled(double factor) const {
  std::vector<PlayerSpec> players;
  players.reserve(players_.size());
  for (const auto& p : players_) {
    DensitySpec spec = p.density_spec;
    spec.at *= factor;
    players.emplace_back(p.types.scaled(factor), p.bids.scaled(factor), spec,
                         p.grid.size());
  }
  MarketParams copy(std::move(players), demand_, loss_coeff_);
  copy.kernel_ = kernel_;
  return copy;
}

const KernelModel& MarketParams::kernel() const {
  if (!kernel_) {
    throw DomainError(
        "MarketParams: no kernel available (the built-in kernel needs two "
        "players and 2 d r <= 1)");
  }
  return *kernel_;
}

double MarketParams::min_cost() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& p : players_) v = std::min(v, p.types.lo());
  return v;
}

double MarketParams::max_cost() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& p : players_) v = std::max(v, p.types.hi());
  return v;
}

double MarketParams::min_bid_floor() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& p : players_) v = std::min(v, p.bids.lo());
  return v;
}

double MarketParams::max_bid_ceiling() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& p : players_) v = std::max(v, p.bids.hi());
  return v;
}

double MarketParams::min_bid_width() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& p : players_) v = std::min(v, p.bids.width());
  return v;
}

bool ValidityReport::all_pass() const {
  return std::all_of(flags.begin(), flags.end(),
                     [](const ValidityFlag& f) { return f.pass; });
}

const ValidityFlag& ValidityReport::flag(const std::string& name) const {
  for (const auto& f : flags) {
    if (f.name == name) return f;
  }
  throw std::invalid_argument("unknown validity flag '" + name + "'");
}

bool ValidityReport::passes(std::span<const std::string> names) const {
  return std::all_of(names.begin(), names.end(),
                     [this](const std::string& n) { return flag(n).pass; });
}

std::size_t ValidityReport::satisfied_count() const {
  return static_cast<std::size_t>(
      std::count_if(flags.begin(), flags.end(),
                    [](const ValidityFlag& f) { return f.pass; }));
}

const std::vector<std::string>& all_flag_names() {
  static const std::vector<std::string> names = {
      flags::kCostFloorPositive,    flags::kTypesWithinBids,
      flags::kLossProductBelowHalf, flags::kBidRatioBelowTwo,
      flags::kInteriorKernelOnBox,  flags::kBidBoundWithinBox};
  return names;
}

const std::vector<std::string>& default_required_flags() {
  static const std::vector<std::string> names = {
      flags::kCostFloorPositive, flags::kTypesWithinBids,
      flags::kLossProductBelowHalf, flags::kBidRatioBelowTwo,
      flags::kBidBoundWithinBox};
  return names;
}

ValidityReport validate_params(const MarketParams& params) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  ValidityReport report;
  auto add = [&report](const char* name, bool pass, double margin,
                       std::string detail) {
    report.flags.push_back({name, pass, margin, std::move(detail)});
  };

  const double c_lo = params.min_cost();
  const double c_hi = params.max_cost();
  const double b_lo = params.min_bid_floor();
  const double b_hi = params.max_bid_ceiling();
  const double d = params.demand();
  const double r = params.loss_coeff();

  add(flags::kCostFloorPositive, c_lo > 0.0, c_lo, "c_* > 0");

  double containment = std::numeric_limits<double>::infinity();
  for (const auto& p : params.players()) {
    containment = std::min({containment, p.types.lo() - p.bids.lo(),
                            p.bids.hi() - p.types.hi()});
  }
  add(flags::kTypesWithinBids, containment >= 0.0, containment,
      "type interval inside bid interval");

  const double loss_slack = 1.0 - 2.0 * d * r;
  add(flags::kLossProductBelowHalf, loss_slack > 0.0, loss_slack, "2 d r < 1");

  const double ratio_slack = 2.0 * b_lo - b_hi;
  add(flags::kBidRatioBelowTwo, ratio_slack > 0.0, ratio_slack, "b^* < 2 b_*");

  double f_corner = kNaN;
  try {
    f_corner = kernel_F(b_hi, b_lo, d, r);
  } catch (const DomainError&) {
  }
  add(flags::kInteriorKernelOnBox, f_corner >= 0.0, f_corner,
      "F(b^*, b_*) >= 0");

  double bound_slack = kNaN;
  if (loss_slack > 0.0) {
    double ceiling = std::numeric_limits<double>::infinity();
    for (const auto& p : params.players()) {
      ceiling = std::min(ceiling, p.bids.hi());
    }
    bound_slack = ceiling - c_hi / loss_slack;
  }
  add(flags::kBidBoundWithinBox, bound_slack >= 0.0, bound_slack,
      "c^* / (1 - 2 r d) <= b^*");
  return report;
}

}  // namespace bidgame
