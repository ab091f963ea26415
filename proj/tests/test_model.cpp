#include <cmath>
#include <numeric>

#include "bidgame/diagnostics.hpp"
#include "bidgame/model.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace bidgame;

TEST_CASE("intervals") {
  const Interval i(1.0, 2.0);
  CHECK(i.width() == 1.0);
  CHECK(i.contains(1.5));
  CHECK_FALSE(i.contains(2.5));
  CHECK(i.clamp(3.0) == 2.0);
  CHECK(i.clamp(0.0) == 1.0);
  CHECK(i.scaled(2.0).hi() == 4.0);
  CHECK(Interval(0.5, 3.0).contains(i));
  CHECK_THROWS_AS(Interval(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Interval(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Interval(0.0, INFINITY), std::invalid_argument);
  CHECK_THROWS_AS(i.scaled(0.0), std::invalid_argument);
}

TEST_CASE("type grids") {
  const auto g = TypeGrid::uniform(Interval(1.0, 1.3), 51);
  REQUIRE(g.size() == 51);
  CHECK(g[0] == 1.0);
  CHECK(g[50] == 1.3);
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] > g[k - 1]);
  CHECK_THROWS_AS(TypeGrid::uniform(Interval(1.0, 2.0), 1), std::invalid_argument);
  CHECK_THROWS_AS(TypeGrid({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TypeGrid({1.0}), std::invalid_argument);
  CHECK(TypeGrid::point(1.2).is_point());
}

TEST_CASE("trapezoid weights integrate linear functions exactly") {
  auto gen = fixtures::rng(10);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> nodes = {0.0};
    for (int k = 0; k < 20; ++k) nodes.push_back(nodes.back() + fixtures::uniform(gen, 0.01, 1.0));
    const auto w = trapezoid_weights(nodes);
    double integral = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) integral += w[k] * (3.0 * nodes[k] + 1.0);
    const double b = nodes.back();
    CHECK(integral == doctest::Approx(1.5 * b * b + b).epsilon(1e-12));
  }
}

TEST_CASE("densities are normalised") {
  const auto grid = TypeGrid::uniform(Interval(2.0, 5.0), 31);
  SUBCASE("uniform") {
    const auto d = Density::uniform(grid);
    for (double v : d.values()) CHECK(v == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("arbitrary shape") {
    std::vector<double> raw;
    for (double c : grid.nodes()) raw.push_back(std::exp(-c) + 0.1 * c * c);
    const Density d(grid, raw);
    const auto w = trapezoid_weights(grid.nodes());
    double integral = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) integral += w[k] * d.values()[k];
    CHECK(std::abs(integral - 1.0) <= 1e-10);
    const auto m = d.masses();
    CHECK(std::abs(std::accumulate(m.begin(), m.end(), 0.0) - 1.0) <= 1e-12);
  }
  SUBCASE("bad values") {
    CHECK_THROWS_AS(Density(grid, std::vector<double>(31, 0.0)), std::invalid_argument);
    std::vector<double> neg(31, 1.0);
    neg[3] = -1.0;
    CHECK_THROWS_AS(Density(grid, neg), std::invalid_argument);
    CHECK_THROWS_AS(Density(grid, std::vector<double>(5, 1.0)), std::invalid_argument);
  }
}

TEST_CASE("player specs follow their density description") {
  const PlayerSpec point(Interval(1.0, 2.0), Interval(0.5, 3.0), DensitySpec::point_mass(1.5), 51);
  CHECK(point.grid.size() == 1);
  CHECK(point.density.masses()[0] == 1.0);
  CHECK_THROWS(PlayerSpec(Interval(1.0, 2.0), Interval(0.5, 3.0), DensitySpec::point_mass(2.5), 51));

  const PlayerSpec tab(Interval(1.0, 2.0), Interval(0.5, 3.0), DensitySpec::tabulated({1.0, 3.0}), 11);
  // Linear ramp from 1 to 3 normalised to integrate to one: values 0.5 .. 1.5.
  CHECK(tab.density.values()[0] == doctest::Approx(0.5));
  CHECK(tab.density.values()[10] == doctest::Approx(1.5));
}

TEST_CASE("market parameters") {
  const auto p = MarketParams::symmetric(2, Interval(1.0, 1.2), Interval(0.9, 1.6), 1.0, 0.1);
  CHECK(p.n_players() == 2);
  CHECK(p.has_kernel());
  CHECK(p.kernel().name() == "electricity_two_node");
  CHECK(p.player(0).grid.size() == kDefaultGridNodes);
  CHECK(p.regridded(11).player(1).grid.size() == 11);

  const auto s = p.scaled(2.0);
  CHECK(s.player(0).types.lo() == 2.0);
  CHECK(s.player(0).bids.hi() == doctest::Approx(3.2));
  CHECK(s.demand() == p.demand());

  CHECK_THROWS_AS(MarketParams::symmetric(2, Interval(1, 2), Interval(1, 3), -1.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(MarketParams::symmetric(2, Interval(1, 2), Interval(1, 3), 1.0, 0.0),
                  std::invalid_argument);
  const auto hot = MarketParams::symmetric(2, Interval(1, 2), Interval(1, 3), 1.0, 0.6);
  CHECK_FALSE(hot.has_kernel());
  CHECK_THROWS_AS(hot.kernel(), DomainError);
  const auto three = MarketParams::symmetric(3, Interval(1, 2), Interval(1, 3), 1.0, 0.1);
  CHECK_FALSE(three.has_kernel());
}

TEST_CASE("validity flags") {
  SUBCASE("report lists every flag without aborting") {
    const auto p = MarketParams::symmetric(2, Interval(1, 2), Interval(1, 3), 1.0, 0.6);
    const auto report = validate_params(p);
    CHECK(report.flags.size() == all_flag_names().size());
    CHECK_FALSE(report.flag(flags::kLossProductBelowHalf).pass);
    CHECK(std::isnan(report.flag(flags::kBidBoundWithinBox).margin));
  }
  SUBCASE("wide bid box puts the corner bid out of the interior") {
    const auto p = MarketParams::symmetric(2, Interval(1.0, 1.2), Interval(1.0, 1.9), 1.0, 0.1);
    const auto& f = validate_params(p).flag(flags::kInteriorKernelOnBox);
    CHECK_FALSE(f.pass);
    const double u = 0.9 / 2.9;
    CHECK(f.margin == doctest::Approx(1.0 + u * u / 0.2 - u / 0.1));
    CHECK(f.margin == doctest::Approx(1.0 + 0.4815 - 3.1034).epsilon(1e-4));
  }
  SUBCASE("bid ratio") {
    const auto p = MarketParams::symmetric(2, Interval(1.0, 1.2), Interval(1.0, 2.5), 1.0, 0.1);
    CHECK_FALSE(validate_params(p).flag(flags::kBidRatioBelowTwo).pass);
  }
  SUBCASE("sweep instances meet the default flags") {
    for (const auto& p : fixtures::feasible_instances(5)) {
      const auto report = validate_params(p);
      CHECK(report.passes(default_required_flags()));
    }
  }
  SUBCASE("unknown flag name") {
    const auto p = fixtures::feasible_instance();
    CHECK_THROWS_AS(validate_params(p).flag("nope"), std::invalid_argument);
  }
}

TEST_CASE("the interior-corner flag conflicts with containment and the bid bound") {
  // Whenever types sit inside bids and the bound fits, F(b^*, b_*) < 0.
  auto g = fixtures::rng(11);
  int tested = 0;
  while (tested < 2000) {
    const double d = fixtures::uniform(g, 0.1, 3.0);
    const double r = fixtures::uniform(g, 1e-3, 0.5 / d);
    const double c_lo = fixtures::uniform(g, 0.5, 2.0);
    const double c_hi = c_lo * fixtures::uniform(g, 1.0001, 1.5);
    const double b_lo = c_lo * fixtures::uniform(g, 0.5, 1.0);
    const double b_hi = c_hi / (1 - 2 * d * r) * fixtures::uniform(g, 1.0, 1.5);
    ++tested;
    CHECK(kernel_F(b_hi, b_lo, d, r) < 0.0);
  }

  SweepOptions opts;
  opts.required = all_flag_names();
  const SweepRanges broad{{0.1, 3.0}, {0.001, 0.5}, {0.5, 2.0},
                          {0.5, 3.0}, {0.2, 2.0}, {0.5, 6.0}};
  const auto result = feasibility_search(broad, opts);
  CHECK(result.evaluated == 10000);
  CHECK(result.candidates.empty());
  CHECK(result.best_satisfied == 5);
}
