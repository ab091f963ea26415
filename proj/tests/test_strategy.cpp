#include "bidgame/strategy.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace bidgame;

namespace {
MarketParams small() {
  return MarketParams::symmetric(2, Interval(1.0, 2.0), Interval(0.5, 3.0), 1.0, 0.1, {}, 11);
}
}  // namespace

TEST_CASE("piecewise-linear strategies") {
  const PlayerStrategy s({1.0, 2.0, 4.0}, {1.0, 3.0, 4.0});
  CHECK(s(1.0) == 1.0);
  CHECK(s(2.0) == 3.0);
  CHECK(s(4.0) == 4.0);
  CHECK(s(1.5) == doctest::Approx(2.0));
  CHECK(s(3.0) == doctest::Approx(3.5));
  CHECK(s(0.0) == 1.0);
  CHECK(s(9.0) == 4.0);
  CHECK(s.min_bid() == 1.0);
  CHECK(s.max_bid() == 4.0);
  CHECK_THROWS_AS(PlayerStrategy({1.0}, {}), std::invalid_argument);
}

TEST_CASE("evaluation at grid nodes is exact") {
  const auto p = small();
  auto g = fixtures::rng(20);
  const auto prof = StrategyProfile::from_function(
      p, [&](std::size_t, double) { return fixtures::uniform(g, 0.5, 3.0); });
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& s = prof.player(i);
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(s(s.costs()[k]) == s[k]);
  }
}

TEST_CASE("profiles stay in the bid interval") {
  const auto p = small();
  CHECK_THROWS_AS(StrategyProfile::constant(p, 3.5), std::invalid_argument);
  CHECK_THROWS_AS(StrategyProfile::constant(p, 0.1), std::invalid_argument);
  CHECK(StrategyProfile::constant(p, 3.0 + 1e-14).player(0)[0] == 3.0);
  CHECK_THROWS_AS(StrategyProfile(p, {{1.0}, {1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(StrategyProfile(p, {std::vector<double>(11, 1.0)}), std::invalid_argument);

  const auto tight = MarketParams::symmetric(2, Interval(1.0, 2.0), Interval(1.2, 1.8), 1.0, 0.1, {}, 11);
  const auto id = StrategyProfile::identity(tight);
  CHECK(id.player(0)[0] == 1.2);
  CHECK(id.player(0)[5] == doctest::Approx(1.5));
  CHECK(id.player(0)[10] == 1.8);
  CHECK(StrategyProfile::constant_top(tight).player(1)[3] == 1.8);
}

TEST_CASE("distances and ordering") {
  const auto p = small();
  const auto a = StrategyProfile::constant(p, 1.0);
  const auto b = StrategyProfile::constant(p, 1.5);
  CHECK(sup_distance(a, b) == doctest::Approx(0.5));
  CHECK(pointwise_leq(a, b, 0.0));
  CHECK_FALSE(pointwise_leq(b, a, 1e-9));
  const auto c = a.with_player(1, b.player(1));
  CHECK(c.player(1)[0] == 1.5);
  CHECK(c.player(0)[0] == 1.0);
  CHECK_THROWS_AS(a.with_player(2, b.player(0)), std::invalid_argument);
  CHECK(c.bid_table()[1][4] == 1.5);
}
