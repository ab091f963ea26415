#include <cmath>
#include <memory>
#include <set>

#include "bidgame/diagnostics.hpp"
#include "bidgame/kernel.hpp"
#include "bidgame/sampling.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace bidgame;

namespace {

// The electricity kernel with the corner allocation replaced by zero: a
// bidder far below its rival is priced out instead of serving everything.
class NoCorner final : public KernelModel {
 public:
  NoCorner(double d, double r) : base_(d, r) {}
  double eval(double own, std::span<const double> opp) const override {
    return base_.branch(own, opp[0]) == KernelBranch::kCorner ? 0.0 : base_.eval(own, opp);
  }
  double partial_own(double own, std::span<const double> opp) const override {
    return base_.partial_own(own, opp);
  }
  double upper_bound() const override { return base_.upper_bound(); }
  bool smooth_at(double own, std::span<const double> opp) const override {
    return base_.smooth_at(own, opp);
  }
  std::optional<PayoffPartials> payoff_partials(double own, std::span<const double> opp,
                                                double c) const override {
    return base_.payoff_partials(own, opp, c);
  }
  std::string name() const override { return "no_corner"; }

 private:
  ElectricityKernel base_;
};

// K = A - x + y: well behaved except that it depends on the bid gap in
// absolute terms.
class AdditiveGap final : public KernelModel {
 public:
  double eval(double own, std::span<const double> opp) const override {
    return 3.0 - own + opp[0];
  }
  double partial_own(double, std::span<const double>) const override { return -1.0; }
  double upper_bound() const override { return 5.0; }
  std::optional<PayoffPartials> payoff_partials(double, std::span<const double>,
                                                double) const override {
    return PayoffPartials{1.0, -2.0, 1.0};
  }
  std::string name() const override { return "additive_gap"; }
};

// K = A exp(-k x / y) with k = 2. The payoff is concave in the own bid while
// x - c < y, but the cross partial turns negative for high own bids.
class ExpRatio final : public KernelModel {
 public:
  double eval(double own, std::span<const double> opp) const override {
    return std::exp(-k * own / opp[0]);
  }
  double partial_own(double own, std::span<const double> opp) const override {
    return -k / opp[0] * eval(own, opp);
  }
  double upper_bound() const override { return 1.0; }
  std::optional<PayoffPartials> payoff_partials(double x, std::span<const double> opp,
                                                double c) const override {
    const double y = opp[0];
    const double e = eval(x, opp);
    return PayoffPartials{e * k / (y * y) * (x * (1 - k * (x - c) / y) + x - c),
                          e * k / (y * y) * (k * (x - c) - 2 * y), e * k / y};
  }
  std::string name() const override { return "exp_ratio"; }

 private:
  static constexpr double k = 2.0;
};

const char* const kAssumptionChecks[] = {
    checks::kKernelMonotonicity, checks::kIncreasingDifferences, checks::kPayoffConcavity,
    checks::kCostCrossPartial,   checks::kBestReplyTypeMonotone, checks::kScalingInvariance};

// Names of the failing entries of a report.
std::set<std::string> failures(const AssumptionReport& report) {
  std::set<std::string> out;
  for (const auto& e : report.entries) {
    if (!e.pass) out.insert(e.name);
  }
  return out;
}

DiagnosticsOptions quick() {
  DiagnosticsOptions o;
  o.samples = 400;
  return o;
}

}  // namespace

TEST_CASE("low-discrepancy sampler") {
  LowDiscrepancySampler a(6, 7), b(6, 7), c(6, 8);
  bool differs = false;
  for (int n = 0; n < 500; ++n) {
    const auto u = a.next();
    REQUIRE(u.size() == 6);
    for (double v : u) {
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
    CHECK(u == b.next());
    if (u != c.next()) differs = true;
  }
  CHECK(differs);
  CHECK_THROWS_AS(LowDiscrepancySampler(0, 1), std::invalid_argument);
  CHECK(lerp_unit(0.25, 2.0, 6.0) == 3.0);
}

TEST_CASE("sampler fills the unit cube evenly") {
  // Each of the 8 octants of [0,1)^3 should hold close to 1/8 of the points.
  LowDiscrepancySampler s(3, kDefaultSeed);
  int counts[8] = {};
  const int n = 4096;
  for (int k = 0; k < n; ++k) {
    const auto u = s.next();
    ++counts[(u[0] >= 0.5) + 2 * (u[1] >= 0.5) + 4 * (u[2] >= 0.5)];
  }
  for (int c : counts) CHECK(std::abs(c - n / 8) <= 16);
}

TEST_CASE("a feasible instance passes every certificate") {
  const auto p = fixtures::feasible_instance();
  const auto result = extremal_equilibria(p);
  REQUIRE(result.verdict == Verdict::kUnique);
  const auto report = run_all_checks(p, result, 1e-4);
  CHECK(failures(report).empty());
  for (const auto& e : report.entries) {
    INFO(e.name);
    CHECK(e.samples > 0);
    CHECK(std::isfinite(e.margin));
    CHECK(e.margin >= 0.0);
  }
  for (const char* name : {checks::kBidBounds, checks::kBestReplyContinuity, checks::kAlphaBound,
                           checks::kUniqueness, checks::kPartialXyFd}) {
    CHECK(report.has(name));
  }
  CHECK(report.entry(checks::kBestReplyTypeMonotone).note.find("computed equilibria") !=
        std::string::npos);
  CHECK_THROWS_AS(report.entry("no_such_check"), std::out_of_range);
}

TEST_CASE("reports are deterministic under a fixed seed") {
  const auto p = fixtures::feasible_instance(21);
  const auto a = run_instance_checks(p, quick());
  const auto b = run_instance_checks(p, quick());
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    CHECK(a.entries[k].name == b.entries[k].name);
    CHECK(a.entries[k].pass == b.entries[k].pass);
    CHECK(a.entries[k].witness == b.entries[k].witness);
    if (std::isfinite(a.entries[k].margin)) CHECK(a.entries[k].margin == b.entries[k].margin);
  }
}

TEST_CASE("sample counts below two are rejected") {
  const auto p = fixtures::feasible_instance(11);
  CHECK_THROWS_AS(check_kernel_monotonicity(p, 1), std::invalid_argument);
  CHECK_THROWS_AS(check_kernel_monotonicity(p, 0), std::invalid_argument);
}

TEST_CASE("negative controls fail only their own check") {
  const auto base = fixtures::feasible_instance(21);

  SUBCASE("monotonicity") {
    const auto p = base.with_kernel(std::make_shared<NoCorner>(base.demand(), base.loss_coeff()));
    const auto report = run_instance_checks(p, quick());
    CHECK(failures(report) == std::set<std::string>{checks::kKernelMonotonicity});
    CHECK(report.entry(checks::kKernelMonotonicity).margin < 0.0);
  }
  SUBCASE("scaling invariance") {
    const auto p = MarketParams::symmetric(2, Interval(1.0, 1.2), Interval(1.0, 3.0), 1.0, 0.1, {}, 21)
                       .with_kernel(std::make_shared<AdditiveGap>());
    const auto report = run_instance_checks(p, quick());
    CHECK(failures(report) == std::set<std::string>{checks::kScalingInvariance});
  }
  SUBCASE("increasing differences") {
    const auto p = MarketParams::symmetric(2, Interval(1.0, 1.2), Interval(1.0, 1.9), 1.0, 0.1, {}, 21)
                       .with_kernel(std::make_shared<ExpRatio>());
    const auto report = run_instance_checks(p, quick());
    CHECK(failures(report) == std::set<std::string>{checks::kIncreasingDifferences});
    const auto& e = report.entry(checks::kIncreasingDifferences);
    CHECK(e.margin < 0.0);
    CHECK_FALSE(e.witness.empty());
  }
  SUBCASE("every control is covered by one assumption check") {
    const auto report = run_instance_checks(base, quick());
    for (const char* name : kAssumptionChecks) CHECK(report.has(name));
  }
}

TEST_CASE("bid bounds bracket the full-information benchmark") {
  const auto p = fixtures::full_information(1.0, 1.0, 0.1, 0.9, 1.4);
  const auto r = extremal_equilibria(p);
  const auto e = check_bid_bounds(p, r);
  CHECK(e.pass);
  CHECK(e.margin >= -e.tolerance);
}

TEST_CASE("feasibility search") {
  SUBCASE("budget of one evaluates exactly one point") {
    SweepOptions o;
    o.budget = 1;
    const auto r = feasibility_search(fixtures::narrow_ranges(), o);
    CHECK(r.evaluated == 1);
    CHECK(r.candidates.size() <= 1);
  }
  SUBCASE("zero budget and unknown flags are rejected") {
    SweepOptions o;
    o.budget = 0;
    CHECK_THROWS_AS(feasibility_search(fixtures::narrow_ranges(), o), std::invalid_argument);
    o.budget = 10;
    o.required = {"not_a_flag"};
    CHECK_THROWS_AS(feasibility_search(fixtures::narrow_ranges(), o), std::invalid_argument);
  }
  SUBCASE("a single attainable flag yields candidates") {
    SweepOptions o;
    o.budget = 200;
    o.required = {flags::kLossProductBelowHalf};
    const auto r = feasibility_search(fixtures::oscillation_ranges(), o);
    CHECK_FALSE(r.candidates.empty());
    for (const auto& c : r.candidates) CHECK(c.validity.flag(flags::kLossProductBelowHalf).pass);
  }
  SUBCASE("candidates are ordered and reproducible") {
    SweepOptions o;
    o.budget = 2000;
    const auto a = feasibility_search(fixtures::narrow_ranges(), o);
    const auto b = feasibility_search(fixtures::narrow_ranges(), o);
    REQUIRE(a.candidates.size() == b.candidates.size());
    REQUIRE_FALSE(a.candidates.empty());
    for (std::size_t k = 0; k < a.candidates.size(); ++k) {
      CHECK(a.candidates[k].index == b.candidates[k].index);
      if (k > 0) {
        const auto& prev = a.candidates[k - 1];
        const auto& cur = a.candidates[k];
        CHECK((prev.satisfied > cur.satisfied ||
               (prev.satisfied == cur.satisfied && prev.margin >= cur.margin)));
      }
      CHECK(a.candidates[k].margin >= 0.0);
    }
    CHECK(a.evaluated == 2000);
  }
}

TEST_CASE("oscillation search finds a cycling instance with convergent flows") {
  OscillationSearchOptions o;
  o.budget = 60;
  const auto r = search_oscillating_instance(fixtures::oscillation_ranges(), o);
  REQUIRE(r.found.size() == 1);
  const auto& w = r.found.front();
  CHECK(w.iteration.status == IterationStatus::kCycleDetected);
  CHECK(w.iteration.period >= 2);
  CHECK(w.lower_flow.status == FlowStatus::kConverged);
  CHECK(w.upper_flow.status == FlowStatus::kConverged);
  CHECK(r.cycling >= 1);
  CHECK(r.evaluated == w.index + 1);
}
