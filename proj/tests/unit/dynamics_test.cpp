#include <doctest.h>

#include <cmath>
#include <vector>

#include "percotree/child_sequence.hpp"
#include "percotree/dynamics.hpp"
#include "percotree/percolation.hpp"
#include "percotree/truncation.hpp"

using namespace percotree;

namespace {

TreeTruncation single_edge() { return truncate(ChildSequence::constant(1), 1); }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("occupation by interval arithmetic") {
  Timeline empty;
  empty.horizon = 10;
  empty.initial = true;
  CHECK(occupation_fraction(empty) == 1.0);
  CHECK(switch_statistics(empty).count == 0);

  Timeline tl;
  tl.horizon = 8;
  tl.initial = true;
  tl.events = {{2.0, false}, {4.0, true}};
  CHECK(tl.valid());
  CHECK(occupation_fraction(tl) == doctest::Approx(0.75));
  CHECK(!tl.value_at(3.0));
  CHECK(tl.value_at(5.0));

  Timeline bad = tl;
  bad.events = {{2.0, false}, {4.0, false}};
  CHECK(!bad.valid());
}

TEST_CASE("single edge follows the edge state") {
  auto t = single_edge();
  const double p = 0.3, T = 20000;
  auto r = simulate(t, p, T, 17, {100, true});
  CHECK(r.probe_mismatches == 0);
  CHECK(r.probes_checked == 100);
  CHECK(r.timeline.events.size() == r.flips);
  double expect = 2 * p * (1 - p) * T;
  CHECK(std::fabs(static_cast<double>(r.flips) - expect) < 5 * std::sqrt(expect));
  CHECK(occupation_fraction(r.timeline) == doctest::Approx(r.edge_on_time[0] / T).epsilon(1e-12));

  auto st = switch_statistics(r.timeline);
  REQUIRE(st.mean_on.has_value());
  REQUIRE(st.mean_off.has_value());
  CHECK(*st.mean_on == doctest::Approx(1 / (1 - p)).epsilon(0.05));
  CHECK(*st.mean_off == doctest::Approx(1 / p).epsilon(0.05));
}

TEST_CASE("on to off flux of a single edge") {
  const double p = 0.6, T = 50000;
  auto r = simulate(single_edge(), p, T, 99, {0, true});
  double rate = static_cast<double>(r.edge_off_flips[0]) / T;
  double expect = p * (1 - p);
  // renewal count: cycle mean mu = 1/(p(1-p)), variance 1/p^2 + 1/(1-p)^2
  double mu = 1 / expect, var = 1 / (p * p) + 1 / ((1 - p) * (1 - p));
  double se = std::sqrt(var / (mu * mu * mu * T));
  CHECK(std::fabs(rate - expect) <= 4 * se);
}

TEST_CASE("switch count parity") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = simulate(truncate(ChildSequence::constant(2), 3), 0.55, 200, seed);
    const auto& tl = r.timeline;
    bool flipped = tl.initial != tl.final_value();
    CHECK((tl.events.size() % 2 == 1) == flipped);
    for (std::size_t i = 1; i < tl.events.size(); ++i) {
      CHECK(tl.events[i].first > tl.events[i - 1].first);
      CHECK(tl.events[i].second != tl.events[i - 1].second);
    }
    if (!tl.events.empty()) CHECK(tl.events.front().second != tl.initial);
  }
}

TEST_CASE("nearly certain connectivity") {
  auto r = simulate(truncate(ChildSequence::constant(2), 3), 0.9999, 100, 5);
  CHECK(occupation_fraction(r.timeline) >= 0.999);
}

TEST_CASE("occupation tracks theta_5 at p=0.7") {
  auto t = truncate(ChildSequence::constant(2), 5);
  auto r = simulate(t, 0.7, 10000, 2024, {100, false});
  long double th = theta_truncated(ChildSequence::constant(2), PreciseProb(0.7L), 5);
  CHECK(std::fabs(occupation_fraction(r.timeline) - static_cast<double>(th)) < 0.03);
  CHECK(r.probe_mismatches == 0);
}

TEST_CASE("incremental connectivity equals recomputation") {
  auto t = truncate(ChildSequence::periodic({1, 2, 3}), 6);
  Simulator sim(t, 0.6, 3);
  for (int i = 0; i < 5000; ++i) {
    sim.step();
    REQUIRE(sim.connected() == sim.connected_from_scratch());
  }
}

TEST_CASE("empty truncation") {
  auto r = simulate(truncate(ChildSequence::constant(2), 0), 0.5, 10, 1);
  CHECK(r.timeline.initial);
  CHECK(r.timeline.events.empty());
  CHECK(occupation_fraction(r.timeline) == 1.0);
}

TEST_CASE("bad parameters") {
  auto t = single_edge();
  CHECK_THROWS(simulate(t, 0.0, 10, 1));
  CHECK_THROWS(simulate(t, 1.0, 10, 1));
  CHECK_THROWS(simulate(t, 0.5, 0.0, 1));
}

TEST_CASE("edge marginals") {
  auto a = edge_marginal_check(single_edge(), 0.5, 1e5, 8);
  REQUIRE(a.fractions.size() == 1);
  CHECK(std::fabs(a.fractions[0] - 0.5) <= 0.02);
  CHECK(a.passes);

  auto b = edge_marginal_check(truncate(ChildSequence::constant(2), 4), 0.9, 1e4, 8);
  CHECK(b.passes);
  for (double f : b.fractions) CHECK(std::fabs(f - 0.9) < 0.05);

  auto c = edge_marginal_check(single_edge(), 0.5, 1e-6, 8);
  CHECK(c.insufficient_horizon);
  CHECK(!c.passes);
}

TEST_CASE("seeded runs are bit exact") {
  auto t = truncate(ChildSequence::constant(2), 5);
  auto a = simulate(t, 0.7, 500, 77);
  auto b = simulate(t, 0.7, 500, 77);
  CHECK(a.timeline.initial == b.timeline.initial);
  CHECK(a.timeline.events == b.timeline.events);
  auto c = simulate(t, 0.7, 500, 78);
  CHECK(c.timeline.events != a.timeline.events);
}

TEST_CASE("replicas are thread independent") {
  auto t = truncate(ChildSequence::constant(2), 4);
  std::vector<Timeline> ta, tb;
  auto a = simulate_replicas(t, 0.65, 300, 5, 8, 1, &ta);
  auto b = simulate_replicas(t, 0.65, 300, 5, 8, 4, &tb);
  REQUIRE(a.size() == 8);
  for (std::size_t r = 0; r < 8; ++r) {
    CHECK(a[r].replica == r);
    CHECK(a[r].occupation == b[r].occupation);
    CHECK(a[r].switches == b[r].switches);
    CHECK(ta[r].events == tb[r].events);
  }
}

}  // TEST_SUITE
