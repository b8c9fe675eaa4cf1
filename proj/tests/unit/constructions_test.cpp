#include <doctest.h>

#include <cmath>

#include "percotree/constructions.hpp"
#include "percotree/criteria.hpp"
#include "percotree/percolation.hpp"

using namespace percotree;

namespace {

// f(k) = 2^k k^alpha L(k)^beta as an exact integer
BigInt target(std::size_t k, int alpha, int beta) {
  BigInt v = BigInt(1) << k;
  for (int i = 0; i < alpha; ++i) v *= std::max<std::size_t>(1, k);
  std::size_t L = 1;
  while (k > 1 && (std::size_t{1} << L) < k) ++L;
  for (int i = 0; i < beta; ++i) v *= L;
  return v;
}

}  // namespace

TEST_SUITE("constructions") {

TEST_CASE("growth 2^k is the binary tree") {
  auto s = ss_tree_with_growth(GrowthTarget::power(2));
  for (std::size_t k = 0; k < 200; ++k) CHECK(s.children(k) == 2);
  CHECK(named_growth_tree("binary").level_size(64) == (BigInt(1) << 64));
}

TEST_CASE("k^2 2^k sizes by a direct loop") {
  auto s = ss_tree_with_growth(GrowthTarget::power(2, 2));
  BigInt prev = 1;
  for (std::size_t k = 1; k <= 200; ++k) {
    BigInt f = target(k, 2, 0);
    BigInt i = (f + prev - 1) / prev;
    if (i < 1) i = 1;
    BigInt size = i * prev;
    CHECK(s.level_size(k) == size);
    CHECK(size >= f);
    CHECK(size < f + prev);
    prev = size;
  }
  // the ceiling rule keeps |G_k|/f(k) in [1, 3/2) but does not settle at 1
  for (std::size_t k = 20; k <= 200; k += 20) {
    long double ratio = std::exp(s.log_level_size(k) - std::log(static_cast<long double>(k * k)) -
                                 static_cast<long double>(k) * std::log(2.0L));
    CHECK(ratio >= 1.0L - 1e-15L);
    CHECK(ratio < 1.5L);
  }
}

TEST_CASE("growth sandwich for the named family") {
  for (const auto& name : named_growth_trees()) {
    auto s = named_growth_tree(name);
    auto f = *s.target();
    for (std::size_t k = 1; k <= 300; ++k) {
      BigInt fk = f.exact_value(k);
      CHECK(s.level_size(k) >= fk);
      CHECK(s.level_size(k) < fk + s.level_size(k - 1));
    }
  }
}

TEST_CASE("2^k log k tree has a divergent series") {
  auto s = named_growth_tree("two-n-log-n");
  CHECK(s.target()->beta == 1);
  CHECK(s.target()->exact_value(9) == target(9, 0, 1));
  CHECK(s.level_size(9) >= target(9, 0, 1));
  CHECK(series_criterion_ss(s, PreciseProb(0.5L)).verdict == Verdict::Divergent);
  auto pc = branching_pc(s, 1000);
  CHECK(pc.lo <= 0.5L);
  CHECK(pc.hi >= 0.5L);
}

TEST_CASE("unknown growth names are refused") {
  CHECK_THROWS(named_growth_tree("three-n"));
}

TEST_CASE("glued construction with q already met") {
  auto r = lemma23_tree(PreciseProb(0.7L), 0.1L);
  CHECK(r.ok);
  CHECK(r.j == 1);
  CHECK(r.theta_prime.lo >= 0.1L);
  CHECK(r.pc.lo <= 0.7L);
  CHECK(r.pc.hi >= 0.7L);
  CHECK(r.tree.as_spherical()->same_rule(r.base));
}

TEST_CASE("glued construction at p=0.6, q=0.9") {
  auto r = lemma23_tree(PreciseProb(0.6L), 0.9L);
  REQUIRE(r.ok);
  CHECK(r.j >= 2);
  long double t = r.theta_prime.lo;
  CHECK(std::pow(1 - t, static_cast<long double>(r.j)) <= 0.1L);
  CHECK(std::pow(1 - t, static_cast<long double>(r.j - 1)) > 0.1L);
  PreciseProb p(0.6L);
  long double glued = theta_truncated(r.tree, p, 2000);
  CHECK(glued >= 0.9L);
  CHECK(theta_lower(*r.tree.as_spherical(), p, 2000) >= 0.9L);
  for (std::size_t n : {1, 5, 40, 400}) {
    long double one = theta_truncated(r.base, p, n);
    long double expect = 1 - std::pow(1 - one, static_cast<long double>(r.j));
    CHECK(std::fabs(theta_truncated(r.tree, p, n) - expect) <= 1e-12L);
  }
}

TEST_CASE("glued construction at p=0.5 has p_c 1/2") {
  auto r = lemma23_tree(PreciseProb(0.5L), 0.5L);
  CHECK(r.ok);
  CHECK(r.pc.lo <= 0.5L);
  CHECK(r.pc.hi >= 0.5L);
  CHECK(r.theta_glued_lo >= 0.5L);
}

TEST_CASE("glued construction domain") {
  CHECK_THROWS(lemma23_tree(PreciseProb(1.0L), 0.5L));
  CHECK_THROWS(lemma23_tree(PreciseProb(0.5L), 0.0L));
}

TEST_CASE("p_i rule") {
  PiRule r;
  CHECK(r.p(1).value() == doctest::Approx(5.0 / 6.0).epsilon(1e-18));
  CHECK(r.p(2).value() == doctest::Approx(0.5 + 1.0 / 9.0).epsilon(1e-18));
  for (std::size_t i = 1; i < 40; ++i) {
    CHECK(r.p(i + 1) < r.p(i));
    CHECK(r.p(i + 1) > PreciseProb(0.5L));
  }
  CHECK(r.p(r.max_index()) > PreciseProb(0.5L));
  CHECK_THROWS(r.p(0));
  CHECK_THROWS(r.p(r.max_index() + 1));
  CHECK_THROWS(PiRule{2.0L}.p(1));
}

TEST_CASE("spine counterexample brackets") {
  auto tree = theorem12_counterexample();
  PiRule r;
  for (std::size_t i = 1; i <= 2; ++i) {
    long double lo = theta_lower(tree, r.p(i), 48);
    INFO(i);
    CHECK(lo >= std::ldexp(1.0L, -static_cast<int>(i + 1)));
  }
  CHECK(tree.rule().zero_theta_certified(PreciseProb(0.5L)));
  CHECK(!tree.rule().zero_theta_certified(r.p(3)));
}

TEST_CASE("spine counterexample decays at 1/2") {
  auto tree = theorem12_counterexample();
  auto layers = build_layers(tree, 64);
  long double first = theta_truncated(layers.prefix(4), PreciseProb(0.5L)), prev = first;
  for (std::size_t n : {8, 16, 32, 64}) {
    long double v = theta_truncated(layers.prefix(n), PreciseProb(0.5L));
    CHECK(v < prev);
    prev = v;
  }
  // slow decay, roughly n^-1/2
  CHECK(prev < first / 3);
}

TEST_CASE("spine counterexample p_c bracket contains 1/2") {
  auto pc = branching_pc(theorem12_counterexample(), 48);
  CHECK(pc.lo <= 0.5L);
  CHECK(pc.hi >= 0.5L);
}

TEST_CASE("comparison pair pieces") {
  auto g = named_growth_tree("n-two-n");
  auto S = series_partial_sums(g, PreciseProb(0.5L), 2000);
  long double k2 = 0;
  for (std::size_t k = 1; k <= 2000; ++k) k2 += 1.0L / (static_cast<long double>(k) * k);
  CHECK(S[2000] <= k2);
  CHECK(series_criterion_ss(g, PreciseProb(0.5L)).verdict == Verdict::Convergent);
  CHECK(cstar_zero_test(g, PreciseProb(0.5L)).verdict == Verdict::Convergent);
}

}  // TEST_SUITE
