#include <doctest.h>

#include <cstdint>
#include <functional>
#include <vector>

#include "percotree/child_sequence.hpp"
#include "percotree/constructions.hpp"
#include "percotree/general_tree.hpp"
#include "percotree/truncation.hpp"

using namespace percotree;

namespace {

// brute force count of level-k vertices through children_of
std::uint64_t enumerate_level(const GeneralTree& t, std::size_t k) {
  std::vector<std::uint64_t> path;
  std::function<std::uint64_t()> rec = [&]() -> std::uint64_t {
    if (path.size() == k) return 1;
    std::uint64_t c = t.children_of(path), total = 0;
    for (std::uint64_t i = 0; i < c; ++i) {
      path.push_back(i);
      total += rec();
      path.pop_back();
    }
    return total;
  };
  return rec();
}

std::vector<ChildSequence> sample_sequences() {
  return {ChildSequence::constant(1), ChildSequence::constant(2), ChildSequence::periodic({1, 3, 2}),
          ChildSequence::prefix_then_constant({4, 1, 1}, 2), ChildSequence::growth(GrowthTarget::power(2, 2)),
          named_growth_tree("two-n-log-n")};
}

}  // namespace

TEST_SUITE("tree_model") {

TEST_CASE("binary truncation at depth 3") {
  auto t = truncate(ChildSequence::constant(2), 3);
  CHECK(t.vertex_count() == 15);
  CHECK(t.edge_count() == 14);
  for (std::size_t k = 0; k <= 3; ++k) CHECK(t.level_count(k) == (std::size_t{1} << k));
}

TEST_CASE("depth 0 is a single root") {
  for (const auto& s : sample_sequences()) {
    auto t = truncate(s, 0);
    CHECK(t.vertex_count() == 1);
    CHECK(t.edge_count() == 0);
  }
}

TEST_CASE("k^2 2^k profile matches the min rule") {
  auto seq = lemma23_tree(PreciseProb(0.5L), 0.5L).base;
  auto t = truncate(seq, 4);
  BigInt prev = 1;
  for (std::size_t k = 1; k <= 4; ++k) {
    BigInt target = BigInt(k * k) << k;
    BigInt i = 1;
    while (i * prev < target) ++i;
    BigInt size = i * prev;
    CHECK(BigInt(t.level_count(k)) == size);
    prev = size;
  }
}

TEST_CASE("level sizes") {
  CHECK(level_size(ChildSequence::constant(2), 10) == 1024);
  CHECK(level_size(ChildSequence::constant(1), 7) == 1);
  CHECK(level_size(ChildSequence::constant(3), 0) == 1);
  CHECK(ChildSequence::constant(2).level_size(200) == (BigInt(1) << 200));
}

TEST_CASE("product identity and monotone level sizes") {
  for (const auto& s : sample_sequences()) {
    BigInt prod = 1;
    for (std::size_t k = 0; k <= 60; ++k) {
      CHECK(s.level_size(k) == prod);
      if (k > 0) CHECK(s.level_size(k) >= s.level_size(k - 1));
      CHECK(s.children(k) >= 1);
      prod *= s.children(k);
    }
  }
}

TEST_CASE("children queries are deterministic") {
  auto s = named_growth_tree("n-log2-two-n");
  auto first = s.children_upto(300);
  auto again = s.children_upto(300);
  CHECK(first == again);
  for (std::size_t k = 0; k < 300; k += 37) CHECK(s.children(k) == first[k]);
}

TEST_CASE("truncation structure") {
  for (const auto& s : sample_sequences()) {
    auto t = truncate(s, 8);
    CHECK(t.edge_count() + 1 == t.vertex_count());
    for (std::size_t k = 0; k <= 8; ++k) CHECK(BigInt(t.level_count(k)) == s.level_size(k));
    for (std::uint32_t v = 1; v < t.vertex_count(); ++v) {
      CHECK(t.level_of(t.parent[v]) + 1 == t.level_of(v));
      CHECK(t.path_of(v).size() == t.level_of(v));
      CHECK(t.vertex_at(t.path_of(v)) == v);
    }
  }
}

TEST_CASE("truncation prefix consistency") {
  auto tree = glue_at_root({GeneralTree::spherical(ChildSequence::periodic({1, 2})),
                            GeneralTree::spherical(ChildSequence::constant(2))});
  auto big = truncate(tree, 9);
  for (std::size_t m = 0; m <= 9; ++m) {
    auto small = truncate(tree, m);
    std::size_t V = small.vertex_count();
    REQUIRE(big.level_offset[m + 1] == V);
    for (std::size_t v = 1; v < V; ++v) {
      CHECK(small.parent[v] == big.parent[v]);
      CHECK(small.kind[v] == big.kind[v]);
    }
  }
}

TEST_CASE("general tree paths and depth bound") {
  auto t = GeneralTree::from_path_rule(
      [](std::span<const std::uint64_t> path) -> std::uint64_t { return path.empty() ? 3 : 1 + path.back(); },
      "path-rule", 5);
  std::vector<std::uint64_t> p{2, 1};
  CHECK(t.children_of(p) == 2);
  CHECK(t.children_of(p) == t.children_of(p));
  auto tr = truncate(t, 5);
  CHECK(tr.level_count(0) == 1);
  for (std::uint32_t v = 0; v < tr.vertex_count(); ++v) CHECK(tr.path_of(v).size() == tr.level_of(v));
  CHECK_THROWS_AS(truncate(t, 6), DepthBoundError);
  try {
    truncate(t, 6);
  } catch (const DepthBoundError& e) {
    CHECK(e.bound == 5);
    CHECK(e.requested == 6);
  }
}

TEST_CASE("spine tree level 2 by enumeration") {
  auto tree = theorem12_counterexample();
  auto t = truncate(tree, 2);
  for (std::size_t k = 0; k <= 2; ++k) {
    CHECK(t.level_count(k) == enumerate_level(tree, k));
    CHECK(level_size(tree, k) == BigInt(enumerate_level(tree, k)));
  }
  CHECK(level_size(tree, 2) > 1);
}

TEST_CASE("glue a single copy is the identity") {
  auto base = GeneralTree::spherical(ChildSequence::periodic({1, 2, 3}));
  auto glued = glue_at_root({base});
  for (std::size_t k = 0; k <= 40; ++k) CHECK(level_size(glued, k) == level_size(base, k));
}

TEST_CASE("glue two binary trees") {
  auto b = GeneralTree::spherical(ChildSequence::constant(2));
  auto glued = glue_at_root({b, b});
  CHECK(level_size(glued, 0) == 1);
  for (std::size_t k = 1; k <= 40; ++k) CHECK(level_size(glued, k) == (BigInt(2) << k));
}

TEST_CASE("glue three copies of the k^2 (5/3)^k tree") {
  auto g = lemma23_tree(PreciseProb(0.6L), 0.5L).base;
  auto one = GeneralTree::spherical(g);
  auto glued = glue_at_root({one, one, one});
  CHECK(glued.children_of({}) == 3 * one.children_of({}));
  for (std::size_t k = 1; k <= 5; ++k) {
    CHECK(enumerate_level(glued, k) == 3 * enumerate_level(one, k));
    CHECK(level_size(glued, k) == 3 * g.level_size(k));
  }
}

TEST_CASE("glue of nothing is refused") {
  CHECK_THROWS(glue_at_root({}));
}

TEST_CASE("root multiplier") {
  auto s = ChildSequence::constant(2).with_root_multiplier(3);
  CHECK(s.children(0) == 6);
  CHECK(s.level_size(4) == 3 * 16);
}

}  // TEST_SUITE
