#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "percotree/child_sequence.hpp"
#include "percotree/constructions.hpp"
#include "percotree/general_tree.hpp"
#include "percotree/networks.hpp"
#include "percotree/truncation.hpp"

using namespace percotree;

namespace {

ConductanceModel model(ConductanceKind k, Normalization n, long double p) {
  ConductanceModel m;
  m.kind = k;
  m.normalization = n;
  m.p = PreciseProb(p);
  return m;
}

ConductanceModel perc(long double p) { return model(ConductanceKind::Percolation, Normalization::PaperLiteral, p); }

std::shared_ptr<const TreeTruncation> trunc_ptr(const GeneralTree& t, std::size_t n) {
  return std::make_shared<const TreeTruncation>(truncate(t, n));
}

std::shared_ptr<const TreeTruncation> trunc_ptr(const ChildSequence& s, std::size_t n) {
  return std::make_shared<const TreeTruncation>(truncate(s, n));
}

long double rel(long double a, long double b) { return std::fabs(a - b) / std::fabs(b); }

WeightedNetwork random_custom(std::mt19937_64& g) {
  std::uniform_int_distribution<int> depth(3, 7), kids(1, 3);
  std::vector<std::vector<std::uint64_t>> table(40);
  for (auto& row : table)
    for (int i = 0; i < 16; ++i) row.push_back(static_cast<std::uint64_t>(kids(g)));
  auto rule = [table](std::span<const std::uint64_t> path) -> std::uint64_t {
    std::uint64_t h = path.size();
    for (auto x : path) h = h * 31 + x;
    return table[path.size() % table.size()][h % 16];
  };
  auto d = static_cast<std::size_t>(depth(g));
  auto t = trunc_ptr(GeneralTree::from_path_rule(rule, "random", d), d);
  std::uniform_real_distribution<double> lc(-4.0, 4.0);
  std::vector<long double> c(t->edge_count());
  for (auto& x : c) x = std::exp(static_cast<long double>(lc(g)));
  return WeightedNetwork::custom(t, std::move(c));
}

// independent energy, sum F^2/c
long double energy_direct(const std::vector<long double>& f, const WeightedNetwork& net) {
  long double w = 0;
  for (std::size_t e = 0; e < f.size(); ++e) w += f[e] * f[e] / net.conductance(e);
  return w;
}

}  // namespace

TEST_SUITE("networks") {

TEST_CASE("edge conductances by kind and normalization") {
  CHECK(perc(0.5L).at_level(3) == doctest::Approx(0.125));
  CHECK(model(ConductanceKind::Percolation, Normalization::LyonsCorrected, 0.5L).at_level(3) ==
        doctest::Approx(0.25));
  CHECK(model(ConductanceKind::Dynamical, Normalization::PaperLiteral, 0.5L).at_level(3) ==
        doctest::Approx(0.375));
  CHECK(model(ConductanceKind::Dynamical, Normalization::LyonsCorrected, 0.5L).at_level(3) ==
        doctest::Approx(0.75));
  CHECK_THROWS(perc(1.0L).validate());
  CHECK_THROWS(perc(0.0L).validate());
  CHECK(parse_kind("dynamical") == ConductanceKind::Dynamical);
  CHECK(parse_normalization("lyons") == Normalization::LyonsCorrected);
  CHECK_THROWS(parse_kind("bogus"));
}

TEST_CASE("closed form examples") {
  auto bin = ChildSequence::constant(2);
  CHECK(rel(effective_conductance_ss(bin, perc(0.75L), 200), 0.5L) < 1e-15L);
  long double h = 0;
  for (int k = 1; k <= 500; ++k) h += 1.0L / k;
  auto dyn = model(ConductanceKind::Dynamical, Normalization::PaperLiteral, 0.5L);
  CHECK(rel(effective_conductance_ss(bin, dyn, 500), 1.0L / h) < 1e-15L);
  CHECK(effective_conductance_ss(bin, dyn, 500) < 0.15L);
  CHECK(rel(effective_conductance_ss(ChildSequence::constant(1), perc(0.3L), 1), 0.3L) < 1e-18L);
  CHECK_THROWS(effective_conductance_ss(bin, perc(0.5L), 0));
  CHECK_THROWS(effective_conductance_ss(bin, perc(1.5L), 3));
}

TEST_CASE("single edge reduction") {
  auto t = trunc_ptr(ChildSequence::constant(1), 1);
  auto net = WeightedNetwork::custom(t, {2.5L});
  CHECK(effective_conductance_reduce(net) == doctest::Approx(2.5));
  auto f = min_energy_unit_flow(net);
  CHECK(flow_energy(f, net) == doctest::Approx(0.4));
}

TEST_CASE("two level binary tree reduces to one half") {
  WeightedNetwork net(trunc_ptr(ChildSequence::constant(2), 2), perc(0.5L));
  CHECK(net.truncation().edge_count() == 6);
  long double hand = 1.0L / (2.0L / 2.0L + 4.0L / 4.0L);
  CHECK(rel(effective_conductance_reduce(net), hand) < 1e-15L);
  CHECK(rel(effective_conductance_reduce(net), 0.5L) < 1e-15L);
}

TEST_CASE("reduction on the k^2 (5/3)^k tree") {
  auto g = lemma23_tree(PreciseProb(0.6L), 0.5L).base;
  WeightedNetwork net(trunc_ptr(g, 8), perc(0.6L));
  CHECK(rel(effective_conductance_reduce(net), effective_conductance_ss(g, perc(0.6L), 8)) < 1e-12L);
}

TEST_CASE("reduction equals closed form") {
  std::vector<std::pair<ChildSequence, std::size_t>> trees{{ChildSequence::constant(1), 30},
                                                            {ChildSequence::constant(2), 12},
                                                            {ChildSequence::periodic({1, 1, 2}), 30},
                                                            {ChildSequence::prefix_then_constant({3, 1}, 1), 30}};
  for (const auto& [s, n] : trees)
    for (long double p : {0.3L, 0.5L, 0.75L, 0.9L})
      for (auto kind : {ConductanceKind::Percolation, ConductanceKind::Dynamical})
        for (auto norm : {Normalization::PaperLiteral, Normalization::LyonsCorrected}) {
          auto m = model(kind, norm, p);
          for (std::size_t d : {std::size_t{1}, n / 2, n}) {
            WeightedNetwork net(trunc_ptr(s, d), m);
            CHECK(rel(effective_conductance_reduce(net), effective_conductance_ss(s, m, d)) < 1e-12L);
          }
        }
}

TEST_CASE("layered reduction matches per-vertex reduction") {
  auto tree = glue_at_root({GeneralTree::spherical(ChildSequence::constant(2)),
                            GeneralTree::spherical(ChildSequence::periodic({1, 3}))});
  for (long double p : {0.4L, 0.7L}) {
    auto m = perc(p);
    WeightedNetwork net(trunc_ptr(tree, 9), m);
    auto layers = build_layers(tree, 9);
    CHECK(rel(effective_conductance_layered(layers, m), effective_conductance_reduce(net)) < 1e-12L);
    CHECK(effective_conductance_layered(layers, m, Boundary::LowerBound) <=
          effective_conductance_reduce(net) * (1 + 1e-15L));
  }
}

TEST_CASE("conductance is nonincreasing in depth") {
  for (const auto& s : {ChildSequence::constant(2), named_growth_tree("n2-two-n"), ChildSequence::periodic({1, 3})})
    for (auto kind : {ConductanceKind::Percolation, ConductanceKind::Dynamical})
      for (auto norm : {Normalization::PaperLiteral, Normalization::LyonsCorrected})
        for (long double p : {0.3L, 0.5L, 0.8L}) {
          auto seq = conductance_sequence_ss(s, model(kind, norm, p), 200);
          for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i].value <= seq[i - 1].value);
          for (const auto& b : seq) {
            CHECK(b.value > 0);
            CHECK(b.lo <= b.hi);
          }
        }
}

TEST_CASE("tail bracket contains the limit") {
  auto bin = ChildSequence::constant(2);
  for (std::size_t n : {5, 10, 20}) {
    auto b = conductance_bracket_ss(bin, perc(0.75L), n);
    CHECK(b.rigorous);
    CHECK(b.lo <= 0.5L * (1 + 1e-15L));
    CHECK(b.hi >= 0.5L);
  }
}

TEST_CASE("symmetric minimal flow splits equally") {
  auto s = ChildSequence::periodic({2, 1, 3});
  auto t = trunc_ptr(s, 7);
  WeightedNetwork net(t, perc(0.6L));
  auto f = min_energy_unit_flow(net);
  for (std::size_t e = 0; e < t->edge_count(); ++e) {
    auto lvl = t->edge(e).level;
    CHECK(rel(f.flow[e], 1.0L / static_cast<long double>(s.level_size(lvl))) < 1e-15L);
  }
}

TEST_CASE("parallel split 1:3") {
  // root with two leaf children
  auto t = trunc_ptr(ChildSequence::constant(2), 1);
  auto net = WeightedNetwork::custom(t, {1.0L, 3.0L});
  auto f = min_energy_unit_flow(net);
  CHECK(rel(f.flow[0], 0.25L) < 1e-15L);
  CHECK(rel(f.flow[1], 0.75L) < 1e-15L);
}

TEST_CASE("energy of the equal split on the binary tree") {
  auto t = trunc_ptr(ChildSequence::constant(2), 2);
  WeightedNetwork net(t, perc(0.75L));
  UnitFlow f{t, std::vector<long double>(t->edge_count())};
  for (std::size_t e = 0; e < t->edge_count(); ++e) f.flow[e] = std::ldexp(1.0L, -static_cast<int>(t->edge(e).level));
  long double expect = 1.0L / 1.5L + 1.0L / (1.5L * 1.5L);
  CHECK(rel(flow_energy(f, net), expect) < 1e-15L);
  CHECK(rel(flow_energy(f, net), 1.0L / effective_conductance_ss(ChildSequence::constant(2), perc(0.75L), 2)) <
        1e-15L);
}

TEST_CASE("Thomson and conservation on random custom networks") {
  std::mt19937_64 g(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto net = random_custom(g);
    auto f = min_energy_unit_flow(net);
    CHECK(unit_flow_violation(f) <= 1e-12L);
    long double w = flow_energy(f, net);
    CHECK(std::fabs(w * effective_conductance_reduce(net) - 1) <= 1e-10L);
    CHECK(rel(w, energy_direct(f.flow, net)) < 1e-14L);
  }
}

TEST_CASE("perturbed conserving flows never beat the minimum") {
  std::mt19937_64 g(11);
  auto net = random_custom(g);
  const auto& t = net.truncation();
  auto f = min_energy_unit_flow(net);
  long double w = flow_energy(f, net);
  std::uniform_real_distribution<double> eps(-0.2, 0.2);
  std::uniform_int_distribution<std::size_t> pick(0, t.vertex_count() - 1);
  int tried = 0;
  while (tried < 100) {
    auto v = static_cast<std::uint32_t>(pick(g));
    std::uint32_t b = t.first_child[v], e = t.first_child[v + 1];
    if (e - b < 2) continue;
    // move eps*F(a) from branch a to branch c, scaling each subtree's flow
    std::uniform_int_distribution<std::uint32_t> ch(b, e - 1);
    std::uint32_t a = ch(g), c = ch(g);
    if (a == c) continue;
    long double fa = f.flow[a - 1], fc = f.flow[c - 1];
    long double d = static_cast<long double>(eps(g)) * std::min(fa, fc);
    if (d == 0) continue;
    auto g2 = f.flow;
    std::function<void(std::uint32_t, long double)> scale = [&](std::uint32_t u, long double s) {
      g2[u - 1] *= s;
      for (auto x = t.first_child[u]; x < t.first_child[u + 1]; ++x) scale(x, s);
    };
    scale(a, (fa - d) / fa);
    scale(c, (fc + d) / fc);
    UnitFlow pf{f.trunc, g2};
    CHECK(unit_flow_violation(pf) <= 1e-12L);
    CHECK(flow_energy(pf, net) > w);
    ++tried;
  }
}

TEST_CASE("energy by level") {
  auto g = ChildSequence::growth(GrowthTarget::power(2, 2));
  auto t = trunc_ptr(g, 8);
  WeightedNetwork star(t, model(ConductanceKind::Dynamical, Normalization::PaperLiteral, 0.5L));
  auto f = min_energy_unit_flow(star);
  auto ws = energy_by_level(f, star);
  long double sum = 0;
  for (std::size_t k = 1; k < ws.size(); ++k) sum += ws[k];
  CHECK(rel(sum, flow_energy(f, star)) < 1e-12L);

  WeightedNetwork wp(t, perc(0.6L));
  auto wpk = energy_by_level(f, wp);
  for (std::size_t k = 1; k <= 8; ++k) {
    // per-level recomputation from the flow
    long double direct = 0;
    for (std::size_t e = 0; e < t->edge_count(); ++e)
      if (t->edge(e).level == k) direct += f.flow[e] * f.flow[e] / std::pow(0.6L, static_cast<long double>(k));
    CHECK(rel(wpk[k], direct) < 1e-12L);
    long double scale = static_cast<long double>(k) * std::pow(0.5L / 0.6L, static_cast<long double>(k));
    CHECK(rel(wpk[k], scale * ws[k]) < 1e-12L);
  }
}

TEST_CASE("depth one energy is a single level") {
  auto t = trunc_ptr(ChildSequence::constant(3), 1);
  WeightedNetwork net(t, perc(0.5L));
  auto f = min_energy_unit_flow(net);
  auto ws = energy_by_level(f, net);
  REQUIRE(ws.size() == 2);
  CHECK(rel(ws[1], flow_energy(f, net)) < 1e-15L);
}

TEST_CASE("mismatched truncations are refused") {
  WeightedNetwork a(trunc_ptr(ChildSequence::constant(2), 3), perc(0.5L));
  WeightedNetwork b(trunc_ptr(ChildSequence::constant(3), 2), perc(0.5L));
  auto f = min_energy_unit_flow(a);
  CHECK_THROWS(flow_energy(f, b));
}

TEST_CASE("level flow squares match the explicit flow") {
  auto s = named_growth_tree("n-two-n");
  auto layers = build_layers(GeneralTree::spherical(s), 9);
  auto m = model(ConductanceKind::Dynamical, Normalization::PaperLiteral, 0.5L);
  auto sq = level_flow_squares(layers, m);
  WeightedNetwork net(trunc_ptr(s, 9), m);
  auto f = min_energy_unit_flow(net);
  std::vector<long double> direct(10, 0.0L);
  for (std::size_t e = 0; e < f.flow.size(); ++e) direct[net.truncation().edge(e).level] += f.flow[e] * f.flow[e];
  for (std::size_t k = 1; k <= 9; ++k) CHECK(rel(sq[k], direct[k]) < 1e-12L);
}

}  // TEST_SUITE
