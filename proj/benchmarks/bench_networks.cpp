#include <benchmark/benchmark.h>

#include <memory>

#include "percotree/child_sequence.hpp"
#include "percotree/networks.hpp"
#include "percotree/truncation.hpp"

using namespace percotree;

namespace {

ConductanceModel dyn_half() {
  ConductanceModel m;
  m.kind = ConductanceKind::Dynamical;
  m.p = PreciseProb(0.5L);
  return m;
}

}  // namespace

static void BM_ClosedForm(benchmark::State& state) {
  auto s = ChildSequence::growth(GrowthTarget::power(2, 2));
  auto n = static_cast<std::size_t>(state.range(0));
  s.log_level_sizes(n);
  for (auto _ : state) benchmark::DoNotOptimize(effective_conductance_ss(s, dyn_half(), n));
}
BENCHMARK(BM_ClosedForm)->Arg(100)->Arg(10000);

static void BM_Reduce(benchmark::State& state) {
  auto t = std::make_shared<const TreeTruncation>(truncate(ChildSequence::constant(2), state.range(0)));
  WeightedNetwork net(t, dyn_half());
  for (auto _ : state) benchmark::DoNotOptimize(effective_conductance_reduce(net));
  state.counters["edges"] = static_cast<double>(t->edge_count());
}
BENCHMARK(BM_Reduce)->DenseRange(10, 18, 4)->Unit(benchmark::kMicrosecond);

static void BM_MinFlow(benchmark::State& state) {
  auto t = std::make_shared<const TreeTruncation>(truncate(ChildSequence::constant(2), state.range(0)));
  WeightedNetwork net(t, dyn_half());
  for (auto _ : state) benchmark::DoNotOptimize(min_energy_unit_flow(net));
}
BENCHMARK(BM_MinFlow)->DenseRange(10, 18, 4)->Unit(benchmark::kMicrosecond);

static void BM_Layered(benchmark::State& state) {
  auto layers = build_layers(GeneralTree::spherical(ChildSequence::constant(2)), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(effective_conductance_layered(layers, dyn_half()));
}
BENCHMARK(BM_Layered)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);
