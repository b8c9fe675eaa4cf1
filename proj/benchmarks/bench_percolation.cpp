#include <benchmark/benchmark.h>

#include "percotree/child_sequence.hpp"
#include "percotree/constructions.hpp"
#include "percotree/criteria.hpp"
#include "percotree/percolation.hpp"
#include "percotree/truncation.hpp"

using namespace percotree;

static void BM_ThetaScalar(benchmark::State& state) {
  auto s = ChildSequence::constant(2);
  auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(theta_truncated(s, PreciseProb(0.6L), n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ThetaScalar)->RangeMultiplier(4)->Range(16, 16384)->Complexity(benchmark::oN);

static void BM_ThetaLimitGrowth(benchmark::State& state) {
  auto s = named_growth_tree("n2-two-n");
  for (auto _ : state) benchmark::DoNotOptimize(theta_limit(s, PreciseProb(0.55L), 1e-9L));
}
BENCHMARK(BM_ThetaLimitGrowth)->Unit(benchmark::kMillisecond);

static void BM_ThetaLayers(benchmark::State& state) {
  auto tree = theorem12_counterexample();
  auto layers = build_layers(tree, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(theta_truncated(layers, PreciseProb(0.6L)));
  state.counters["kinds"] = static_cast<double>(layers.kind_count());
}
BENCHMARK(BM_ThetaLayers)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_ThetaMonteCarlo(benchmark::State& state) {
  auto t = truncate(ChildSequence::constant(2), 10);
  auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(theta_mc(t, 0.7, 100000, 1, threads));
}
BENCHMARK(BM_ThetaMonteCarlo)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_SeriesPartialSums(benchmark::State& state) {
  auto s = named_growth_tree("n-log2-two-n");
  auto K = static_cast<std::size_t>(state.range(0));
  s.log_level_sizes(K);
  for (auto _ : state) benchmark::DoNotOptimize(series_partial_sums(s, PreciseProb(0.5L), K));
}
BENCHMARK(BM_SeriesPartialSums)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);
