#include <benchmark/benchmark.h>

#include "percotree/child_sequence.hpp"
#include "percotree/dynamics.hpp"
#include "percotree/truncation.hpp"

using namespace percotree;

static void BM_SimulateBinary(benchmark::State& state) {
  auto t = truncate(ChildSequence::constant(2), state.range(0));
  std::uint64_t seed = 0;
  std::uint64_t flips = 0;
  for (auto _ : state) {
    auto r = simulate(t, 0.7, 1000, seed++);
    flips += r.flips;
  }
  state.counters["flips/s"] = benchmark::Counter(static_cast<double>(flips), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateBinary)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Replicas(benchmark::State& state) {
  auto t = truncate(ChildSequence::constant(2), 5);
  auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_replicas(t, 0.7, 2000, 1, 16, threads));
}
BENCHMARK(BM_Replicas)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
