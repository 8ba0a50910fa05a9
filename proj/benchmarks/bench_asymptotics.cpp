#include <benchmark/benchmark.h>

#include "anderson/asymptotics.hpp"

using namespace anderson;

static void BM_LyapunovSteps(benchmark::State& state) {
  const auto spec = PotentialSpec::uniform(0.0, 1.0);
  const auto steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov(spec, 0.5, steps, 100, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LyapunovSteps)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_InvariantOperator(benchmark::State& state) {
  const auto spec = PotentialSpec::uniform(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(invariant_operator(spec, 0.5, state.range(0)));
}
BENCHMARK(BM_InvariantOperator)->Arg(256)->Unit(benchmark::kMillisecond);
