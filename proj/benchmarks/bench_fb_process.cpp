#include <benchmark/benchmark.h>

#include "anderson/fb_process.hpp"

using namespace anderson;

static void BM_ForwardSample(benchmark::State& state) {
  const auto spec = PotentialSpec::uniform(0.0, 1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(forward_sample(spec, state.range(0), 0.5, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardSample)->Arg(40)->Arg(400)->Arg(4000);

static void BM_RhsEstimate(benchmark::State& state) {
  const auto spec = PotentialSpec::uniform(0.0, 1.0);
  const std::vector<Observable> obs{Observable::window(0.5, 1.5)};
  RhsOptions o;
  o.cells = 40;
  o.pairs = 50;
  o.replicas = 5;
  o.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(rhs_estimate(obs, spec, state.range(0), o));
}
BENCHMARK(BM_RhsEstimate)->Arg(40)->Unit(benchmark::kMillisecond);
