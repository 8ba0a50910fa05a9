#include <benchmark/benchmark.h>

#include "anderson/spectrum.hpp"

using namespace anderson;

static void BM_ThetaEnd(benchmark::State& state) {
  const auto d = sample_disorder(PotentialSpec::uniform(0.0, 1.0), state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(theta_end(d, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ThetaEnd)->RangeMultiplier(10)->Range(100, 100000);

static void BM_PhaseCountBelow(benchmark::State& state) {
  const auto d = sample_disorder(PotentialSpec::uniform(0.0, 1.0), state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(phase_count_below(d, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PhaseCountBelow)->RangeMultiplier(10)->Range(100, 100000);

static void BM_SturmCount(benchmark::State& state) {
  const auto d = sample_disorder(PotentialSpec::uniform(0.0, 1.0), state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(sturm_count(d, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SturmCount)->RangeMultiplier(10)->Range(100, 100000);

static void BM_DirichletSpectrum(benchmark::State& state) {
  const auto d = sample_disorder(PotentialSpec::uniform(0.0, 1.0), state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues_dirichlet(d, 1e-12));
}
BENCHMARK(BM_DirichletSpectrum)->Arg(100)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_PeriodicSpectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = sample_disorder(PotentialSpec::uniform(0.0, 0.3), n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues_periodic(d, 4 * n, 1e-12));
}
BENCHMARK(BM_PeriodicSpectrum)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);
