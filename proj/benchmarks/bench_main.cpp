// Throughput of the hot paths: objective gradients, a full fit, pair
// sampling and texture synthesis.

#include <benchmark/benchmark.h>

#include "pseg/inference.hpp"
#include "pseg/pairs.hpp"
#include "pseg/synthesis.hpp"

namespace {

using namespace pseg;

AggregatedCounts simulated_counts(int n, int k) {
  const ProbMaps gt = generate_probmaps({k, n, 1.0, 2.0, 1});
  return aggregate_responses(simulate_responses(gt, sample_pairset(GridSpec(n), k, Coverage::KPerPixel, 2), 10, 3));
}

void BM_Gradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Objective obj(simulated_counts(n, 3), n, LossKind::BCE, 10.0, 1);
  const MapTensor p = initial_maps(3, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(obj.gradient(p));
  state.SetItemsProcessed(state.iterations() * obj.counts().size());
}
BENCHMARK(BM_Gradient)->Arg(16)->Arg(32)->Arg(64);

void BM_Fit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AggregatedCounts counts = simulated_counts(n, 3);
  FitConfig cfg;
  cfg.lambda = 10.0;
  cfg.max_iter = 200;
  for (auto _ : state) benchmark::DoNotOptimize(fit_nonparametric(counts, n, 3, cfg));
}
BENCHMARK(BM_Fit)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SamplePairs(benchmark::State& state) {
  const GridSpec grid(static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_pairset(grid, 3, Coverage::Minimal, ++seed));
}
BENCHMARK(BM_SamplePairs)->Arg(20)->Arg(64);

void BM_Texture(benchmark::State& state) {
  const int px = static_cast<int>(state.range(0));
  const ProbMaps maps = deterministic_maps(generate_probmaps({2, 16, 5.0, 4.0, 5}));
  TextureParams tp;
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_texture(maps, tp, px));
}
BENCHMARK(BM_Texture)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
