#include <benchmark/benchmark.h>

#include "common.hpp"

namespace {

void BM_FitProjection(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto queues = hat::bench::clustered_queues(20, d, 60);
  for (auto _ : state) benchmark::DoNotOptimize(hat::fit_projection(queues, 0.9, 1e-3));
}
BENCHMARK(BM_FitProjection)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_ScatterWithin(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto queues = hat::bench::clustered_queues(20, d, 60);
  const auto centroids = hat::compute_centroids(queues, hat::CentroidMode::TemporalShifted, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(hat::scatter_within(queues, centroids));
}
BENCHMARK(BM_ScatterWithin)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_FitPca(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto queues = hat::bench::clustered_queues(20, d, 60);
  for (auto _ : state) benchmark::DoNotOptimize(hat::fit_pca_projection(queues, 19));
}
BENCHMARK(BM_FitPca)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
