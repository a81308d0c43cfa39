#include <benchmark/benchmark.h>

#include "hat/linalg.hpp"
#include "hat/rng.hpp"

namespace {

hat::Matrix random_spd(std::size_t n, std::uint64_t seed) {
  hat::SplitMix64 rng(seed);
  hat::Matrix g(n, n);
  for (std::size_t i = 0; i < n * n; ++i) g.data()[i] = rng.normal();
  hat::Matrix s = g.transpose() * g;
  for (std::size_t i = 0; i < n; ++i) s(i, i) += static_cast<double>(n);
  return s;
}

void BM_Cholesky(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const hat::Matrix a = random_spd(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(hat::cholesky_spd(a));
}
BENCHMARK(BM_Cholesky)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_SymEigFull(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const hat::Matrix a = random_spd(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hat::sym_eig(a));
}
BENCHMARK(BM_SymEigFull)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_SymEigTop19(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const hat::Matrix a = random_spd(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(hat::sym_eig(a, 19));
}
BENCHMARK(BM_SymEigTop19)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_GeneralizedEigTop19(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const hat::Matrix a = random_spd(n, 4);
  const hat::Matrix b = random_spd(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(hat::generalized_eig(a, b, 19));
}
BENCHMARK(BM_GeneralizedEigTop19)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

}  // namespace
