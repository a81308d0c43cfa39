#include <benchmark/benchmark.h>

#include "hat/io.hpp"
#include "hat/synth.hpp"
#include "hat/tracker.hpp"

namespace {

// Whole-sequence throughput; items processed are frames.
void BM_TrackSequence(benchmark::State& state) {
  hat::SynthConfig sc;
  sc.dim = static_cast<std::size_t>(state.range(0));
  sc.num_ids = 10;
  sc.num_frames = 200;
  const hat::SynthOutput out = hat::generate(sc);
  const auto frames = hat::assemble_frames(out.detections, out.features);
  hat::TrackerConfig tc;
  tc.use_projection = state.range(1) != 0;
  for (auto _ : state) {
    hat::Tracker tracker(tc);
    for (const auto& f : frames) tracker.step(f);
    benchmark::DoNotOptimize(tracker.finalize());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * frames.size()));
}
BENCHMARK(BM_TrackSequence)
    ->ArgsProduct({{64, 256}, {0, 1}})
    ->ArgNames({"dim", "projection"})
    ->Unit(benchmark::kMillisecond);

}  // namespace
