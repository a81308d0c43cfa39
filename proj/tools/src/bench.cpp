#include <algorithm>
#include <chrono>
#include <cmath>

#include "cli.hpp"
#include "hat/io.hpp"
#include "hat/synth.hpp"
#include "hat/tracker.hpp"

namespace hat::cli {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

BenchResult run_bench(const BenchOptions& options) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  SynthConfig sc;
  sc.num_ids = options.ids;
  sc.dim = options.dim;
  sc.num_frames = options.queue + options.frames;
  sc.occlusion_prob = 0.0;
  sc.seed = options.seed;
  const SynthOutput data = generate(sc);
  const std::vector<FrameInput> frames = assemble_frames(data.detections, data.features);

  TrackerConfig tc;
  tc.queue_length = options.queue;
  Tracker tracker(tc);

  // Warm-up fills every queue to capacity.
  std::size_t f = 0;
  for (; f < options.queue && f < frames.size(); ++f) tracker.step(frames[f]);

  BenchResult result;
  double step_ms = 0.0;
  std::size_t steps = 0;
  for (; f < frames.size(); ++f) {
    auto t0 = clock::now();
    const auto proj = tracker.fit_current_projection();
    const double fit = ms_since(t0);
    if (proj) {
      result.fit_ms.push_back(fit);
      result.projection_dim = proj->output_dim();
    }
    t0 = clock::now();
    tracker.step(frames[f]);
    step_ms += ms_since(t0);
    ++steps;
  }
  result.fit_p50_ms = percentile(result.fit_ms, 0.50);
  result.fit_p95_ms = percentile(result.fit_ms, 0.95);
  result.fps = step_ms > 0.0 ? 1000.0 * static_cast<double>(steps) / step_ms : 0.0;
  return result;
}

}  // namespace hat::cli
