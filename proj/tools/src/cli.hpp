#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitSolver = 2;

/// Entry point of the `hat` tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::size_t dim = 256;
  std::size_t ids = 20;
  std::size_t queue = 60;
  std::size_t frames = 50;
  std::uint64_t seed = 1;
};

struct BenchResult {
  std::vector<double> fit_ms;  // one fit_projection latency per measured frame
  double fit_p50_ms = 0.0;
  double fit_p95_ms = 0.0;
  double fps = 0.0;            // tracker steps per second, fit included
  std::size_t projection_dim = 0;
};

/// Runs the tracker on a synthetic sequence with full queues and times the
/// per-frame projection fit and the whole step.
BenchResult run_bench(const BenchOptions& options);

/// Nearest-rank percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

}  // namespace hat::cli
