#pragma once

#include <vector>

#include "hat/fld.hpp"
#include "hat/rng.hpp"

namespace hat::bench {

// C full queues of T samples in D dimensions, one Gaussian cluster each.
inline std::vector<FeatureQueue> clustered_queues(std::size_t c, std::size_t d, std::size_t t,
                                                  std::uint64_t seed = 1) {
  SplitMix64 rng(seed);
  std::vector<FeatureQueue> queues;
  for (std::size_t k = 0; k < c; ++k) {
    FeatureVector mean(d);
    for (double& v : mean) v = rng.normal();
    FeatureQueue q(static_cast<TrackId>(k + 1), t);
    for (std::size_t age = t; age-- > 0;) {
      FeatureVector f(d);
      for (std::size_t i = 0; i < d; ++i) f[i] = mean[i] + 0.5 * rng.normal();
      q.push(std::move(f), static_cast<std::uint32_t>(age));
    }
    queues.push_back(std::move(q));
  }
  return queues;
}

}  // namespace hat::bench
