#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "hat/io.hpp"
#include "hat/records.hpp"

namespace hat {

/// Synthetic sequence of many look-alike identities. Noise and drift are
/// isotropic Gaussians scaled so their expected norms equal the configured
/// magnitudes whatever the dimension.
struct SynthConfig {
  std::size_t num_ids = 10;
  std::size_t num_frames = 100;
  std::size_t dim = 64;
  double cone_angle_deg = 12.0;  // half-angle of the cone holding the prototypes
  double drift_step = 0.001;     // per-frame random-walk step on the prototype
  double noise_sigma = 0.08;     // per-observation noise
  std::size_t nuisance_rank = 8;  // shared noise directions, capped at dim - 1; 0 disables
  double nuisance_gain = 1.0;     // nuisance norm relative to noise_sigma
  double occlusion_prob = 0.1;   // chance a visible identity starts an occlusion
  std::pair<std::size_t, std::size_t> occlusion_len{2, 30};
  std::pair<double, double> det_conf{0.75, 1.0};
  double frame_width = 1920.0;
  double frame_height = 1080.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthOutput {
  std::vector<TrackRecord> gt;
  DetectionFile detections;
  FeatureBank features;
  /// Ground-truth identity of each detection row (the file itself says -1).
  std::vector<std::int64_t> detection_truth;
  std::vector<FeatureVector> prototypes;
};

/// Pure function of the config: identical configs give identical outputs.
SynthOutput generate(const SynthConfig& config);

struct SeparationStats {
  double mean_intra = 0.0;  // cosine between features of the same identity
  double mean_inter = 0.0;  // cosine between features of different identities
  double min_prototype_cosine = 1.0;
};

/// Sanity statistics over a generated sequence (pairs within each frame for
/// inter-identity, consecutive observations for intra-identity).
SeparationStats separation_stats(const SynthOutput& out);

}  // namespace hat
