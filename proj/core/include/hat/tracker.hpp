#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hat/assignment.hpp"
#include "hat/fld.hpp"
#include "hat/records.hpp"

namespace hat {

enum class ProjectionChoice : std::uint8_t { Fld, Pca, None };

/// Thresholds and knobs of the appearance-only tracker. Threshold defaults
/// are not published values; they were picked on the synthetic suite.
struct TrackerConfig {
  double tau_det = 0.6;    // detections with confidence <= tau_det are ignored
  double tau_sim = 0.55;   // accept a pair only if normalized similarity > tau_sim
  double tau_new = 0.7;    // unmatched detections above this start a track
  std::uint32_t tau_miss = 30;  // frames a track may stay unseen
  std::size_t queue_length = 60;
  double lambda0 = 0.9;
  double alpha = 0.9;
  double alpha_ema = 0.9;
  double epsilon = 1e-3;
  std::size_t refit_stride = 1;
  bool use_projection = true;
  ProjectionChoice projection_kind = ProjectionChoice::Fld;
  CentroidMode centroid = CentroidMode::TemporalShifted;

  /// Throws Config naming the first offending field.
  void validate() const;
};

struct FrameInput {
  FrameIndex frame = 0;
  std::vector<Box> boxes;
  std::vector<double> confidences;
  std::vector<FeatureVector> features;
};

struct TrajectoryState {
  TrackId id = 0;
  FeatureQueue queue{0, 1};
  FeatureVector ema;
  FrameIndex last_seen_frame = 0;
  std::uint32_t misses = 0;
};

struct StepReport {
  FrameIndex frame = 0;
  /// (detection index in the frame input, track id)
  std::vector<std::pair<std::size_t, TrackId>> matched;
  std::vector<TrackId> newborn;
  std::vector<TrackId> removed;
  std::vector<TrackRecord> records;
  /// Output dimension of the projection used this frame; 0 when matching ran
  /// on original features only.
  std::size_t projection_dim = 0;
};

/// Per-frame similarity breakdown handed to an observer, for instrumentation.
struct SimilarityTrace {
  FrameIndex frame = 0;
  std::vector<TrackId> track_ids;
  std::vector<std::size_t> detection_indices;
  SimilarityMatrix original;
  std::optional<SimilarityMatrix> projected;
  SimilarityMatrix integrated;
  double alpha = 0.0;
};

struct TrackerStats {
  std::size_t frames = 0;
  std::size_t projection_fits = 0;
  std::size_t projected_frames = 0;
};

/// (1 − alpha_ema)·old + alpha_ema·new, L2-normalized.
FeatureVector ema_update(std::span<const double> old_ema, std::span<const double> observed,
                         double alpha_ema);

/// Maps cosine similarity to (cos + 1)/2 and negates it.
CostMatrix build_cost(const SimilarityMatrix& similarity);

/// Online tracker for one sequence. Not shareable between threads; move it
/// if needed.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  StepReport step(const FrameInput& input);

  /// Every emitted record, sorted by (frame, id).
  std::vector<TrackRecord> finalize() const;

  const TrackerConfig& config() const noexcept { return config_; }
  const std::vector<TrajectoryState>& trajectories() const noexcept { return tracks_; }
  const TrackerStats& stats() const noexcept { return stats_; }
  TrackId next_id() const noexcept { return next_id_; }
  std::optional<std::size_t> feature_dim() const noexcept { return dim_; }

  /// Projection used in the most recent frame, if any.
  const std::optional<ProjectionMatrix>& projection() const noexcept { return projection_; }

  void set_similarity_observer(std::function<void(const SimilarityTrace&)> observer) {
    observer_ = std::move(observer);
  }

  /// Fits the configured projection on the current queues; nullopt when the
  /// frame is ineligible (fewer than two tracks or too few samples).
  std::optional<ProjectionMatrix> fit_current_projection() const;

 private:
  bool projection_eligible() const;

  TrackerConfig config_;
  std::vector<TrajectoryState> tracks_;
  std::vector<TrackRecord> records_;
  TrackId next_id_ = 1;
  std::optional<FrameIndex> last_frame_;
  std::optional<std::size_t> dim_;
  std::optional<ProjectionMatrix> projection_;
  std::size_t frames_since_fit_ = 0;
  TrackerStats stats_;
  std::function<void(const SimilarityTrace&)> observer_;
};

}  // namespace hat
