#include "hat/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hat/error.hpp"

namespace hat {

namespace {

void check_unit(const char* name, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::Config, std::string(name) + " must lie in [0, 1]");
  }
}

std::vector<FeatureQueue> queues_of(const std::vector<TrajectoryState>& tracks) {
  std::vector<FeatureQueue> queues;
  queues.reserve(tracks.size());
  for (const auto& t : tracks) queues.push_back(t.queue);
  return queues;
}

}  // namespace

void TrackerConfig::validate() const {
  check_unit("tau_det", tau_det);
  check_unit("tau_sim", tau_sim);
  check_unit("tau_new", tau_new);
  check_unit("alpha", alpha);
  check_unit("alpha_ema", alpha_ema);
  if (tau_miss < 1) throw Error(ErrorCode::Config, "tau_miss must be >= 1");
  if (queue_length < 1) throw Error(ErrorCode::Config, "T must be >= 1");
  if (!(lambda0 > 0.0 && lambda0 <= 1.0)) {
    throw Error(ErrorCode::Config, "lambda0 must lie in (0, 1]");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::Config, "epsilon must be positive");
  }
  if (refit_stride < 1) throw Error(ErrorCode::Config, "refit_stride must be >= 1");
}

FeatureVector ema_update(std::span<const double> old_ema, std::span<const double> observed,
                         double alpha_ema) {
  if (old_ema.size() != observed.size()) {
    throw Error(ErrorCode::DimensionMismatch, "EMA update of dim " +
                                                  std::to_string(old_ema.size()) + " with dim " +
                                                  std::to_string(observed.size()));
  }
  FeatureVector mixed(old_ema.size());
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    mixed[i] = (1.0 - alpha_ema) * old_ema[i] + alpha_ema * observed[i];
  }
  return normalized(mixed);
}

CostMatrix build_cost(const SimilarityMatrix& similarity) {
  CostMatrix cost(similarity.rows(), similarity.cols());
  for (std::size_t i = 0; i < cost.entries().size(); ++i) {
    cost.data()[i] = -((similarity.data()[i] + 1.0) / 2.0);
  }
  return cost;
}

Tracker::Tracker(TrackerConfig config) : config_(config) { config_.validate(); }

bool Tracker::projection_eligible() const {
  if (!config_.use_projection || config_.projection_kind == ProjectionChoice::None ||
      config_.alpha == 0.0) {
    return false;
  }
  const std::size_t classes = tracks_.size();
  if (classes < 2) return false;
  std::size_t samples = 0;
  for (const auto& t : tracks_) samples += t.queue.size();
  return samples >= classes + 1;
}

std::optional<ProjectionMatrix> Tracker::fit_current_projection() const {
  if (!projection_eligible()) return std::nullopt;
  const std::vector<FeatureQueue> queues = queues_of(tracks_);
  if (config_.projection_kind == ProjectionChoice::Pca) {
    return fit_pca_projection(queues, tracks_.size() - 1);
  }
  return fit_projection(queues, config_.lambda0, config_.epsilon, config_.centroid);
}

StepReport Tracker::step(const FrameInput& input) {
  if (last_frame_ && input.frame <= *last_frame_) {
    throw Error(ErrorCode::FrameOrder, "frame " + std::to_string(input.frame) +
                                           " does not follow frame " +
                                           std::to_string(*last_frame_));
  }
  const std::size_t count = input.boxes.size();
  if (input.confidences.size() != count || input.features.size() != count) {
    throw Error(ErrorCode::DimensionMismatch,
                "frame " + std::to_string(input.frame) +
                    ": boxes, confidences and features differ in length");
  }

  // Age history by the true frame gap.
  if (last_frame_) {
    const auto gap = static_cast<std::uint32_t>(input.frame - *last_frame_);
    for (auto& t : tracks_) t.queue.advance(gap);
  }

  // Gate by confidence and normalize the surviving features.
  std::vector<std::size_t> kept;
  std::vector<FeatureVector> feats;
  for (std::size_t i = 0; i < count; ++i) {
    if (!(input.confidences[i] > config_.tau_det)) continue;
    const auto& f = input.features[i];
    if (!dim_) dim_ = f.size();
    if (f.size() != *dim_) {
      throw Error(ErrorCode::DimensionMismatch,
                  "frame " + std::to_string(input.frame) + ": feature dim " +
                      std::to_string(f.size()) + " != locked dim " + std::to_string(*dim_));
    }
    kept.push_back(i);
    feats.push_back(normalized(f));
  }

  // Condition on the history before this frame's features are appended.
  if (projection_eligible()) {
    if (!projection_ || frames_since_fit_ >= config_.refit_stride) {
      projection_ = fit_current_projection();
      ++stats_.projection_fits;
      frames_since_fit_ = 0;
    }
  } else {
    projection_.reset();
  }
  const ProjectionMatrix* proj = projection_ ? &*projection_ : nullptr;

  StepReport report;
  report.frame = input.frame;
  report.projection_dim = proj ? proj->output_dim() : 0;
  if (proj) ++stats_.projected_frames;

  std::vector<FeatureVector> emas;
  emas.reserve(tracks_.size());
  for (const auto& t : tracks_) emas.push_back(t.ema);

  SimilarityMatrix original = cosine_matrix(feats, emas);
  std::optional<SimilarityMatrix> projected;
  if (proj) projected = cosine_matrix(project(feats, *proj), project(emas, *proj));
  const double alpha = proj ? config_.alpha : 0.0;
  SimilarityMatrix similarity =
      projected ? blend_similarity(*projected, original, alpha) : original;

  if (observer_) {
    SimilarityTrace trace;
    trace.frame = input.frame;
    for (const auto& t : tracks_) trace.track_ids.push_back(t.id);
    trace.detection_indices = kept;
    trace.original = original;
    trace.projected = projected;
    trace.integrated = similarity;
    trace.alpha = alpha;
    observer_(trace);
  }

  const Assignment assignment = solve_assignment(build_cost(similarity));

  std::vector<char> det_taken(kept.size(), 0);
  std::vector<char> track_hit(tracks_.size(), 0);
  for (const auto& [row, col] : assignment.pairs) {
    const double normalized_sim = (similarity(row, col) + 1.0) / 2.0;
    if (!(normalized_sim > config_.tau_sim)) continue;
    det_taken[row] = 1;
    track_hit[col] = 1;
    TrajectoryState& t = tracks_[col];
    t.queue.push(feats[row], 0);
    t.ema = ema_update(t.ema, feats[row], config_.alpha_ema);
    t.last_seen_frame = input.frame;
    t.misses = 0;
    const std::size_t det = kept[row];
    report.matched.emplace_back(det, t.id);
    report.records.push_back(TrackRecord{input.frame, t.id, input.boxes[det]});
  }

  // Misses and removals for existing tracks; newborns are appended after.
  std::vector<TrajectoryState> survivors;
  survivors.reserve(tracks_.size() + kept.size());
  for (std::size_t j = 0; j < tracks_.size(); ++j) {
    TrajectoryState& t = tracks_[j];
    if (!track_hit[j]) {
      t.misses = static_cast<std::uint32_t>(input.frame - t.last_seen_frame);
      if (t.misses > config_.tau_miss) {
        report.removed.push_back(t.id);
        continue;
      }
    }
    survivors.push_back(std::move(t));
  }

  for (std::size_t row = 0; row < kept.size(); ++row) {
    if (det_taken[row]) continue;
    const std::size_t det = kept[row];
    if (!(input.confidences[det] > config_.tau_new)) continue;
    TrajectoryState t;
    t.id = next_id_++;
    t.queue = FeatureQueue(t.id, config_.queue_length);
    t.queue.push(feats[row], 0);
    t.ema = feats[row];
    t.last_seen_frame = input.frame;
    report.newborn.push_back(t.id);
    report.records.push_back(TrackRecord{input.frame, t.id, input.boxes[det]});
    survivors.push_back(std::move(t));
  }
  tracks_ = std::move(survivors);

  std::sort(report.records.begin(), report.records.end(),
            [](const TrackRecord& a, const TrackRecord& b) { return a.id < b.id; });
  records_.insert(records_.end(), report.records.begin(), report.records.end());

  last_frame_ = input.frame;
  ++frames_since_fit_;
  ++stats_.frames;
  return report;
}

std::vector<TrackRecord> Tracker::finalize() const {
  std::vector<TrackRecord> out = records_;
  std::stable_sort(out.begin(), out.end(), [](const TrackRecord& a, const TrackRecord& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  return out;
}

}  // namespace hat
