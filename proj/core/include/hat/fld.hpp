#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <vector>

#include "hat/linalg.hpp"

namespace hat {

using TrackId = std::int64_t;

/// Similarities between detections (rows) and trajectories (columns).
using SimilarityMatrix = Matrix;

/// One stored observation: `age` counts frames before the current one.
struct QueueEntry {
  std::uint32_t age = 0;
  FeatureVector feature;
};

/// Bounded FIFO of a trajectory's recent features, newest first. Ages grow
/// strictly from the front.
class FeatureQueue {
 public:
  FeatureQueue(TrackId identity, std::size_t capacity);

  /// Inserts at the front with the given age, evicting the oldest entries
  /// beyond capacity. `age` must be smaller than the current front's age.
  void push(FeatureVector feature, std::uint32_t age = 0);
  /// Ages every entry by `frames`.
  void advance(std::uint32_t frames);

  TrackId identity() const noexcept { return identity_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t dim() const noexcept { return entries_.empty() ? 0 : entries_.front().feature.size(); }
  const std::deque<QueueEntry>& entries() const noexcept { return entries_; }

 private:
  TrackId identity_;
  std::size_t capacity_;
  std::deque<QueueEntry> entries_;
};

/// How trajectory centroids and the global mean are formed.
enum class CentroidMode : std::uint8_t {
  Plain,           // unweighted average of the queue
  TemporalShifted  // weights lambda0^age favouring recent features
};

struct CentroidSet {
  std::map<TrackId, FeatureVector> per_class;
  FeatureVector global;
  double lambda0 = 1.0;
};

enum class ProjectionKind : std::uint8_t { Fld, Pca };

/// D x D' linear map applied as f' = fᵀW.
struct ProjectionMatrix {
  Matrix w;
  std::vector<double> eigenvalues;
  double epsilon = 0.0;
  std::size_t class_count = 0;
  std::size_t sample_count = 0;
  ProjectionKind kind = ProjectionKind::Fld;

  std::size_t input_dim() const noexcept { return w.rows(); }
  std::size_t output_dim() const noexcept { return w.cols(); }
};

/// Unweighted mean of the queue entries.
FeatureVector plain_centroid(const FeatureQueue& queue);

/// Σ λ0^age f / Σ λ0^age over the queue. With lambda0 == 1 the result is
/// bit-identical to plain_centroid.
FeatureVector weighted_centroid(const FeatureQueue& queue, double lambda0);

/// The same weighting applied to the union of all queues.
FeatureVector weighted_global_mean(std::span<const FeatureQueue> queues, double lambda0);
FeatureVector plain_global_mean(std::span<const FeatureQueue> queues);

CentroidSet compute_centroids(std::span<const FeatureQueue> queues, CentroidMode mode,
                              double lambda0);

/// Σ_c Σ_x (x − m_c)(x − m_c)ᵀ, exactly symmetric.
Matrix scatter_within(std::span<const FeatureQueue> queues, const CentroidSet& centroids);

/// Σ_c N_c (m_c − m)(m_c − m)ᵀ with N_c the queue length, exactly symmetric.
Matrix scatter_between(std::span<const FeatureQueue> queues, const CentroidSet& centroids);

/// S_W + epsilon·(trace(S_W)/D + 1e-8)·I
Matrix regularize_within(const Matrix& s_w, double epsilon);

/// Fisher discriminant over the trajectory queues. Keeps the leading
/// min(C − 1, D) generalized eigenvectors of (S_B, S_W,reg).
ProjectionMatrix fit_projection(std::span<const FeatureQueue> queues, double lambda0,
                                double epsilon,
                                CentroidMode mode = CentroidMode::TemporalShifted);

/// Principal axes of the pooled samples, for comparison against the Fisher
/// projection. Returns min(target_dim, D) columns.
ProjectionMatrix fit_pca_projection(std::span<const FeatureQueue> queues, std::size_t target_dim);

FeatureVector project(std::span<const double> feature, const ProjectionMatrix& proj);
std::vector<FeatureVector> project(const std::vector<FeatureVector>& features,
                                   const ProjectionMatrix& proj);

/// Pairwise cosine between every row feature and every column feature.
SimilarityMatrix cosine_matrix(const std::vector<FeatureVector>& rows,
                               const std::vector<FeatureVector>& cols);

/// α·projected + (1 − α)·original, entrywise.
SimilarityMatrix blend_similarity(const SimilarityMatrix& projected,
                                  const SimilarityMatrix& original, double alpha);

/// Knowledge-integrated similarity. With no projection (or alpha == 0) this
/// is the plain cosine matrix.
SimilarityMatrix integrated_similarity(const std::vector<FeatureVector>& det_feats,
                                       const std::vector<FeatureVector>& traj_emas,
                                       const ProjectionMatrix* proj, double alpha);

}  // namespace hat
