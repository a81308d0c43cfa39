#include "hat/fld.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hat/error.hpp"

namespace hat {

FeatureQueue::FeatureQueue(TrackId identity, std::size_t capacity)
    : identity_(identity), capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorCode::Config, "feature queue capacity must be >= 1");
}

void FeatureQueue::push(FeatureVector feature, std::uint32_t age) {
  if (!entries_.empty()) {
    if (feature.size() != dim()) {
      throw Error(ErrorCode::DimensionMismatch, "queue feature dim " +
                                                    std::to_string(feature.size()) + " != " +
                                                    std::to_string(dim()));
    }
    if (age >= entries_.front().age) {
      throw Error(ErrorCode::InvalidArgument, "queue ages must increase from the front");
    }
  }
  entries_.push_front(QueueEntry{age, std::move(feature)});
  while (entries_.size() > capacity_) entries_.pop_back();
}

void FeatureQueue::advance(std::uint32_t frames) {
  for (auto& e : entries_) e.age += frames;
}

namespace {

void require_nonempty(const FeatureQueue& q) {
  if (q.empty()) {
    throw Error(ErrorCode::EmptyQueue,
                "feature queue of track " + std::to_string(q.identity()) + " is empty");
  }
}

void require_lambda(double lambda0) {
  if (!(lambda0 > 0.0 && lambda0 <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "lambda0 must lie in (0, 1]");
  }
}

std::size_t common_dim(std::span<const FeatureQueue> queues) {
  std::size_t dim = 0;
  for (const auto& q : queues) {
    for (const auto& e : q.entries()) {
      if (dim == 0) dim = e.feature.size();
      if (e.feature.size() != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "track " + std::to_string(q.identity()) + " holds a feature of dim " +
                        std::to_string(e.feature.size()) + ", expected " + std::to_string(dim));
      }
    }
  }
  return dim;
}

// acc += w·f. With w == 1 the products are exact, so the plain and weighted
// paths agree bit for bit.
void accumulate(FeatureVector& acc, std::span<const double> f, double w) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * f[i];
}

void accumulate(FeatureVector& acc, std::span<const double> f) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f[i];
}

void divide(FeatureVector& v, double denom) {
  for (double& x : v) x /= denom;
}

// Upper triangle of s += x xᵀ; mirrored by the caller.
void add_outer_upper(Matrix& s, std::span<const double> x, double scale = 1.0) {
  const std::size_t d = x.size();
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = scale * x[i];
    if (xi == 0.0) continue;
    double* si = s.data() + i * d;
    for (std::size_t j = i; j < d; ++j) si[j] += xi * x[j];
  }
}

// Upper triangle of s += Xᵀ X. Eight samples share each pass over s, which
// is what bounds the cost once D² no longer fits in L1.
void add_gram_upper(Matrix& s, const Matrix& x) {
  const std::size_t d = x.cols();
  const std::size_t n = x.rows();
  std::size_t r = 0;
  for (; r + 8 <= n; r += 8) {
    const double* x0 = x.data() + r * d;
    const double* x1 = x0 + d;
    const double* x2 = x1 + d;
    const double* x3 = x2 + d;
    const double* x4 = x3 + d;
    const double* x5 = x4 + d;
    const double* x6 = x5 + d;
    const double* x7 = x6 + d;
    for (std::size_t i = 0; i < d; ++i) {
      const double a0 = x0[i], a1 = x1[i], a2 = x2[i], a3 = x3[i];
      const double a4 = x4[i], a5 = x5[i], a6 = x6[i], a7 = x7[i];
      double* si = s.data() + i * d;
      for (std::size_t j = i; j < d; ++j) {
        si[j] += ((a0 * x0[j] + a1 * x1[j]) + (a2 * x2[j] + a3 * x3[j])) +
                 ((a4 * x4[j] + a5 * x5[j]) + (a6 * x6[j] + a7 * x7[j]));
      }
    }
  }
  for (; r < n; ++r) add_outer_upper(s, x.row(r));
}

void mirror_upper(Matrix& s) {
  const std::size_t d = s.rows();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) s(i, j) = s(j, i);
}

// Eigenvectors as D x k columns.
Matrix leading_columns(const Matrix& vectors, std::size_t k) {
  Matrix w(vectors.rows(), k);
  for (std::size_t r = 0; r < vectors.rows(); ++r)
    for (std::size_t c = 0; c < k; ++c) w(r, c) = vectors(r, c);
  return w;
}

}  // namespace

FeatureVector plain_centroid(const FeatureQueue& queue) {
  require_nonempty(queue);
  FeatureVector acc(queue.dim(), 0.0);
  double count = 0.0;
  for (const auto& e : queue.entries()) {
    accumulate(acc, e.feature);
    count += 1.0;
  }
  divide(acc, count);
  return acc;
}

FeatureVector weighted_centroid(const FeatureQueue& queue, double lambda0) {
  require_nonempty(queue);
  require_lambda(lambda0);
  FeatureVector acc(queue.dim(), 0.0);
  double total = 0.0;
  for (const auto& e : queue.entries()) {
    const double w = std::pow(lambda0, static_cast<double>(e.age));
    accumulate(acc, e.feature, w);
    total += w;
  }
  divide(acc, total);
  return acc;
}

FeatureVector weighted_global_mean(std::span<const FeatureQueue> queues, double lambda0) {
  require_lambda(lambda0);
  const std::size_t dim = common_dim(queues);
  if (dim == 0) throw Error(ErrorCode::EmptySampleSet, "no samples for the global mean");
  FeatureVector acc(dim, 0.0);
  double total = 0.0;
  for (const auto& q : queues)
    for (const auto& e : q.entries()) {
      const double w = std::pow(lambda0, static_cast<double>(e.age));
      accumulate(acc, e.feature, w);
      total += w;
    }
  divide(acc, total);
  return acc;
}

FeatureVector plain_global_mean(std::span<const FeatureQueue> queues) {
  const std::size_t dim = common_dim(queues);
  if (dim == 0) throw Error(ErrorCode::EmptySampleSet, "no samples for the global mean");
  FeatureVector acc(dim, 0.0);
  double count = 0.0;
  for (const auto& q : queues)
    for (const auto& e : q.entries()) {
      accumulate(acc, e.feature);
      count += 1.0;
    }
  divide(acc, count);
  return acc;
}

CentroidSet compute_centroids(std::span<const FeatureQueue> queues, CentroidMode mode,
                              double lambda0) {
  CentroidSet set;
  set.lambda0 = mode == CentroidMode::Plain ? 1.0 : lambda0;
  for (const auto& q : queues) {
    if (set.per_class.contains(q.identity())) {
      throw Error(ErrorCode::InvalidArgument,
                  "duplicate queue identity " + std::to_string(q.identity()));
    }
    set.per_class.emplace(q.identity(), mode == CentroidMode::Plain
                                            ? plain_centroid(q)
                                            : weighted_centroid(q, lambda0));
  }
  if (!set.per_class.empty()) {
    set.global = mode == CentroidMode::Plain ? plain_global_mean(queues)
                                             : weighted_global_mean(queues, lambda0);
  }
  return set;
}

Matrix scatter_within(std::span<const FeatureQueue> queues, const CentroidSet& centroids) {
  const std::size_t dim = common_dim(queues);
  std::size_t samples = 0;
  for (const auto& q : queues) samples += q.size();
  Matrix devs(samples, dim);
  std::size_t row = 0;
  for (const auto& q : queues) {
    const auto it = centroids.per_class.find(q.identity());
    if (it == centroids.per_class.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  "no centroid for track " + std::to_string(q.identity()));
    }
    const FeatureVector& m = it->second;
    if (m.size() != dim && !q.empty()) {
      throw Error(ErrorCode::DimensionMismatch, "centroid dim differs from feature dim");
    }
    for (const auto& e : q.entries()) {
      double* dev = devs.data() + row++ * dim;
      for (std::size_t i = 0; i < dim; ++i) dev[i] = e.feature[i] - m[i];
    }
  }
  Matrix s(dim, dim);
  add_gram_upper(s, devs);
  mirror_upper(s);
  return s;
}

Matrix scatter_between(std::span<const FeatureQueue> queues, const CentroidSet& centroids) {
  const std::size_t dim = common_dim(queues);
  Matrix s(dim, dim);
  if (dim == 0) return s;
  if (centroids.global.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "global mean dim differs from feature dim");
  }
  FeatureVector dev(dim);
  for (const auto& q : queues) {
    const auto it = centroids.per_class.find(q.identity());
    if (it == centroids.per_class.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  "no centroid for track " + std::to_string(q.identity()));
    }
    if (it->second.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "centroid dim differs from feature dim");
    }
    for (std::size_t i = 0; i < dim; ++i) dev[i] = it->second[i] - centroids.global[i];
    add_outer_upper(s, dev, static_cast<double>(q.size()));
  }
  mirror_upper(s);
  return s;
}

Matrix regularize_within(const Matrix& s_w, double epsilon) {
  const double d = static_cast<double>(s_w.rows());
  const double shrink = epsilon * (s_w.trace() / d + 1e-8);
  Matrix out = s_w;
  for (std::size_t i = 0; i < s_w.rows(); ++i) out(i, i) += shrink;
  return out;
}

ProjectionMatrix fit_projection(std::span<const FeatureQueue> queues, double lambda0,
                                double epsilon, CentroidMode mode) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const std::size_t classes = queues.size();
  if (classes < 2) {
    throw Error(ErrorCode::InsufficientClasses,
                "Fisher projection needs at least 2 classes, got " + std::to_string(classes));
  }
  std::size_t samples = 0;
  for (const auto& q : queues) {
    require_nonempty(q);
    samples += q.size();
  }
  if (samples < classes + 1) {
    throw Error(ErrorCode::InsufficientSamples,
                std::to_string(samples) + " samples for " + std::to_string(classes) +
                    " classes; need at least C + 1");
  }
  const std::size_t dim = common_dim(queues);

  const CentroidSet centroids = compute_centroids(queues, mode, lambda0);
  const Matrix s_w = regularize_within(scatter_within(queues, centroids), epsilon);
  const Matrix s_b = scatter_between(queues, centroids);

  const std::size_t out_dim = std::min(classes - 1, dim);
  EigenResult eig = generalized_eig(s_b, s_w, out_dim);

  ProjectionMatrix proj;
  proj.w = leading_columns(eig.eigenvectors, out_dim);
  proj.eigenvalues = std::move(eig.eigenvalues);
  proj.epsilon = epsilon;
  proj.class_count = classes;
  proj.sample_count = samples;
  proj.kind = ProjectionKind::Fld;
  return proj;
}

ProjectionMatrix fit_pca_projection(std::span<const FeatureQueue> queues, std::size_t target_dim) {
  std::size_t samples = 0;
  for (const auto& q : queues) samples += q.size();
  if (samples < 2) {
    throw Error(ErrorCode::InsufficientSamples, "PCA needs at least 2 samples");
  }
  if (target_dim == 0) throw Error(ErrorCode::InvalidArgument, "PCA target dim must be >= 1");
  const std::size_t dim = common_dim(queues);
  const FeatureVector mean = plain_global_mean(queues);

  Matrix devs(samples, dim);
  std::size_t row = 0;
  for (const auto& q : queues)
    for (const auto& e : q.entries()) {
      double* dev = devs.data() + row++ * dim;
      for (std::size_t i = 0; i < dim; ++i) dev[i] = e.feature[i] - mean[i];
    }
  Matrix cov(dim, dim);
  add_gram_upper(cov, devs);
  mirror_upper(cov);
  const double inv_n = 1.0 / static_cast<double>(samples);
  for (std::size_t i = 0; i < dim * dim; ++i) cov.data()[i] *= inv_n;

  const std::size_t out_dim = std::min(target_dim, dim);
  EigenResult eig = sym_eig(cov, out_dim);

  ProjectionMatrix proj;
  proj.w = leading_columns(eig.eigenvectors, out_dim);
  proj.eigenvalues = std::move(eig.eigenvalues);
  proj.class_count = queues.size();
  proj.sample_count = samples;
  proj.kind = ProjectionKind::Pca;
  return proj;
}

FeatureVector project(std::span<const double> feature, const ProjectionMatrix& proj) {
  const Matrix& w = proj.w;
  if (feature.size() != w.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "feature dim " + std::to_string(feature.size()) + " != projection input dim " +
                    std::to_string(w.rows()));
  }
  FeatureVector out(w.cols(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double fr = feature[r];
    const auto wr = w.row(r);
    for (std::size_t c = 0; c < w.cols(); ++c) out[c] += fr * wr[c];
  }
  return out;
}

std::vector<FeatureVector> project(const std::vector<FeatureVector>& features,
                                   const ProjectionMatrix& proj) {
  std::vector<FeatureVector> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(project(f, proj));
  return out;
}

SimilarityMatrix cosine_matrix(const std::vector<FeatureVector>& rows,
                               const std::vector<FeatureVector>& cols) {
  SimilarityMatrix s(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = cosine(rows[i], cols[j]);
  return s;
}

SimilarityMatrix blend_similarity(const SimilarityMatrix& projected,
                                  const SimilarityMatrix& original, double alpha) {
  if (projected.rows() != original.rows() || projected.cols() != original.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "similarity matrices differ in shape");
  }
  SimilarityMatrix s(original.rows(), original.cols());
  for (std::size_t i = 0; i < s.entries().size(); ++i) {
    s.data()[i] = alpha * projected.data()[i] + (1.0 - alpha) * original.data()[i];
  }
  return s;
}

SimilarityMatrix integrated_similarity(const std::vector<FeatureVector>& det_feats,
                                       const std::vector<FeatureVector>& traj_emas,
                                       const ProjectionMatrix* proj, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
  }
  SimilarityMatrix original = cosine_matrix(det_feats, traj_emas);
  if (proj == nullptr || alpha == 0.0) return original;
  const SimilarityMatrix projected =
      cosine_matrix(project(det_feats, *proj), project(traj_emas, *proj));
  return blend_similarity(projected, original, alpha);
}

}  // namespace hat
