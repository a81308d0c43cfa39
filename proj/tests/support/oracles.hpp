#pragma once

// Independent reference computations used by the unit tests and the
// acceptance runner. They favour obviousness over speed and share no code
// with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "hat/fld.hpp"
#include "hat/linalg.hpp"
#include "hat/records.hpp"
#include "hat/rng.hpp"

namespace hat::oracle {

inline Matrix random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

inline Matrix random_symmetric(SplitMix64& rng, std::size_t n) {
  Matrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c <= r; ++c) m(r, c) = m(c, r) = rng.normal();
  return m;
}

/// GᵀG + I
inline Matrix random_spd(SplitMix64& rng, std::size_t n) {
  const Matrix g = random_matrix(rng, n, n);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = i == j ? 1.0 : 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += g(k, i) * g(k, j);
      s(i, j) = acc;
    }
  return s;
}

inline Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

inline Matrix naive_transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

/// Gauss-Jordan with partial pivoting.
inline Matrix inverse(Matrix a) {
  const std::size_t n = a.rows();
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    for (std::size_t c = 0; c < n; ++c) {
      std::swap(a(col, c), a(pivot, c));
      std::swap(inv(col, c), inv(pivot, c));
    }
    const double p = a(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) /= p;
      inv(col, c) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

inline FeatureVector solve(const Matrix& a, const FeatureVector& b) {
  const Matrix inv = inverse(a);
  FeatureVector x(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) x[i] += inv(i, k) * b[k];
  return x;
}

// Scatter by direct summation ------------------------------------------------

inline FeatureVector weighted_mean(const std::vector<const QueueEntry*>& entries, double lambda0) {
  const std::size_t d = entries.front()->feature.size();
  FeatureVector acc(d, 0.0);
  double total = 0.0;
  for (const auto* e : entries) {
    const double w = std::pow(lambda0, static_cast<double>(e->age));
    for (std::size_t i = 0; i < d; ++i) acc[i] += w * e->feature[i];
    total += w;
  }
  for (double& v : acc) v /= total;
  return acc;
}

inline Matrix naive_scatter_within(const std::vector<FeatureQueue>& queues,
                                   const std::map<TrackId, FeatureVector>& means) {
  const std::size_t d = queues.front().dim();
  Matrix s(d, d);
  for (const auto& q : queues) {
    const auto& m = means.at(q.identity());
    for (const auto& e : q.entries())
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) s(i, j) += (e.feature[i] - m[i]) * (e.feature[j] - m[j]);
  }
  return s;
}

inline Matrix naive_scatter_between(const std::vector<FeatureQueue>& queues,
                                    const std::map<TrackId, FeatureVector>& means,
                                    const FeatureVector& global) {
  const std::size_t d = global.size();
  Matrix s(d, d);
  for (const auto& q : queues) {
    const auto& m = means.at(q.identity());
    const double n = static_cast<double>(q.size());
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) s(i, j) += n * (m[i] - global[i]) * (m[j] - global[j]);
  }
  return s;
}

/// Temporal-shifted centroids and global mean by direct evaluation.
inline std::pair<std::map<TrackId, FeatureVector>, FeatureVector> naive_centroids(
    const std::vector<FeatureQueue>& queues, double lambda0) {
  std::map<TrackId, FeatureVector> means;
  std::vector<const QueueEntry*> all;
  for (const auto& q : queues) {
    std::vector<const QueueEntry*> mine;
    for (const auto& e : q.entries()) {
      mine.push_back(&e);
      all.push_back(&e);
    }
    means[q.identity()] = weighted_mean(mine, lambda0);
  }
  return {means, weighted_mean(all, lambda0)};
}

/// tr((WᵀSwW)⁻¹ (WᵀSbW))
inline double fisher_criterion(const Matrix& w, const Matrix& s_w, const Matrix& s_b) {
  const Matrix wt = naive_transpose(w);
  const Matrix within = naive_product(wt, naive_product(s_w, w));
  const Matrix between = naive_product(wt, naive_product(s_b, w));
  const Matrix ratio = naive_product(inverse(within), between);
  double tr = 0.0;
  for (std::size_t i = 0; i < ratio.rows(); ++i) tr += ratio(i, i);
  return tr;
}

/// Random multi-class queues: class means spread by `spread`, unit noise.
inline std::vector<FeatureQueue> random_queues(SplitMix64& rng, std::size_t classes,
                                               std::size_t dim, std::size_t per_class,
                                               double spread = 3.0) {
  std::vector<FeatureQueue> queues;
  for (std::size_t c = 0; c < classes; ++c) {
    FeatureVector mean(dim);
    for (double& v : mean) v = spread * rng.normal();
    FeatureQueue q(static_cast<TrackId>(c + 1), per_class);
    for (std::size_t k = per_class; k-- > 0;) {
      FeatureVector f(dim);
      for (std::size_t i = 0; i < dim; ++i) f[i] = mean[i] + rng.normal();
      q.push(f, static_cast<std::uint32_t>(k + 1));
    }
    queues.push_back(std::move(q));
  }
  return queues;
}

// Assignment by enumeration ------------------------------------------------------

/// Minimum total cost over every injective map of the smaller side into the
/// larger one.
inline double brute_force_assignment(const Matrix& cost) {
  const std::size_t m = cost.rows();
  const std::size_t n = cost.cols();
  const bool rows_small = m <= n;
  const std::size_t small = rows_small ? m : n;
  const std::size_t large = rows_small ? n : m;
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::set<std::vector<std::size_t>> seen;
  do {
    std::vector<std::size_t> head(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(small));
    if (!seen.insert(head).second) continue;
    double total = 0.0;
    for (std::size_t k = 0; k < small; ++k) total += rows_small ? cost(k, head[k]) : cost(head[k], k);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// IDF1 by enumerating identity bijections ----------------------------------------

inline double box_iou(const Box& a, const Box& b) {
  const double x0 = std::max(a.left, b.left);
  const double y0 = std::max(a.top, b.top);
  const double x1 = std::min(a.left + a.width, b.left + b.width);
  const double y1 = std::min(a.top + a.height, b.top + b.height);
  const double inter = std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0);
  return inter / (a.width * a.height + b.width * b.height - inter);
}

/// IDF1 = 2·IDTP / (|gt| + |pred|), IDTP maximized over every partial
/// one-to-one pairing of gt ids with predicted ids.
inline double exhaustive_idf1(const std::vector<TrackRecord>& pred,
                              const std::vector<TrackRecord>& gt, double thr = 0.5) {
  std::vector<std::int64_t> gids, pids;
  for (const auto& r : gt) gids.push_back(r.id);
  for (const auto& r : pred) pids.push_back(r.id);
  std::sort(gids.begin(), gids.end());
  gids.erase(std::unique(gids.begin(), gids.end()), gids.end());
  std::sort(pids.begin(), pids.end());
  pids.erase(std::unique(pids.begin(), pids.end()), pids.end());

  auto co_detected = [&](std::int64_t g, std::int64_t p) {
    double count = 0.0;
    for (const auto& a : gt) {
      if (a.id != g) continue;
      for (const auto& b : pred)
        if (b.id == p && b.frame == a.frame && box_iou(a.box, b.box) >= thr) count += 1.0;
    }
    return count;
  };

  std::vector<std::vector<double>> table(gids.size(), std::vector<double>(pids.size()));
  for (std::size_t g = 0; g < gids.size(); ++g)
    for (std::size_t p = 0; p < pids.size(); ++p) table[g][p] = co_detected(gids[g], pids[p]);

  // Every injective partial map from gt ids to predicted ids, depth first.
  double best = 0.0;
  std::vector<bool> used(pids.size(), false);
  auto search = [&](auto&& self, std::size_t g, double idtp) -> void {
    if (g == gids.size()) {
      best = std::max(best, idtp);
      return;
    }
    self(self, g + 1, idtp);
    for (std::size_t p = 0; p < pids.size(); ++p) {
      if (used[p]) continue;
      used[p] = true;
      self(self, g + 1, idtp + table[g][p]);
      used[p] = false;
    }
  };
  search(search, 0, 0.0);

  const double denom = static_cast<double>(gt.size() + pred.size());
  return denom > 0.0 ? 2.0 * best / denom : 0.0;
}

}  // namespace hat::oracle
