#include <cmath>

#include "doctest.h"
#include "hat/error.hpp"
#include "hat/fld.hpp"
#include "support/oracles.hpp"

using namespace hat;

namespace {

FeatureQueue queue_of(TrackId id, std::vector<std::pair<std::uint32_t, FeatureVector>> oldest_first,
                      std::size_t capacity = 60) {
  FeatureQueue q(id, capacity);
  for (auto& [age, f] : oldest_first) q.push(f, age);
  return q;
}

template <typename Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("feature queue keeps newest first and evicts the oldest") {
  FeatureQueue q(4, 3);
  q.push({1, 0}, 5);
  q.push({0, 1}, 2);
  q.push({1, 1}, 1);
  q.push({2, 2}, 0);
  REQUIRE(q.size() == 3);
  CHECK(q.entries().front().age == 0);
  CHECK(q.entries().back().age == 2);
  q.advance(3);
  CHECK(q.entries().front().age == 3);
  CHECK_THROWS_AS(q.push({0, 0}, 3), Error);
}

TEST_CASE("weighted centroid") {
  const FeatureVector a{1, 0}, b{0, 1};
  SUBCASE("lambda0 = 1 is the plain mean") {
    const FeatureQueue q = queue_of(1, {{2, a}, {1, b}});
    const FeatureVector m = weighted_centroid(q, 1.0);
    CHECK(m[0] == 0.5);
    CHECK(m[1] == 0.5);
  }
  SUBCASE("lambda0 = 0.9 with ages 1 and 2") {
    const FeatureVector fa{3, -1}, fb{-2, 5};
    const FeatureQueue q = queue_of(1, {{2, fb}, {1, fa}});
    const FeatureVector m = weighted_centroid(q, 0.9);
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(m[i] == doctest::Approx((0.9 * fa[i] + 0.81 * fb[i]) / 1.71).epsilon(1e-14));
  }
  SUBCASE("single entry") {
    const FeatureQueue q = queue_of(1, {{7, FeatureVector{0.3, -0.4}}});
    for (double l : {0.1, 0.5, 0.9, 1.0}) CHECK(weighted_centroid(q, l) == FeatureVector{0.3, -0.4});
  }
  SUBCASE("empty queue") {
    const FeatureQueue q(1, 5);
    CHECK(error_of([&] { (void)weighted_centroid(q, 0.9); }) == ErrorCode::EmptyQueue);
  }
}

TEST_CASE("weighted global mean") {
  const FeatureVector a{2, 0}, b{0, 2};
  std::vector<FeatureQueue> one{queue_of(1, {{1, a}})};
  CHECK(weighted_global_mean(one, 0.9) == a);

  std::vector<FeatureQueue> two{queue_of(1, {{1, a}}), queue_of(2, {{1, b}})};
  CHECK(weighted_global_mean(two, 1.0) == FeatureVector{1, 1});

  std::vector<FeatureQueue> aged{queue_of(1, {{1, a}}), queue_of(2, {{2, b}})};
  const FeatureVector m = weighted_global_mean(aged, 0.9);
  CHECK(m[0] == doctest::Approx(0.9 * 2 / 1.71));
  CHECK(m[1] == doctest::Approx(0.81 * 2 / 1.71));

  std::vector<FeatureQueue> none{FeatureQueue(1, 3)};
  CHECK(error_of([&] { (void)weighted_global_mean(none, 0.9); }) == ErrorCode::EmptySampleSet);
}

TEST_CASE("lambda0 = 1 reproduces the unweighted centroids bit for bit") {
  SplitMix64 rng(31);
  const auto queues = oracle::random_queues(rng, 6, 9, 17);
  for (const auto& q : queues) CHECK(weighted_centroid(q, 1.0) == plain_centroid(q));
  CHECK(weighted_global_mean(queues, 1.0) == plain_global_mean(queues));
}

TEST_CASE("scatter within") {
  SUBCASE("one class, symmetric pair") {
    std::vector<FeatureQueue> qs{queue_of(1, {{2, FeatureVector{1, 0}}, {1, FeatureVector{-1, 0}}})};
    CentroidSet cs{{{1, FeatureVector{0, 0}}}, FeatureVector{0, 0}, 1.0};
    CHECK(scatter_within(qs, cs) == Matrix::from_rows({{2, 0}, {0, 0}}));
  }
  SUBCASE("single samples at their centroids") {
    std::vector<FeatureQueue> qs{queue_of(1, {{1, FeatureVector{1, 2}}}),
                                 queue_of(2, {{1, FeatureVector{-3, 4}}})};
    const CentroidSet cs = compute_centroids(qs, CentroidMode::TemporalShifted, 0.9);
    CHECK(scatter_within(qs, cs) == Matrix(2, 2));
  }
  SUBCASE("random 3-class set against direct summation") {
    SplitMix64 rng(11);
    const auto qs = oracle::random_queues(rng, 3, 7, 9);
    const CentroidSet cs = compute_centroids(qs, CentroidMode::TemporalShifted, 0.9);
    const Matrix s = scatter_within(qs, cs);
    CHECK(oracle::max_abs_diff(s, oracle::naive_scatter_within(qs, cs.per_class)) <= 1e-10);
    CHECK(s == s.transpose());
  }
  SUBCASE("dimension mismatch") {
    std::vector<FeatureQueue> qs{queue_of(1, {{1, FeatureVector{1, 2}}}),
                                 queue_of(2, {{1, FeatureVector{1, 2, 3}}})};
    CentroidSet cs{{{1, FeatureVector{1, 2}}, {2, FeatureVector{1, 2, 3}}}, FeatureVector{0, 0}, 1.0};
    CHECK(error_of([&] { (void)scatter_within(qs, cs); }) == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("scatter between") {
  SUBCASE("two classes with two samples each") {
    std::vector<FeatureQueue> qs{
        queue_of(1, {{2, FeatureVector{1, 1}}, {1, FeatureVector{1, -1}}}),
        queue_of(2, {{2, FeatureVector{-1, 1}}, {1, FeatureVector{-1, -1}}})};
    CentroidSet cs{{{1, FeatureVector{1, 0}}, {2, FeatureVector{-1, 0}}}, FeatureVector{0, 0}, 1.0};
    CHECK(scatter_between(qs, cs) == Matrix::from_rows({{4, 0}, {0, 0}}));
  }
  SUBCASE("equal class means") {
    std::vector<FeatureQueue> qs{queue_of(1, {{1, FeatureVector{1, 2}}}),
                                 queue_of(2, {{1, FeatureVector{1, 2}}})};
    const CentroidSet cs = compute_centroids(qs, CentroidMode::TemporalShifted, 0.9);
    CHECK(scatter_between(qs, cs) == Matrix(2, 2));
  }
  SUBCASE("random 4-class set against direct summation") {
    SplitMix64 rng(3);
    const auto qs = oracle::random_queues(rng, 4, 8, 6);
    const CentroidSet cs = compute_centroids(qs, CentroidMode::TemporalShifted, 0.9);
    const Matrix s = scatter_between(qs, cs);
    CHECK(oracle::max_abs_diff(s, oracle::naive_scatter_between(qs, cs.per_class, cs.global)) <=
          1e-10);
    CHECK(s == s.transpose());
  }
  SUBCASE("rank is at most C - 1") {
    SplitMix64 rng(17);
    const auto qs = oracle::random_queues(rng, 4, 10, 5);
    const CentroidSet cs = compute_centroids(qs, CentroidMode::TemporalShifted, 0.9);
    const Matrix s = scatter_between(qs, cs);
    const EigenResult e = sym_eig(s);
    for (std::size_t k = 3; k < e.eigenvalues.size(); ++k)
      CHECK(std::abs(e.eigenvalues[k]) <= 1e-8 * s.trace());
  }
}

TEST_CASE("centroids from the library agree with direct evaluation") {
  SplitMix64 rng(23);
  const auto qs = oracle::random_queues(rng, 5, 6, 12);
  const CentroidSet cs = compute_centroids(qs, CentroidMode::TemporalShifted, 0.9);
  const auto [means, global] = oracle::naive_centroids(qs, 0.9);
  for (const auto& [id, m] : means)
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(cs.per_class.at(id)[i] == doctest::Approx(m[i]).epsilon(1e-13));
  for (std::size_t i = 0; i < global.size(); ++i) CHECK(cs.global[i] == doctest::Approx(global[i]).epsilon(1e-13));
}

TEST_CASE("regularization adds a scaled identity") {
  const Matrix s = Matrix::from_rows({{2, 1}, {1, 4}});
  const Matrix r = regularize_within(s, 1e-3);
  const double shrink = 1e-3 * (3.0 + 1e-8);
  CHECK(r(0, 0) == 2.0 + shrink);
  CHECK(r(1, 1) == 4.0 + shrink);
  CHECK(r(0, 1) == 1.0);
}

TEST_CASE("two-class projection is the closed-form discriminant") {
  SplitMix64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const auto qs = oracle::random_queues(rng, 2, 2, 20);
    const ProjectionMatrix p = fit_projection(qs, 0.9, 1e-3);
    REQUIRE(p.output_dim() == 1);
    const CentroidSet cs = compute_centroids(qs, CentroidMode::TemporalShifted, 0.9);
    const Matrix swr = regularize_within(scatter_within(qs, cs), 1e-3);
    FeatureVector diff(2);
    for (std::size_t i = 0; i < 2; ++i) diff[i] = cs.per_class.at(1)[i] - cs.per_class.at(2)[i];
    const FeatureVector expected = oracle::solve(swr, diff);
    CHECK(std::abs(cosine(p.w.column(0), expected)) >= 0.999);
  }
}

TEST_CASE("fit_projection shapes and errors") {
  SplitMix64 rng(4);
  SUBCASE("C = 5, D = 3 keeps three columns") {
    const auto qs = oracle::random_queues(rng, 5, 3, 4);
    const ProjectionMatrix p = fit_projection(qs, 0.9, 1e-3);
    CHECK(p.output_dim() == 3);
    CHECK(p.input_dim() == 3);
    CHECK(p.class_count == 5);
    CHECK(p.sample_count == 20);
  }
  SUBCASE("D' = min(C - 1, D)") {
    for (int k = 0; k < 20; ++k) {
      const std::size_t c = 2 + rng.below(8);
      const std::size_t d = 2 + rng.below(12);
      const auto qs = oracle::random_queues(rng, c, d, 1 + rng.below(5));
      std::size_t n = 0;
      for (const auto& q : qs) n += q.size();
      if (n < c + 1) continue;
      CHECK(fit_projection(qs, 0.9, 1e-3).output_dim() == std::min(c - 1, d));
    }
  }
  SUBCASE("one class") {
    const auto qs = oracle::random_queues(rng, 1, 3, 4);
    CHECK(error_of([&] { (void)fit_projection(qs, 0.9, 1e-3); }) == ErrorCode::InsufficientClasses);
  }
  SUBCASE("too few samples") {
    const auto qs = oracle::random_queues(rng, 3, 3, 1);
    CHECK(error_of([&] { (void)fit_projection(qs, 0.9, 1e-3); }) == ErrorCode::InsufficientSamples);
  }
  SUBCASE("epsilon must be positive") {
    const auto qs = oracle::random_queues(rng, 3, 3, 3);
    CHECK_THROWS_AS(fit_projection(qs, 0.9, 0.0), Error);
  }
}

TEST_CASE("columns are orthonormal under the regularized within-class scatter") {
  SplitMix64 rng(6);
  const auto qs = oracle::random_queues(rng, 6, 12, 8);
  const ProjectionMatrix p = fit_projection(qs, 0.9, 1e-3);
  const CentroidSet cs = compute_centroids(qs, CentroidMode::TemporalShifted, 0.9);
  const Matrix swr = regularize_within(scatter_within(qs, cs), p.epsilon);
  const Matrix g = oracle::naive_product(oracle::naive_transpose(p.w), oracle::naive_product(swr, p.w));
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) CHECK(std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-6);
}

TEST_CASE("the fitted projection maximizes the Fisher criterion") {
  SplitMix64 rng(8);
  const auto qs = oracle::random_queues(rng, 5, 9, 10);
  const ProjectionMatrix p = fit_projection(qs, 0.9, 1e-3);
  const CentroidSet cs = compute_centroids(qs, CentroidMode::TemporalShifted, 0.9);
  const Matrix swr = regularize_within(scatter_within(qs, cs), 1e-3);
  const Matrix sb = scatter_between(qs, cs);
  const double best = oracle::fisher_criterion(p.w, swr, sb);
  int strict = 0;
  for (int k = 0; k < 100; ++k) {
    const Matrix r = oracle::random_matrix(rng, p.w.rows(), p.w.cols());
    const double j = oracle::fisher_criterion(r, swr, sb);
    CHECK(best >= j - 1e-9 * (1.0 + std::abs(best)));
    if (best > j) ++strict;
  }
  CHECK(strict >= 95);
}

TEST_CASE("project") {
  SplitMix64 rng(5);
  SUBCASE("identity map") {
    ProjectionMatrix p;
    p.w = Matrix::identity(4);
    const FeatureVector f{0.1, -2, 3, 0.5};
    CHECK(project(f, p) == f);
    CHECK(project(FeatureVector(4, 0.0), p) == FeatureVector(4, 0.0));
  }
  SUBCASE("random map against naive multiplication") {
    ProjectionMatrix p;
    p.w = oracle::random_matrix(rng, 6, 3);
    FeatureVector f(6);
    for (double& x : f) x = rng.normal();
    const FeatureVector out = project(f, p);
    for (std::size_t c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (std::size_t r = 0; r < 6; ++r) acc += f[r] * p.w(r, c);
      CHECK(std::abs(out[c] - acc) <= 1e-12);
    }
  }
  SUBCASE("dimension mismatch") {
    ProjectionMatrix p;
    p.w = Matrix::identity(3);
    CHECK(error_of([&] { (void)project(FeatureVector{1, 2}, p); }) == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("integrated similarity") {
  SplitMix64 rng(9);
  const auto qs = oracle::random_queues(rng, 4, 6, 6);
  const ProjectionMatrix p = fit_projection(qs, 0.9, 1e-3);
  std::vector<FeatureVector> dets, emas;
  for (int k = 0; k < 5; ++k) {
    FeatureVector f(6);
    for (double& x : f) x = rng.normal();
    dets.push_back(f);
  }
  for (int k = 0; k < 3; ++k) {
    FeatureVector f(6);
    for (double& x : f) x = rng.normal();
    emas.push_back(f);
  }
  const SimilarityMatrix plain = cosine_matrix(dets, emas);
  const SimilarityMatrix projected = cosine_matrix(project(dets, p), project(emas, p));

  SUBCASE("alpha endpoints") {
    const SimilarityMatrix zero = integrated_similarity(dets, emas, &p, 0.0);
    const SimilarityMatrix one = integrated_similarity(dets, emas, &p, 1.0);
    CHECK(oracle::max_abs_diff(zero, plain) <= 1e-12);
    CHECK(oracle::max_abs_diff(one, projected) <= 1e-12);
    CHECK(integrated_similarity(dets, emas, nullptr, 0.7) == plain);
  }
  SUBCASE("blend arithmetic") {
    const SimilarityMatrix a = Matrix::from_rows({{0.8}});
    const SimilarityMatrix b = Matrix::from_rows({{0.6}});
    CHECK(blend_similarity(a, b, 0.9)(0, 0) == doctest::Approx(0.78).epsilon(1e-15));
  }
  SUBCASE("flipping a column sign leaves similarities unchanged") {
    ProjectionMatrix flipped = p;
    for (std::size_t r = 0; r < flipped.w.rows(); ++r) flipped.w(r, 1) = -flipped.w(r, 1);
    CHECK(integrated_similarity(dets, emas, &flipped, 0.9) == integrated_similarity(dets, emas, &p, 0.9));
  }
  SUBCASE("values stay finite and in range") {
    const SimilarityMatrix s = integrated_similarity(dets, emas, &p, 0.9);
    CHECK(s.rows() == 5);
    CHECK(s.cols() == 3);
    for (double v : s.entries()) {
      CHECK(std::isfinite(v));
      CHECK(std::abs(v) <= 1.0);
    }
  }
  SUBCASE("zero feature is reported") {
    std::vector<FeatureVector> bad{FeatureVector(6, 0.0)};
    CHECK(error_of([&] { (void)integrated_similarity(bad, emas, &p, 0.9); }) == ErrorCode::ZeroVector);
  }
}

TEST_CASE("PCA projection") {
  SUBCASE("points on a line") {
    FeatureQueue q(1, 10);
    for (int k = 5; k >= 1; --k) q.push({2.0 * k, 1.0 * k}, static_cast<std::uint32_t>(k));
    std::vector<FeatureQueue> qs{q};
    const ProjectionMatrix p = fit_pca_projection(qs, 1);
    REQUIRE(p.output_dim() == 1);
    CHECK(std::abs(cosine(p.w.column(0), FeatureVector{2, 1})) >= 0.999);
  }
  SUBCASE("target dim is capped at D") {
    SplitMix64 rng(1);
    const auto qs = oracle::random_queues(rng, 3, 4, 5);
    CHECK(fit_pca_projection(qs, 10).output_dim() == 4);
  }
  SUBCASE("reconstruction error matches the covariance eigen oracle") {
    SplitMix64 rng(9);
    const auto qs = oracle::random_queues(rng, 3, 6, 7);
    const std::size_t k = 3;
    const ProjectionMatrix p = fit_pca_projection(qs, k);

    std::vector<FeatureVector> samples;
    for (const auto& q : qs)
      for (const auto& e : q.entries()) samples.push_back(e.feature);
    const double n = static_cast<double>(samples.size());
    FeatureVector mean(6, 0.0);
    for (const auto& s : samples)
      for (std::size_t i = 0; i < 6; ++i) mean[i] += s[i] / n;
    Matrix cov(6, 6);
    for (const auto& s : samples)
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) cov(i, j) += (s[i] - mean[i]) * (s[j] - mean[j]) / n;
    // Residual variance outside the top-k subspace equals the sum of the
    // trailing eigenvalues.
    const EigenResult e = sym_eig(cov);
    double expected = 0.0;
    for (std::size_t j = k; j < 6; ++j) expected += e.eigenvalues[j];

    double residual = 0.0;
    for (const auto& s : samples) {
      FeatureVector c(6);
      for (std::size_t i = 0; i < 6; ++i) c[i] = s[i] - mean[i];
      FeatureVector back(6, 0.0);
      for (std::size_t a = 0; a < k; ++a) {
        const double coord = dot(c, p.w.column(a));
        for (std::size_t i = 0; i < 6; ++i) back[i] += coord * p.w(i, a);
      }
      for (std::size_t i = 0; i < 6; ++i) residual += (c[i] - back[i]) * (c[i] - back[i]) / n;
    }
    CHECK(std::abs(residual - expected) <= 1e-8);
  }
  SUBCASE("too few samples") {
    std::vector<FeatureQueue> qs{queue_of(1, {{1, FeatureVector{1, 0}}})};
    CHECK(error_of([&] { (void)fit_pca_projection(qs, 1); }) == ErrorCode::InsufficientSamples);
  }
}
