#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "hat/assignment.hpp"
#include "hat/error.hpp"
#include "support/oracles.hpp"

using namespace hat;

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

TEST_CASE("2x2 hand examples") {
  const Assignment a = solve_assignment(Matrix::from_rows({{1, 2}, {2, 1}}));
  CHECK(a.pairs == Pairs{{0, 0}, {1, 1}});
  CHECK(a.total_cost == 2.0);

  const Assignment b = solve_assignment(Matrix::from_rows({{4, 1}, {1, 4}}));
  CHECK(b.pairs == Pairs{{0, 1}, {1, 0}});
  CHECK(b.total_cost == 2.0);
}

TEST_CASE("empty and degenerate shapes") {
  CHECK(solve_assignment(Matrix(0, 0)).pairs.empty());
  CHECK(solve_assignment(Matrix(0, 4)).pairs.empty());
  CHECK(solve_assignment(Matrix(3, 0)).pairs.empty());
  const Assignment one = solve_assignment(Matrix::from_rows({{-0.5}}));
  CHECK(one.pairs == Pairs{{0, 0}});
  CHECK(one.total_cost == -0.5);
}

TEST_CASE("random 6x6 agrees with the 720-permutation minimum") {
  SplitMix64 rng(13);
  const Matrix c = oracle::random_matrix(rng, 6, 6);
  CHECK(solve_assignment(c).total_cost == doctest::Approx(oracle::brute_force_assignment(c)).epsilon(1e-12));
}

TEST_CASE("optimality against enumeration, up to 8x8, 200 seeds") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SplitMix64 rng(seed);
    const std::size_t m = 1 + rng.below(8);
    const std::size_t n = 1 + rng.below(8);
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = static_cast<double>(rng.below(20)) - 5.0;
    const Assignment a = solve_assignment(c);
    CHECK(a.total_cost == oracle::brute_force_assignment(c));
    CHECK(a.pairs.size() == std::min(m, n));
    std::set<std::size_t> rows, cols;
    for (const auto& [r, col] : a.pairs) {
      rows.insert(r);
      cols.insert(col);
    }
    CHECK(rows.size() == a.pairs.size());
    CHECK(cols.size() == a.pairs.size());
  }
}

TEST_CASE("ties resolve to the lexicographically smallest pair list") {
  CHECK(solve_assignment(Matrix(3, 3, 1.0)).pairs == Pairs{{0, 0}, {1, 1}, {2, 2}});
  CHECK(solve_assignment(Matrix(2, 4, 0.0)).pairs == Pairs{{0, 0}, {1, 1}});
  CHECK(solve_assignment(Matrix(4, 2, 0.0)).pairs == Pairs{{0, 0}, {1, 1}});
  // Optima {(0,0),(1,2),(2,1)} and {(0,1),(1,0),(2,2)} both cost 1.
  const Matrix c = Matrix::from_rows({{0, 0, 5}, {1, 5, 0}, {5, 1, 0}});
  const Assignment a = solve_assignment(c);
  CHECK(a.total_cost == 1.0);
  CHECK(a.pairs == Pairs{{0, 0}, {1, 2}, {2, 1}});
}

TEST_CASE("brute-force tie check: the returned list is the smallest optimum") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SplitMix64 rng(1000 + seed);
    const std::size_t n = 2 + rng.below(4);
    Matrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = static_cast<double>(rng.below(3));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const double best = oracle::brute_force_assignment(c);
    Pairs first;
    do {
      double t = 0.0;
      for (std::size_t i = 0; i < n; ++i) t += c(i, perm[i]);
      if (t == best) {
        for (std::size_t i = 0; i < n; ++i) first.emplace_back(i, perm[i]);
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(solve_assignment(c).pairs == first);
  }
}

TEST_CASE("transposing the costs transposes the pairs") {
  SplitMix64 rng(21);
  for (int k = 0; k < 50; ++k) {
    const std::size_t m = 1 + rng.below(7);
    const std::size_t n = 1 + rng.below(7);
    const Matrix c = oracle::random_matrix(rng, m, n);
    const Assignment a = solve_assignment(c);
    const Assignment b = solve_assignment(c.transpose());
    CHECK(a.total_cost == doctest::Approx(b.total_cost).epsilon(1e-12));
    std::set<std::pair<std::size_t, std::size_t>> pa(a.pairs.begin(), a.pairs.end()), pb;
    for (const auto& [r, col] : b.pairs) pb.emplace(col, r);
    CHECK(pa == pb);
  }
}

TEST_CASE("adding a constant shifts the cost and keeps the pairs") {
  SplitMix64 rng(22);
  for (int k = 0; k < 50; ++k) {
    const std::size_t m = 1 + rng.below(7);
    const std::size_t n = 1 + rng.below(7);
    const Matrix c = oracle::random_matrix(rng, m, n);
    Matrix shifted = c;
    for (std::size_t i = 0; i < m * n; ++i) shifted.data()[i] += 2.5;
    const Assignment a = solve_assignment(c);
    const Assignment b = solve_assignment(shifted);
    CHECK(a.pairs == b.pairs);
    CHECK(b.total_cost == doctest::Approx(a.total_cost + 2.5 * static_cast<double>(std::min(m, n))));
  }
}

TEST_CASE("non-finite costs are rejected") {
  Matrix c(2, 2, 1.0);
  c(1, 0) = std::numeric_limits<double>::infinity();
  try {
    (void)solve_assignment(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidCost);
  }
  c(1, 0) = std::nan("");
  CHECK_THROWS_AS(solve_assignment(c), Error);
}
