#include "hat/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hat/error.hpp"

namespace hat {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Potentials {
  std::vector<double> row;  // u
  std::vector<double> col;  // v
  std::vector<std::size_t> row_of_col;
};

// Shortest-augmenting-path Hungarian on a square matrix.
Potentials hungarian_square(const Matrix& a) {
  const std::size_t n = a.rows();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based with slot 0 as the virtual root column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Potentials out{std::vector<double>(n), std::vector<double>(n), std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) out.row[i] = u[i + 1];
  for (std::size_t j = 0; j < n; ++j) {
    out.col[j] = v[j + 1];
    out.row_of_col[j] = p[j + 1] - 1;
  }
  return out;
}

// Re-matches rows in order to their smallest feasible column inside the
// equality subgraph (zero reduced cost), which holds every optimum.
class LexicographicRefiner {
 public:
  LexicographicRefiner(const Matrix& a, const Potentials& pot, double tol)
      : n_(a.rows()), tight_(n_ * n_), col_of_row_(n_), row_of_col_(pot.row_of_col) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        tight_[i * n_ + j] = std::abs(a(i, j) - pot.row[i] - pot.col[j]) <= tol;
    for (std::size_t j = 0; j < n_; ++j) col_of_row_[row_of_col_[j]] = j;
  }

  std::vector<std::size_t> run() {
    std::vector<char> fixed(n_, 0);
    for (std::size_t r = 0; r < n_; ++r) {
      const std::size_t current = col_of_row_[r];
      for (std::size_t j = 0; j < current; ++j) {
        if (!tight_[r * n_ + j]) continue;
        const std::size_t owner = row_of_col_[j];
        if (fixed[owner]) continue;
        if (reroute(owner, current, r, fixed)) {
          col_of_row_[r] = j;
          row_of_col_[j] = r;
          break;
        }
      }
      fixed[r] = 1;
    }
    return col_of_row_;
  }

 private:
  // Finds an alternating path from `start` (a row losing its column) to the
  // freed column `target`, avoiding fixed rows and `skip`. Applies it.
  bool reroute(std::size_t start, std::size_t target, std::size_t skip,
               const std::vector<char>& fixed) {
    std::vector<std::size_t> parent_row(n_, kNone);  // column -> row that reached it
    std::vector<char> seen_row(n_, 0);
    std::vector<std::size_t> frontier{start};
    seen_row[start] = 1;
    while (!frontier.empty()) {
      std::vector<std::size_t> next;
      for (std::size_t row : frontier) {
        for (std::size_t c = 0; c < n_; ++c) {
          if (!tight_[row * n_ + c] || parent_row[c] != kNone) continue;
          if (c == col_of_row_[row]) continue;
          parent_row[c] = row;
          if (c == target) {
            std::size_t col = c;
            while (true) {
              const std::size_t rr = parent_row[col];
              const std::size_t prev = col_of_row_[rr];
              col_of_row_[rr] = col;
              row_of_col_[col] = rr;
              if (rr == start) break;
              col = prev;
            }
            return true;
          }
          const std::size_t owner = row_of_col_[c];
          if (owner == skip || fixed[owner] || seen_row[owner]) continue;
          seen_row[owner] = 1;
          next.push_back(owner);
        }
      }
      frontier = std::move(next);
    }
    return false;
  }

  std::size_t n_;
  std::vector<char> tight_;
  std::vector<std::size_t> col_of_row_;
  std::vector<std::size_t> row_of_col_;
};

}  // namespace

Assignment solve_assignment(const CostMatrix& costs) {
  const std::size_t m = costs.rows();
  const std::size_t n = costs.cols();
  double max_entry = -std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (std::size_t i = 0; i < costs.entries().size(); ++i) {
    const double c = costs.entries()[i];
    if (!std::isfinite(c)) {
      throw Error(ErrorCode::InvalidCost, "non-finite cost at flat index " + std::to_string(i),
                  i);
    }
    max_entry = std::max(max_entry, c);
    max_abs = std::max(max_abs, std::abs(c));
  }
  Assignment result;
  if (m == 0 || n == 0) return result;

  const std::size_t size = std::max(m, n);
  const double sentinel = max_entry + 1.0;
  Matrix square(size, size, sentinel);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) square(i, j) = costs(i, j);

  const Potentials pot = hungarian_square(square);
  const double tol = 1e-9 * (1.0 + std::max(max_abs, std::abs(sentinel)));
  const std::vector<std::size_t> col_of_row = LexicographicRefiner(square, pot, tol).run();

  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = col_of_row[i];
    if (j < n) {
      result.pairs.emplace_back(i, j);
      result.total_cost += costs(i, j);
    }
  }
  return result;
}

}  // namespace hat
