#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hat/linalg.hpp"

namespace hat {

/// Rows are detections, columns are trajectories; lower is better.
using CostMatrix = Matrix;

struct Assignment {
  /// (row, col) pairs sorted by row; size min(rows, cols).
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;
};

/// Minimum-cost injective assignment of size min(m, n) via the Hungarian
/// algorithm. Rectangular inputs are padded to square with a constant
/// sentinel. Among optimal assignments the lexicographically smallest pair
/// list is returned. Throws InvalidCost on non-finite entries.
Assignment solve_assignment(const CostMatrix& costs);

}  // namespace hat
