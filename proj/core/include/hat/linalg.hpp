#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hat {

using FeatureVector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);
  /// Builds from nested rows; all rows must have equal length.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return entries_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return entries_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {entries_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {entries_.data() + r * cols_, cols_};
  }
  FeatureVector column(std::size_t c) const;

  std::span<const double> entries() const noexcept { return entries_; }
  double* data() noexcept { return entries_.data(); }
  const double* data() const noexcept { return entries_.data(); }

  Matrix transpose() const;
  double trace() const;
  double max_abs() const;
  double frobenius() const;
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
FeatureVector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> u, std::span<const double> v);
double norm2(std::span<const double> u);

/// Returns u / ‖u‖; throws ZeroVector when ‖u‖ == 0.
FeatureVector normalized(std::span<const double> u);

/// u·v / (‖u‖‖v‖) clamped to [-1, 1]. Exactly symmetric in its arguments.
double cosine(std::span<const double> u, std::span<const double> v);

/// Eigenpairs with eigenvalues sorted descending; column k of `eigenvectors`
/// belongs to eigenvalues[k].
struct EigenResult {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

/// Lower-triangular L with M = L·Lᵀ. Throws NotPositiveDefinite carrying the
/// failing pivot index.
Matrix cholesky_spd(const Matrix& m);

/// Symmetric eigendecomposition: Householder tridiagonalization followed by
/// implicit-shift QL. With `top_k`, only the k largest eigenpairs are
/// returned; their vectors come from inverse iteration on the tridiagonal
/// form, which is far cheaper than accumulating every rotation.
EigenResult sym_eig(const Matrix& m, std::optional<std::size_t> top_k = std::nullopt);

/// Solves A·w = λ·B·w for symmetric A and symmetric positive-definite B by
/// Cholesky reduction. Eigenvectors are B-orthonormal.
EigenResult generalized_eig(const Matrix& a, const Matrix& b,
                            std::optional<std::size_t> top_k = std::nullopt);

/// Solves L·X = rhs for lower-triangular L, in place on the rows of rhs.
void solve_lower_in_place(const Matrix& lower, Matrix& rhs);

/// Solves Lᵀ·x = rhs for lower-triangular L.
FeatureVector solve_lower_transposed(const Matrix& lower, std::span<const double> rhs);

}  // namespace hat
