#include "hat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "hat/error.hpp"

namespace hat {

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch,
                "matrix entry count " + std::to_string(entries_.size()) + " != " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) {
      throw Error(ErrorCode::DimensionMismatch, "ragged row " + std::to_string(i));
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

FeatureVector Matrix::column(std::size_t c) const {
  FeatureVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : entries_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix::frobenius() const { return std::sqrt(dot(entries_, entries_)); }

bool Matrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](double x) { return std::isfinite(x); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix product shape mismatch");
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto src = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix sum shape mismatch");
  }
  Matrix out = a;
  for (std::size_t i = 0; i < a.entries().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix difference shape mismatch");
  }
  Matrix out = a;
  for (std::size_t i = 0; i < a.entries().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix out = a;
  for (std::size_t i = 0; i < a.entries().size(); ++i) out.data()[i] *= s;
  return out;
}

FeatureVector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix-vector shape mismatch");
  }
  FeatureVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

// ---------------------------------------------------------------- vectors

double dot(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "dot of " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double norm2(std::span<const double> u) { return std::sqrt(dot(u, u)); }

FeatureVector normalized(std::span<const double> u) {
  const double n = norm2(u);
  if (!(n > 0.0)) throw Error(ErrorCode::ZeroVector, "cannot normalize a zero vector");
  FeatureVector out(u.begin(), u.end());
  for (double& x : out) x /= n;
  return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  const double uv = dot(u, v);
  const double nu = norm2(u);
  const double nv = norm2(v);
  if (!(nu > 0.0) || !(nv > 0.0)) {
    throw Error(ErrorCode::ZeroVector, "cosine of a zero vector");
  }
  return std::clamp(uv / (nu * nv), -1.0, 1.0);
}

// ---------------------------------------------------------------- solvers

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSweepsPerEigenvalue = 30;

void require_square(const Matrix& m, const char* what) {
  if (!m.square()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be square, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
}

void require_symmetric(const Matrix& m, const char* what) {
  if (!m.all_finite()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
  }
  const double tol = 1e-8 * (1.0 + m.max_abs());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(what) + " is not symmetric at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      }
}

// Householder reduction to tridiagonal form. On return `diag`/`off` hold T
// (off[i] couples i and i+1), and row i of `work` holds the reflector v_i
// (first i entries) applied with coefficient betas[i].
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
  Matrix work;
  std::vector<double> betas;
};

// Turns row i (first i entries) into a Householder vector in place and
// records the coupling to row i - 1. Returns beta, or 0 for an all-zero row.
double prepare_reflector(Tridiagonal& t, std::size_t i) {
  double* v = t.work.data() + i * t.work.cols();
  double scale = 0.0;
  for (std::size_t k = 0; k < i; ++k) scale += std::abs(v[k]);
  if (scale == 0.0) {
    t.off[i - 1] = 0.0;
    t.betas[i] = 0.0;
    return 0.0;
  }
  double sigma = 0.0;
  for (std::size_t k = 0; k < i; ++k) {
    v[k] /= scale;
    sigma += v[k] * v[k];
  }
  const double head = v[i - 1];
  const double alpha = head >= 0.0 ? -std::sqrt(sigma) : std::sqrt(sigma);
  const double beta = 1.0 / (sigma - head * alpha);
  v[i - 1] = head - alpha;
  t.off[i - 1] = alpha * scale;
  t.betas[i] = beta;
  return beta;
}

// Reduction from the bottom row up. Each step applies the rank-2 update
// B -= v qᵀ + q vᵀ to the leading block; the pass that updates a row also
// forms that row's share of the next step's product B v, so the block is
// streamed once per step.
Tridiagonal tridiagonalize(const Matrix& m) {
  const std::size_t n = m.rows();
  Tridiagonal t{std::vector<double>(n), std::vector<double>(n, 0.0), m,
                std::vector<double>(n, 0.0)};
  Matrix& a = t.work;
  std::vector<double> p(n), next_p(n);

  std::size_t i = n - 1;
  bool ready = false;  // reflector and p prepared for step i
  while (i >= 2) {
    const double* v = a.data() + i * n;
    if (!ready) {
      const double beta = prepare_reflector(t, i);
      if (beta == 0.0) {
        --i;
        continue;
      }
      for (std::size_t r = 0; r < i; ++r) {
        const double* br = a.data() + r * n;
        double s = 0.0;
        for (std::size_t c = 0; c < i; ++c) s += br[c] * v[c];
        p[r] = beta * s;
      }
    }
    const double beta = t.betas[i];
    double vp = 0.0;
    for (std::size_t r = 0; r < i; ++r) vp += v[r] * p[r];
    const double half = 0.5 * beta * vp;
    for (std::size_t r = 0; r < i; ++r) p[r] -= half * v[r];  // p now holds q

    const std::size_t next = i - 1;
    {
      double* row = a.data() + next * n;
      const double vr = v[next];
      const double qr = p[next];
      for (std::size_t c = 0; c < i; ++c) row[c] -= vr * p[c] + qr * v[c];
    }
    const double next_beta = next >= 2 ? prepare_reflector(t, next) : 0.0;
    const double* nv = a.data() + next * n;
    for (std::size_t r = 0; r < next; ++r) {
      double* row = a.data() + r * n;
      const double vr = v[r];
      const double qr = p[r];
      double s = 0.0;
      for (std::size_t c = 0; c < next; ++c) {
        row[c] -= vr * p[c] + qr * v[c];
        s += row[c] * nv[c];
      }
      next_p[r] = next_beta * s;
    }
    if (next >= 2 && next_beta == 0.0) {
      // Row `next` was already zero: nothing to reduce at that step.
      i = next - 1;
      ready = false;
      continue;
    }
    std::swap(p, next_p);
    ready = next >= 2;
    i = next;
  }
  if (n >= 2) t.off[0] = a(1, 0);
  for (std::size_t k = 0; k < n; ++k) t.diag[k] = a(k, k);
  t.off[n - 1] = 0.0;
  return t;
}

// Implicit-shift QL on a symmetric tridiagonal matrix. When `vt` is given,
// its rows are rotated alongside (row k tracks eigenvalue k).
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Matrix* vt) {
  const std::size_t n = d.size();
  double shift = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > kEps * tst1) ++m;

    if (m > l) {
      int sweeps = 0;
      do {
        if (++sweeps > kMaxSweepsPerEigenvalue) {
          throw Error(ErrorCode::SolverDiverged,
                      "QL iteration did not converge for eigenvalue " + std::to_string(l), l);
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        shift += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (vt != nullptr) {
            double* zi = vt->data() + i * vt->cols();
            double* zi1 = zi + vt->cols();
            for (std::size_t k = 0; k < vt->cols(); ++k) {
              const double hk = zi1[k];
              zi1[k] = s * zi[k] + c * hk;
              zi[k] = c * zi[k] - s * hk;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > kEps * tst1);
    }
    d[l] += shift;
    e[l] = 0.0;
  }
}

// Qᵀ = H_2 H_3 ... H_{n-1}, built by left-multiplying reflectors.
Matrix accumulate_qt(const Tridiagonal& t) {
  const std::size_t n = t.diag.size();
  Matrix qt = Matrix::identity(n);
  std::vector<double> w(n);
  for (std::size_t i = n - 1; i >= 2; --i) {
    const double beta = t.betas[i];
    if (beta == 0.0) continue;
    const double* v = t.work.data() + i * n;
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t r = 0; r < i; ++r) {
      const double vr = v[r];
      const double* qr = qt.data() + r * n;
      for (std::size_t c = 0; c < n; ++c) w[c] += vr * qr[c];
    }
    for (std::size_t r = 0; r < i; ++r) {
      const double f = beta * v[r];
      double* qr = qt.data() + r * n;
      for (std::size_t c = 0; c < n; ++c) qr[c] -= f * w[c];
    }
  }
  return qt;
}

// x <- Q x = H_{n-1}(...(H_2 x)).
void apply_q(const Tridiagonal& t, std::span<double> x) {
  const std::size_t n = t.diag.size();
  for (std::size_t i = 2; i < n; ++i) {
    const double beta = t.betas[i];
    if (beta == 0.0) continue;
    const double* v = t.work.data() + i * n;
    double s = 0.0;
    for (std::size_t k = 0; k < i; ++k) s += v[k] * x[k];
    s *= beta;
    for (std::size_t k = 0; k < i; ++k) x[k] -= s * v[k];
  }
}

// LU factorization with partial pivoting of (T - shift I), T symmetric
// tridiagonal, followed by solves. Tiny pivots are replaced by `pivot_floor`.
class ShiftedTridiagonalLu {
 public:
  ShiftedTridiagonalLu(const std::vector<double>& d, const std::vector<double>& e, double shift,
                       double pivot_floor)
      : n_(d.size()), low_(n_, 0.0), diag_(n_), up1_(n_, 0.0), up2_(n_, 0.0), swap_(n_, false) {
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = d[i] - shift;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      low_[i] = e[i];
      up1_[i] = e[i];
    }
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (std::abs(diag_[i]) >= std::abs(low_[i])) {
        if (std::abs(diag_[i]) < pivot_floor) diag_[i] = diag_[i] < 0 ? -pivot_floor : pivot_floor;
        const double f = low_[i] / diag_[i];
        low_[i] = f;
        diag_[i + 1] -= f * up1_[i];
      } else {
        const double f = diag_[i] / low_[i];
        diag_[i] = low_[i];
        low_[i] = f;
        const double tmp = up1_[i];
        up1_[i] = diag_[i + 1];
        diag_[i + 1] = tmp - f * diag_[i + 1];
        if (i + 2 < n_) {
          up2_[i] = up1_[i + 1];
          up1_[i + 1] = -f * up1_[i + 1];
        }
        swap_[i] = true;
      }
    }
    if (std::abs(diag_[n_ - 1]) < pivot_floor) {
      diag_[n_ - 1] = diag_[n_ - 1] < 0 ? -pivot_floor : pivot_floor;
    }
  }

  void solve(std::span<double> b) const {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (swap_[i]) {
        const double tmp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tmp - low_[i] * b[i];
      } else {
        b[i + 1] -= low_[i] * b[i];
      }
    }
    for (std::size_t i = n_; i-- > 0;) {
      double s = b[i];
      if (i + 1 < n_) s -= up1_[i] * b[i + 1];
      if (i + 2 < n_) s -= up2_[i] * b[i + 2];
      b[i] = s / diag_[i];
    }
  }

 private:
  std::size_t n_;
  std::vector<double> low_, diag_, up1_, up2_;
  std::vector<bool> swap_;
};

void scale_to_unit(std::span<double> x) {
  double n = 0.0;
  for (double v : x) n += v * v;
  n = std::sqrt(n);
  for (double& v : x) v /= n;
}

// Eigenvectors of the tridiagonal matrix for the given (descending) eigenvalues
// by inverse iteration, with Gram-Schmidt inside clusters of close eigenvalues.
Matrix tridiagonal_eigenvectors(const std::vector<double>& d, const std::vector<double>& e,
                                const std::vector<double>& wanted) {
  const std::size_t n = d.size();
  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(d[i]);
    if (i > 0) row += std::abs(e[i - 1]);
    if (i + 1 < n) row += std::abs(e[i]);
    tnorm = std::max(tnorm, row);
  }
  if (tnorm == 0.0) tnorm = 1.0;
  const double cluster_gap = 1e-3 * tnorm;
  const double pivot_floor = kEps * tnorm;

  Matrix z(wanted.size(), n);
  std::size_t cluster_start = 0;
  double previous = 0.0;
  std::vector<double> b(n), tz(n);
  for (std::size_t j = 0; j < wanted.size(); ++j) {
    double shift = wanted[j];
    if (j > 0) {
      if (previous - shift > cluster_gap) cluster_start = j;
      const double pert = 10.0 * kEps * std::max(std::abs(shift), tnorm * kEps);
      if (previous - shift < pert) shift = previous - pert;
    }
    previous = shift;

    ShiftedTridiagonalLu lu(d, e, shift, pivot_floor);
    // Deterministic start vector.
    std::uint64_t state = 0x9E3779B97F4A7C15ULL ^ (j * 0xBF58476D1CE4E5B9ULL);
    for (std::size_t i = 0; i < n; ++i) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      b[i] = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
    }
    auto zj = z.row(j);
    for (int it = 0; it < 6; ++it) {
      for (std::size_t k = cluster_start; k < j; ++k) {
        const auto zk = z.row(k);
        const double proj = dot(zk, b);
        for (std::size_t i = 0; i < n; ++i) b[i] -= proj * zk[i];
      }
      scale_to_unit(b);
      lu.solve(b);
      scale_to_unit(b);
      // residual of (T - λ) b with the unperturbed eigenvalue
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double r = (d[i] - wanted[j]) * b[i];
        if (i > 0) r += e[i - 1] * b[i - 1];
        if (i + 1 < n) r += e[i] * b[i + 1];
        res += r * r;
      }
      if (it >= 1 && std::sqrt(res) <= 16.0 * kEps * tnorm * std::sqrt(static_cast<double>(n))) {
        break;
      }
    }
    for (std::size_t k = cluster_start; k < j; ++k) {
      const auto zk = z.row(k);
      const double proj = dot(zk, b);
      for (std::size_t i = 0; i < n; ++i) b[i] -= proj * zk[i];
    }
    scale_to_unit(b);
    std::copy(b.begin(), b.end(), zj.begin());
  }
  return z;
}

void fix_sign(std::span<double> v) {
  for (double x : v) {
    if (x != 0.0) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

std::vector<std::size_t> descending_order(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

// Eigenvectors come back as rows; EigenResult stores them as columns.
EigenResult pack(const std::vector<double>& values, Matrix&& vector_rows) {
  for (std::size_t k = 0; k < vector_rows.rows(); ++k) fix_sign(vector_rows.row(k));
  return EigenResult{values, vector_rows.transpose()};
}

}  // namespace

Matrix cholesky_spd(const Matrix& m) {
  require_square(m, "cholesky input");
  require_symmetric(m, "cholesky input");
  const std::size_t n = m.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto lj = l.row(j);
    double pivot = m(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= lj[k] * lj[k];
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "non-positive pivot " + std::to_string(pivot) + " at index " + std::to_string(j),
                  j);
    }
    const double ljj = std::sqrt(pivot);
    lj[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto li = l.row(i);
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / ljj;
    }
  }
  return l;
}

EigenResult sym_eig(const Matrix& m, std::optional<std::size_t> top_k) {
  require_square(m, "eigen input");
  require_symmetric(m, "eigen input");
  const std::size_t n = m.rows();
  const std::size_t k = std::min(top_k.value_or(n), n);
  if (n == 0) return {};
  if (n == 1) {
    Matrix one(1, 1, 1.0);
    return k == 0 ? EigenResult{{}, Matrix(1, 0)} : EigenResult{{m(0, 0)}, std::move(one)};
  }

  Tridiagonal t = tridiagonalize(m);

  if (k == n) {
    Matrix vt = accumulate_qt(t);
    std::vector<double> d = t.diag;
    std::vector<double> e = t.off;
    tridiagonal_ql(d, e, &vt);
    const auto order = descending_order(d);
    std::vector<double> values(n);
    Matrix rows(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = d[order[i]];
      const auto src = vt.row(order[i]);
      std::copy(src.begin(), src.end(), rows.row(i).begin());
    }
    return pack(values, std::move(rows));
  }

  std::vector<double> d = t.diag;
  std::vector<double> e = t.off;
  tridiagonal_ql(d, e, nullptr);
  std::sort(d.begin(), d.end(), std::greater<>());
  std::vector<double> values(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k));

  Matrix rows = tridiagonal_eigenvectors(t.diag, t.off, values);
  for (std::size_t j = 0; j < k; ++j) apply_q(t, rows.row(j));
  return pack(values, std::move(rows));
}

void solve_lower_in_place(const Matrix& lower, Matrix& rhs) {
  const std::size_t n = lower.rows();
  if (!lower.square() || rhs.rows() != n) {
    throw Error(ErrorCode::DimensionMismatch, "triangular solve shape mismatch");
  }
  const std::size_t w = rhs.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = rhs.data() + i * w;
    const double* li = lower.data() + i * n;
    for (std::size_t k = 0; k < i; ++k) {
      const double f = li[k];
      if (f == 0.0) continue;
      const double* xk = rhs.data() + k * w;
      for (std::size_t c = 0; c < w; ++c) xi[c] -= f * xk[c];
    }
    const double inv = 1.0 / li[i];
    for (std::size_t c = 0; c < w; ++c) xi[c] *= inv;
  }
}

FeatureVector solve_lower_transposed(const Matrix& lower, std::span<const double> rhs) {
  const std::size_t n = lower.rows();
  if (!lower.square() || rhs.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "triangular solve shape mismatch");
  }
  FeatureVector x(rhs.begin(), rhs.end());
  for (std::size_t i = n; i-- > 0;) {
    x[i] /= lower(i, i);
    const double xi = x[i];
    const double* li = lower.data() + i * n;
    for (std::size_t k = 0; k < i; ++k) x[k] -= li[k] * xi;
  }
  return x;
}

EigenResult generalized_eig(const Matrix& a, const Matrix& b, std::optional<std::size_t> top_k) {
  require_square(a, "generalized eigen A");
  require_square(b, "generalized eigen B");
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "generalized eigen A and B differ in size");
  }
  require_symmetric(a, "generalized eigen A");
  const std::size_t n = a.rows();
  const Matrix l = cholesky_spd(b);

  // C = L⁻¹ A L⁻ᵀ = L⁻¹ (L⁻¹ A)ᵀ since A is symmetric. C is symmetric, so the
  // second solve only forms its upper triangle: row j needs columns >= j of
  // earlier rows, which are themselves upper-triangle entries.
  Matrix x = a;
  solve_lower_in_place(l, x);
  Matrix c = x.transpose();
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c.data() + j * n;
    const double* lj = l.data() + j * n;
    for (std::size_t k = 0; k < j; ++k) {
      const double f = lj[k];
      if (f == 0.0) continue;
      const double* ck = c.data() + k * n;
      for (std::size_t col = j; col < n; ++col) cj[col] -= f * ck[col];
    }
    const double inv = 1.0 / lj[j];
    for (std::size_t col = j; col < n; ++col) cj[col] *= inv;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) c(i, j) = c(j, i);

  EigenResult reduced = sym_eig(c, top_k);
  const std::size_t k = reduced.eigenvalues.size();
  Matrix rows(k, n);
  for (std::size_t j = 0; j < k; ++j) {
    const FeatureVector u = reduced.eigenvectors.column(j);
    const FeatureVector w = solve_lower_transposed(l, u);
    std::copy(w.begin(), w.end(), rows.row(j).begin());
  }
  return pack(reduced.eigenvalues, std::move(rows));
}

}  // namespace hat
