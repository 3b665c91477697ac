#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace aif {

using Vec = std::vector<double>;

// Raised when a value that must be finite is NaN or Inf. Callers treat this
// as a run abort, not something to paper over.
class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(std::size_t(r) * std::size_t(c), fill) {}

  double& operator()(int r, int c) { return data[std::size_t(r) * cols + c]; }
  double operator()(int r, int c) const {
    return data[std::size_t(r) * cols + c];
  }

  double* row(int r) { return data.data() + std::size_t(r) * cols; }
  const double* row(int r) const { return data.data() + std::size_t(r) * cols; }

  bool same_shape(const Matrix& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

inline bool all_finite(const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

inline bool all_finite(const Vec& v) { return all_finite(v.data(), v.size()); }
inline bool all_finite(const Matrix& m) { return all_finite(m.data); }

inline void require_finite(const Vec& v, const char* what) {
  if (!all_finite(v)) {
    throw NumericsError(std::string("non-finite values in ") + what);
  }
}

inline void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m.data)) {
    throw NumericsError(std::string("non-finite values in ") + what);
  }
}

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw NumericsError(std::string("non-finite value in ") + what);
  }
}

// c[m x n] += a[m x k] * b[k x n]. Inner loops run along rows of b and c so
// they vectorize without reassociating sums; rows of a are processed four at
// a time so each loaded b row feeds four accumulator rows.
inline void gemm_accum(const double* a, const double* b, double* c, int m,
                       int k, int n) {
  int i = 0;
  for (; i + 4 <= m; i += 4) {
    const double* a0 = a + std::size_t(i) * k;
    const double* a1 = a0 + k;
    const double* a2 = a1 + k;
    const double* a3 = a2 + k;
    double* c0 = c + std::size_t(i) * n;
    double* c1 = c0 + n;
    double* c2 = c1 + n;
    double* c3 = c2 + n;
    for (int p = 0; p < k; ++p) {
      const double v0 = a0[p], v1 = a1[p], v2 = a2[p], v3 = a3[p];
      const double* brow = b + std::size_t(p) * n;
      for (int j = 0; j < n; ++j) {
        const double bv = brow[j];
        c0[j] += v0 * bv;
        c1[j] += v1 * bv;
        c2[j] += v2 * bv;
        c3[j] += v3 * bv;
      }
    }
  }
  for (; i < m; ++i) {
    const double* arow = a + std::size_t(i) * k;
    double* crow = c + std::size_t(i) * n;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = b + std::size_t(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

inline Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) t(c, r) = m(r, c);
  }
  return t;
}

}  // namespace aif
