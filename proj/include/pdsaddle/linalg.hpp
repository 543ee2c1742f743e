#pragma once

// Small dense linear-algebra kernels used throughout the library.
// Everything is double precision and deterministic.

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pds {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2sq(const Vec& a) { return dot(a, a); }
inline double norm2(const Vec& a) { return std::sqrt(norm2sq(a)); }

inline double dist2sq(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }
inline Vec ones(std::size_t n) { return Vec(n, 1.0); }

// r = a*x + y
inline Vec axpy(double a, const Vec& x, const Vec& y) {
  assert(x.size() == y.size());
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + y[i];
  return r;
}

inline Vec scaled(double a, const Vec& x) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) { return axpy(-1.0, b, a); }
inline Vec add(const Vec& a, const Vec& b) { return axpy(1.0, b, a); }

inline bool all_finite(const Vec& a) {
  return std::all_of(a.begin(), a.end(),
                     [](double v) { return std::isfinite(v); });
}

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  Vec apply(const Vec& x) const {
    assert(x.size() == cols);
    Vec y(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      double s = 0.0;
      const double* row = &data[i * cols];
      for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
      y[i] = s;
    }
    return y;
  }

  Vec apply_transpose(const Vec& y) const {
    assert(y.size() == rows);
    Vec x(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double yi = y[i];
      const double* row = &data[i * cols];
      for (std::size_t j = 0; j < cols; ++j) x[j] += row[j] * yi;
    }
    return x;
  }

  Matrix transpose() const {
    Matrix t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix mul(const Matrix& other) const {
    assert(cols == other.rows);
    Matrix r(rows, other.cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k) {
        const double a = (*this)(i, k);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < other.cols; ++j)
          r(i, j) += a * other(k, j);
      }
    return r;
  }

  double frobenius_norm() const { return norm2(data); }
};

// Gaussian elimination with partial pivoting; solves M x = b in place copies.
// Throws on (numerically) singular systems.
inline Vec solve_dense(Matrix m, Vec b) {
  const std::size_t n = m.rows;
  if (m.cols != n || b.size() != n)
    throw std::invalid_argument("solve_dense: dimension mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m(i, k)) > best) {
        best = std::abs(m(i, k));
        piv = i;
      }
    }
    if (best == 0.0) throw std::runtime_error("solve_dense: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

// SplitMix64. Fixed across platforms so seeded problem instances regenerate
// bit-identically from their JSON spec.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, one draw per call (the sine companion is discarded so the
  // stream stays a simple function of the uniform sequence).
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  Vec gaussian_vec(std::size_t n) {
    Vec v(n);
    for (auto& x : v) x = gaussian();
    return v;
  }

 private:
  std::uint64_t state_;
};

// Shortest round-trip decimal formatting; identical input bits always yield
// identical bytes, which keeps trace CSV output reproducible.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace pds
