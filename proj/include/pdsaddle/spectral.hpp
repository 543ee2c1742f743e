#pragma once

// Dense spectral toolkit for the quadratic-game stability analysis:
// a Hessenberg + implicitly shifted QR eigensolver with deflation (complex
// single shift), a cyclic Jacobi path for symmetric matrices, and the
// lifted-system builders with their Gauss-Seidel splitting.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdsaddle/linalg.hpp"

namespace pds {

using cd = std::complex<double>;

inline constexpr std::size_t kEigMaxDim = 128;

struct Spectrum {
  std::vector<cd> eigenvalues;
  std::string method;
  double residual = 0.0;  // max ||M q - lambda q|| over computed pairs
};

namespace detail {

// Householder reduction to upper Hessenberg form, in place.
inline void hessenberg_reduce(Matrix& a) {
  const std::size_t n = a.rows;
  if (n < 3) return;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    double scale = 0.0;
    for (std::size_t i = k; i < n; ++i) scale += std::abs(a(i, k - 1));
    if (scale == 0.0) continue;
    Vec v(n, 0.0);
    double norm2v = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      v[i] = a(i, k - 1) / scale;
      norm2v += v[i] * v[i];
    }
    double sigma = std::sqrt(norm2v);
    if (v[k] < 0.0) sigma = -sigma;
    v[k] += sigma;
    const double beta = sigma * v[k];
    if (beta == 0.0) continue;
    // A <- P A P with P = I - v v^T / beta.
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += v[i] * a(i, j);
      s /= beta;
      for (std::size_t i = k; i < n; ++i) a(i, j) -= s * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k; j < n; ++j) s += a(i, j) * v[j];
      s /= beta;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= s * v[j];
    }
    a(k, k - 1) = -sigma * scale;
    for (std::size_t i = k + 1; i < n; ++i) a(i, k - 1) = 0.0;
  }
}

// Unitary Givens pair with real c: [c s; -conj(s) c] [f; g] = [r; 0].
inline void givens_pair(cd f, cd g, double& c, cd& s) {
  const double nf = std::abs(f), ng = std::abs(g);
  if (ng == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (nf == 0.0) {
    c = 0.0;
    s = std::conj(g) / ng;
    return;
  }
  const double d = std::hypot(nf, ng);
  c = nf / d;
  s = (f / nf) * std::conj(g) / d;
}

// Eigenvalues of a complex 2x2 block.
inline std::pair<cd, cd> eig2x2(cd a, cd b, cd c, cd d) {
  const cd tr = 0.5 * (a + d);
  const cd disc = std::sqrt(tr * tr - (a * d - b * c));
  return {tr + disc, tr - disc};
}

// Implicitly (single) shifted QR with deflation on a complex Hessenberg
// matrix.  Returns all eigenvalues; throws on non-convergence with the
// number of eigenvalues already deflated.
inline std::vector<cd> hessenberg_qr_eigenvalues(
    std::vector<std::vector<cd>> h) {
  const int n = int(h.size());
  std::vector<cd> eig;
  eig.reserve(n);
  if (n == 0) return eig;
  if (n == 1) {
    eig.push_back(h[0][0]);
    return eig;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  double hnorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) hnorm += std::abs(h[i][j]);
  if (hnorm == 0.0) hnorm = 1.0;

  int m = n - 1;  // active block is l..m
  int its = 0;
  const int max_total = 80 * n;
  int total = 0;
  while (m >= 0) {
    // find deflation point
    int l = m;
    while (l > 0) {
      const double off = std::abs(h[l][l - 1]);
      double sc = std::abs(h[l - 1][l - 1]) + std::abs(h[l][l]);
      if (sc == 0.0) sc = hnorm;
      if (off <= eps * sc) {
        h[l][l - 1] = 0.0;
        break;
      }
      --l;
    }
    if (l == m) {
      eig.push_back(h[m][m]);
      --m;
      its = 0;
      continue;
    }
    if (l == m - 1) {
      auto [e1, e2] = eig2x2(h[l][l], h[l][m], h[m][l], h[m][m]);
      eig.push_back(e1);
      eig.push_back(e2);
      m -= 2;
      its = 0;
      continue;
    }
    if (++total > max_total)
      throw std::runtime_error(
          "eigenvalues: QR iteration failed to converge (" +
          std::to_string(eig.size()) + " of " + std::to_string(n) +
          " deflated)");

    // Wilkinson shift from the trailing 2x2; exceptional shift now and then.
    cd mu;
    if (its > 0 && its % 12 == 0) {
      mu = h[m][m] + 1.5 * std::abs(h[m][m - 1]);
    } else {
      auto [e1, e2] = eig2x2(h[m - 1][m - 1], h[m - 1][m], h[m][m - 1],
                             h[m][m]);
      mu = std::abs(e1 - h[m][m]) < std::abs(e2 - h[m][m]) ? e1 : e2;
    }
    ++its;

    // Implicit single-shift chase over the active window.
    cd x = h[l][l] - mu;
    cd z = h[l + 1][l];
    for (int k = l; k < m; ++k) {
      double c;
      cd s;
      givens_pair(x, z, c, s);
      // left rotation on rows k, k+1
      for (int j = std::max(k - 1, l); j <= m; ++j) {
        const cd t1 = h[k][j], t2 = h[k + 1][j];
        h[k][j] = c * t1 + s * t2;
        h[k + 1][j] = -std::conj(s) * t1 + c * t2;
      }
      // right rotation on columns k, k+1
      const int ilim = std::min(k + 2, m);
      for (int i = l; i <= ilim; ++i) {
        const cd t1 = h[i][k], t2 = h[i][k + 1];
        h[i][k] = c * t1 + std::conj(s) * t2;
        h[i][k + 1] = -s * t1 + c * t2;
      }
      if (k + 2 <= m) {
        x = h[k + 1][k];
        z = h[k + 2][k];
      }
    }
  }
  return eig;
}

// Complex LU solve with partial pivoting (used by inverse iteration for
// residual reporting).
inline std::vector<cd> solve_complex(std::vector<std::vector<cd>> m,
                                     std::vector<cd> b) {
  const int n = int(m.size());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(m[k][k]);
    for (int i = k + 1; i < n; ++i)
      if (std::abs(m[i][k]) > best) {
        best = std::abs(m[i][k]);
        piv = i;
      }
    if (best == 0.0) m[piv][k] = 1e-300;  // singular to machine precision
    if (piv != k) {
      std::swap(m[k], m[piv]);
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const cd f = m[i][k] / m[k][k];
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) m[i][j] -= f * m[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<cd> x(n);
  for (int i = n - 1; i >= 0; --i) {
    cd s = b[i];
    for (int j = i + 1; j < n; ++j) s -= m[i][j] * x[j];
    x[i] = s / m[i][i];
  }
  return x;
}

inline double eigenpair_residual(const Matrix& a, cd lambda) {
  const int n = int(a.rows);
  std::vector<std::vector<cd>> shifted(n, std::vector<cd>(n));
  const double scale = std::max(a.frobenius_norm(), 1.0);
  const cd pert = lambda + cd(1e-12 * scale, 1e-13 * scale);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      shifted[i][j] = cd(a(i, j), 0.0) - (i == j ? pert : cd(0.0, 0.0));
  Rng rng(0x51dc0de);
  std::vector<cd> q(n);
  for (auto& qi : q) qi = cd(rng.gaussian(), rng.gaussian());
  for (int sweep = 0; sweep < 3; ++sweep) {
    q = solve_complex(shifted, q);
    double nq = 0.0;
    for (auto& qi : q) nq += std::norm(qi);
    nq = std::sqrt(nq);
    if (nq == 0.0 || !std::isfinite(nq)) return 0.0;
    for (auto& qi : q) qi /= nq;
  }
  double res = 0.0;
  for (int i = 0; i < n; ++i) {
    cd s = -lambda * q[i];
    for (int j = 0; j < n; ++j) s += a(i, j) * q[j];
    res += std::norm(s);
  }
  return std::sqrt(res);
}

}  // namespace detail

// All complex eigenvalues of a real dense matrix (dimension <= 128).
inline Spectrum eigenvalues(const Matrix& m, double tol = 1e-10) {
  (void)tol;
  if (m.rows != m.cols) throw std::invalid_argument("eigenvalues: not square");
  if (m.rows > kEigMaxDim)
    throw std::invalid_argument("eigenvalues: dimension cap is 128");
  Matrix h = m;
  detail::hessenberg_reduce(h);
  const int n = int(m.rows);
  std::vector<std::vector<cd>> hc(n, std::vector<cd>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hc[i][j] = cd(h(i, j), 0.0);
  Spectrum sp;
  sp.method = "hessenberg_qr";
  sp.eigenvalues = detail::hessenberg_qr_eigenvalues(std::move(hc));
  double worst = 0.0;
  for (const cd& lam : sp.eigenvalues)
    worst = std::max(worst, detail::eigenpair_residual(m, lam));
  sp.residual = worst;
  return sp;
}

// Cyclic Jacobi for symmetric matrices; eigenvalues in descending order.
inline std::vector<double> eigenvalues_sym(Matrix a, double tol = 1e-14) {
  if (a.rows != a.cols)
    throw std::invalid_argument("eigenvalues_sym: not square");
  const std::size_t n = a.rows;
  const double scale = std::max(a.frobenius_norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= tol * scale) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<double>());
  return eig;
}

inline double spectral_radius(const Matrix& m) {
  const Spectrum sp = eigenvalues(m);
  double r = 0.0;
  for (const cd& lam : sp.eigenvalues) r = std::max(r, std::abs(lam));
  return r;
}

// Exact spectral norm through the symmetric path (lambda_max of A^T A).
inline double spectral_norm_exact(const Matrix& a) {
  const Matrix gram =
      a.rows <= a.cols ? a.mul(a.transpose()) : a.transpose().mul(a);
  const auto eig = eigenvalues_sym(gram);
  return eig.empty() ? 0.0 : std::sqrt(std::max(eig.front(), 0.0));
}

// ---------------------------------------------------------------------------
// Quadratic game (f = mu/2 |x|^2, g = mu/2 |y|^2 coupled by A) lifting
// systems.

struct QuadraticGame {
  double mu = 1.0;
  Matrix A;  // m x n

  QuadraticGame(double mu_, Matrix a) : mu(mu_), A(std::move(a)) {
    if (!(mu > 0.0)) throw std::invalid_argument("QuadraticGame: mu <= 0");
  }
  std::size_t n() const { return A.cols; }
  std::size_t m() const { return A.rows; }
};

// Q = mu I + [[0, A^T], [-A, 0]], size (n+m).
inline Matrix build_Q(const QuadraticGame& g) {
  const std::size_t n = g.n(), m = g.m();
  Matrix q(n + m, n + m);
  for (std::size_t i = 0; i < n + m; ++i) q(i, i) = g.mu;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      q(j, n + i) = g.A(i, j);    // A^T block
      q(n + i, j) = -g.A(i, j);   // -A block
    }
  return q;
}

// The uncorrected lifting [[-I, I], [I - Q/mu, -I]], size 2(n+m).
inline Matrix build_G_nag(const QuadraticGame& g) {
  const Matrix q = build_Q(g);
  const std::size_t d = q.rows;
  Matrix out(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    out(i, i) = -1.0;
    out(i, d + i) = 1.0;
    out(d + i, d + i) = -1.0;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out(d + i, j) = (i == j ? 1.0 : 0.0) - q(i, j) / g.mu;
  return out;
}

// The velocity-corrected lifting [[-I, I], [0, -Q/mu]].
inline Matrix build_G_new(const QuadraticGame& g) {
  const Matrix q = build_Q(g);
  const std::size_t d = q.rows;
  Matrix out(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    out(i, i) = -1.0;
    out(i, d + i) = 1.0;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(d + i, d + j) = -q(i, j) / g.mu;
  return out;
}

// Eigenvalue of G_nag with maximal real part.  Positive iff the uncorrected
// lifting is unstable (guaranteed for ||A|| > 2 mu).
inline cd instability_witness(const QuadraticGame& g) {
  const Spectrum sp = eigenvalues(build_G_nag(g));
  cd worst = sp.eigenvalues.front();
  for (const cd& lam : sp.eigenvalues)
    if (lam.real() > worst.real()) worst = lam;
  return worst;
}

// Gauss-Seidel splitting iteration matrix
//   Ghat = [(1+alpha) I - alpha L]^{-1} (I + alpha U),
// where G_new = -I + L + U with L/U the strictly lower/upper triangular
// parts.  The lower-triangular solve is forward substitution.
inline Matrix gs_iteration_matrix(const QuadraticGame& g, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("gs_iteration_matrix: alpha <= 0");
  const Matrix gn = build_G_new(g);
  const std::size_t d = gn.rows;
  Matrix rhs(d, d);  // I + alpha U
  for (std::size_t i = 0; i < d; ++i) {
    rhs(i, i) = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) rhs(i, j) = alpha * gn(i, j);
  }
  Matrix out(d, d);
  for (std::size_t col = 0; col < d; ++col) {
    // forward substitution on (1+alpha) I - alpha L
    for (std::size_t i = 0; i < d; ++i) {
      double s = rhs(i, col);
      for (std::size_t j = 0; j < i; ++j) s += alpha * gn(i, j) * out(j, col);
      out(i, col) = s / (1.0 + alpha);
    }
  }
  return out;
}

// Closed-form rho(I - alpha Q) of the explicit Euler scheme.
inline double explicit_euler_radius(double mu, double opnorm, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("explicit_euler_radius: alpha <= 0");
  return std::sqrt((mu * mu + opnorm * opnorm) * alpha * alpha -
                   2.0 * mu * alpha + 1.0);
}

}  // namespace pds
