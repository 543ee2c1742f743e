#pragma once

// Saddle-point problem definitions: L(x,y) = f(x) + <Ax,y> - g(y) with
// f = f1 + f2 and g = g1 + g2, each part convex, coupled by a dense linear
// operator.  Solvers touch A only through apply/adjoint/norm_bound.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "pdsaddle/geometry.hpp"
#include "pdsaddle/linalg.hpp"

namespace pds {

// Smooth convex piece (q/2)||x - a||^2 + <b, x>; gradient is q(x-a)+b and the
// Lipschitz constant is q.  Covers every smooth part in the problem zoo and
// keeps instances serializable.
struct SmoothFn {
  double quad_weight = 0.0;
  Vec center;  // empty = origin
  Vec linear;  // empty = none

  bool trivial() const { return quad_weight == 0.0 && linear.empty(); }

  double lipschitz() const { return quad_weight; }

  double value(const Vec& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - (center.empty() ? 0.0 : center[i]);
      s += 0.5 * quad_weight * d * d;
      if (!linear.empty()) s += linear[i] * x[i];
    }
    return s;
  }

  Vec gradient(const Vec& x) const {
    Vec g(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      g[i] = quad_weight * (x[i] - (center.empty() ? 0.0 : center[i]));
      if (!linear.empty()) g[i] += linear[i];
    }
    return g;
  }
};

// One side of the saddle objective: smooth part f1 (gradient oracle, L) plus
// a prox-friendly part f2, with relative strong-convexity modulus mu w.r.t.
// the attached geometry.
struct ConvexPart {
  SmoothFn smooth;
  ProxSpec prox;
  double mu = 0.0;
  ProxGeometry geometry;

  double lipschitz() const { return smooth.lipschitz(); }

  double value(const Vec& x) const { return smooth.value(x) + prox.value(x); }

  Vec smooth_gradient(const Vec& x) const { return smooth.gradient(x); }

  bool is_smooth() const { return prox.is_smooth(); }

  // Gradient of the whole part; only valid when f2 is smooth too.
  Vec full_gradient(const Vec& x) const {
    if (!prox.is_smooth())
      throw std::logic_error("full_gradient: part has a nonsmooth piece");
    Vec g = smooth.gradient(x);
    const Vec gp = prox.smooth_gradient(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += gp[i];
    return g;
  }

  // ProxSpec for the whole part f1+f2, available when f1 folds into the
  // closed-form oracle.  ABPD-PS requires it.
  std::optional<ProxSpec> full_prox() const {
    if (smooth.trivial()) return prox;
    if (!geometry.is_quadratic()) return std::nullopt;
    ProxSpec s = prox;
    if (smooth.quad_weight > 0.0) {
      if (s.tag == ProxTag::Simplex || s.quad_weight > 0.0) return std::nullopt;
      s.quad_weight = smooth.quad_weight;
      s.center = smooth.center;
      if (s.tag == ProxTag::Zero && s.l1_weight == 0.0)
        s.tag = ProxTag::Quadratic;
    }
    if (!smooth.linear.empty()) {
      if (s.linear.empty()) {
        s.linear = smooth.linear;
      } else {
        for (std::size_t i = 0; i < s.linear.size(); ++i)
          s.linear[i] += smooth.linear[i];
      }
    }
    return s;
  }
};

// Power iteration on A^T A from a fixed seeded start.  The returned estimate
// is inflated by (1+tol) so downstream step-size conditions hold with
// certainty; a zero operator yields 0.
inline double operator_norm_estimate(const Matrix& a, double tol = 1e-6) {
  if (!(tol > 0.0))
    throw std::invalid_argument("operator_norm_estimate: tol must be > 0");
  const std::size_t n = a.cols;
  if (n == 0 || a.rows == 0) return 0.0;
  double best = 0.0;
  for (std::uint64_t seed : {0x5eedULL, 0xabcdef123ULL}) {
    Rng rng(seed);
    Vec q = rng.gaussian_vec(n);
    double qn = norm2(q);
    if (qn == 0.0) continue;
    for (auto& v : q) v /= qn;
    double sigma = 0.0, prev = -1.0;
    for (int it = 0; it < 200000; ++it) {
      Vec z = a.apply_transpose(a.apply(q));
      const double zn = norm2(z);
      if (zn == 0.0) {
        sigma = 0.0;
        break;
      }
      sigma = std::sqrt(zn);
      for (std::size_t i = 0; i < n; ++i) q[i] = z[i] / zn;
      if (prev >= 0.0 && std::abs(sigma - prev) <= 0.1 * tol * sigma) break;
      prev = sigma;
    }
    best = std::max(best, sigma);
  }
  return best * (1.0 + tol);
}

// Bilinear coupling.  Dense storage behind the oracle interface.
class LinearCoupling {
 public:
  LinearCoupling() = default;
  explicit LinearCoupling(Matrix a, double norm_bound = -1.0)
      : a_(std::move(a)) {
    norm_bound_ = norm_bound >= 0.0 ? norm_bound : operator_norm_estimate(a_);
  }

  std::size_t rows() const { return a_.rows; }  // m
  std::size_t cols() const { return a_.cols; }  // n

  Vec apply(const Vec& x) const { return a_.apply(x); }
  Vec adjoint(const Vec& y) const { return a_.apply_transpose(y); }
  double norm_bound() const { return norm_bound_; }
  const Matrix& dense() const { return a_; }

 private:
  Matrix a_;
  double norm_bound_ = 0.0;
};

struct SaddlePoint {
  Vec x;
  Vec y;
};

struct SaddleProblem {
  ConvexPart f;  // with primal geometry phi
  ConvexPart g;  // with dual geometry psi
  LinearCoupling A;
  std::optional<SaddlePoint> known_saddle;

  // Suggested starts for solvers and flows.
  Vec x_start;
  Vec y_start;

  std::string name;

  std::size_t n() const { return A.cols(); }
  std::size_t m() const { return A.rows(); }

  Vec default_x_start() const {
    if (!x_start.empty()) return x_start;
    if (f.geometry.kind() == GeometryKind::Entropy)
      return Vec(n(), 1.0 / double(n()));
    return zeros(n());
  }
  Vec default_y_start() const {
    if (!y_start.empty()) return y_start;
    if (g.geometry.kind() == GeometryKind::Entropy)
      return Vec(m(), 1.0 / double(m()));
    return zeros(m());
  }
};

// L(x, y) = f(x) + <Ax, y> - g(y); +inf outside indicator domains.
inline double lagrangian_value(const SaddleProblem& p, const Vec& x,
                               const Vec& y) {
  const double fx = p.f.value(x);
  const double gy = p.g.value(y);
  if (std::isinf(fx)) return fx;
  if (std::isinf(gy)) return -gy;
  const double cross = dot(p.A.apply(x), y);
  const double val = fx + cross - gy;
  if (!std::isfinite(val))
    throw std::domain_error(
        "lagrangian_value: non-finite arithmetic (f=" + format_double(fx) +
        ", <Ax,y>=" + format_double(cross) + ", g=" + format_double(gy) + ")");
  return val;
}

// Lagrangian gap L(x, yhat) - L(xhat, y); nonnegative when zhat is a saddle.
inline double gap(const SaddleProblem& p, const Vec& x, const Vec& y,
                  const SaddlePoint& zhat) {
  const double a = lagrangian_value(p, x, zhat.y);
  const double b = lagrangian_value(p, zhat.x, y);
  if (std::isinf(a) || std::isinf(b))
    throw std::domain_error("gap: point outside the Lagrangian domain");
  return a - b;
}

inline double bregman_divergence(const ProxGeometry& geom, const Vec& x,
                                 const Vec& v) {
  return geom.bregman(x, v);
}

// First-order optimality residual of a candidate saddle, measured through
// Euclidean prox fixed points: xhat = prox_f(.; A^T yhat) and symmetrically.
inline double saddle_residual(const SaddleProblem& p, const SaddlePoint& z) {
  const ProxGeometry euclid;
  auto part_residual = [&](const ConvexPart& part, const Vec& point,
                           Vec linear_term) -> double {
    ProxSpec full;
    if (auto fp = part.full_prox()) {
      full = *fp;
    } else {
      full = part.prox;
      const Vec gs = part.smooth.gradient(point);
      for (std::size_t i = 0; i < linear_term.size(); ++i)
        linear_term[i] += gs[i];
    }
    const Vec q = euclid.bregman_prox(full, linear_term, 1.0, point);
    return std::sqrt(dist2sq(q, point));
  };
  const double rx = part_residual(p.f, z.x, p.A.adjoint(z.y));
  const double ry = part_residual(p.g, z.y, scaled(-1.0, p.A.apply(z.x)));
  return std::sqrt(rx * rx + ry * ry);
}

}  // namespace pds
