#pragma once

// Prox-functions, Bregman divergences and the closed-form Bregman-prox
// oracles the solvers rely on.  A geometry is 1-strongly convex by contract;
// the scaled variant reports its actual modulus so step-size rules can use it.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "pdsaddle/linalg.hpp"

namespace pds {

// Iterates are clipped here before logs; multiplicative updates keep entropy
// iterates positive analytically, the clip only guards underflow.
inline constexpr double kEntropyDomainEps = 1e-300;

enum class ProxTag { Zero, L1, Simplex, Box, Quadratic };

// Describes a prox-friendly convex function
//   h(v) = (quad_weight/2)·||v - center||^2 + l1_weight·||v||_1
//          + <linear, v> + indicator(tag in {Simplex, Box}),
// where center/linear default to zero when empty.  The registered oracles
// below solve  argmin_v { h(v) + <c, v> + theta·D_phi(v, vbar) }  exactly.
struct ProxSpec {
  ProxTag tag = ProxTag::Zero;
  double l1_weight = 0.0;
  double quad_weight = 0.0;
  Vec center;       // quadratic center, empty = origin
  Vec linear;       // extra linear term, empty = none
  double box_lo = 0.0;
  double box_hi = 1.0;

  static ProxSpec zero() { return {}; }
  static ProxSpec l1(double weight) {
    ProxSpec s;
    s.tag = ProxTag::L1;
    s.l1_weight = weight;
    return s;
  }
  static ProxSpec simplex() {
    ProxSpec s;
    s.tag = ProxTag::Simplex;
    return s;
  }
  static ProxSpec box(double lo, double hi) {
    ProxSpec s;
    s.tag = ProxTag::Box;
    s.box_lo = lo;
    s.box_hi = hi;
    return s;
  }
  static ProxSpec quadratic(double weight, Vec center = {}, Vec linear = {}) {
    ProxSpec s;
    s.tag = ProxTag::Quadratic;
    s.quad_weight = weight;
    s.center = std::move(center);
    s.linear = std::move(linear);
    return s;
  }

  bool has_indicator() const {
    return tag == ProxTag::Simplex || tag == ProxTag::Box;
  }

  // h is smooth iff it has no l1 part and no indicator.
  bool is_smooth() const { return l1_weight == 0.0 && !has_indicator(); }

  double center_at(std::size_t i) const {
    return center.empty() ? 0.0 : center[i];
  }
  double linear_at(std::size_t i) const {
    return linear.empty() ? 0.0 : linear[i];
  }

  // Function value; +inf outside the indicator's domain (checked with a
  // small feasibility tolerance).
  double value(const Vec& v) const {
    constexpr double feas_tol = 1e-8;
    double s = 0.0;
    if (tag == ProxTag::Simplex) {
      double sum = 0.0;
      for (double vi : v) {
        if (vi < -feas_tol) return std::numeric_limits<double>::infinity();
        sum += vi;
      }
      if (std::abs(sum - 1.0) > feas_tol)
        return std::numeric_limits<double>::infinity();
    } else if (tag == ProxTag::Box) {
      for (double vi : v)
        if (vi < box_lo - feas_tol || vi > box_hi + feas_tol)
          return std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = v[i] - center_at(i);
      s += 0.5 * quad_weight * d * d;
      s += l1_weight * std::abs(v[i]);
      s += linear_at(i) * v[i];
    }
    return s;
  }

  // Gradient of the smooth part (valid only when is_smooth()).
  Vec smooth_gradient(const Vec& v) const {
    Vec g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      g[i] = quad_weight * (v[i] - center_at(i)) + linear_at(i);
    return g;
  }
};

// Euclidean projection onto the probability simplex (sort-based).
inline Vec project_simplex(const Vec& y) {
  const std::size_t n = y.size();
  Vec u = y;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  std::size_t rho = 0;
  double running = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    running += u[i];
    const double t = (running - 1.0) / double(i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      css = running;
    }
  }
  tau = (css - 1.0) / double(rho);
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(y[i] - tau, 0.0);
  return x;
}

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Entropic prox over the simplex: argmin_v { <c,v> + theta*KL(v, vbar) }
// for v in the simplex.  Computed in shifted log-space (mandatory: the raw
// exponentials overflow for large |c|/theta).
inline Vec entropy_bregman_prox(const Vec& c, double theta, const Vec& vbar) {
  if (!(theta > 0.0)) throw std::invalid_argument("entropy prox: theta <= 0");
  if (c.size() != vbar.size())
    throw std::invalid_argument("entropy prox: size mismatch");
  const std::size_t n = vbar.size();
  Vec logw(n);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double vb = std::max(vbar[i], kEntropyDomainEps);
    logw[i] = std::log(vb) - c[i] / theta;
    m = std::max(m, logw[i]);
  }
  Vec v(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::exp(logw[i] - m);
    sum += v[i];
  }
  for (auto& vi : v) vi /= sum;
  return v;
}

enum class GeometryKind { Euclidean, ScaledEuclidean, Entropy };

class ProxGeometry {
 public:
  ProxGeometry() = default;

  static ProxGeometry euclidean() { return ProxGeometry(); }

  // phi(x) = (scale/2)||x||^2 with scale >= 1 so the prox-function contract
  // (1-strong convexity) holds.
  static ProxGeometry scaled_euclidean(double scale) {
    if (!(scale >= 1.0))
      throw std::invalid_argument("scaled geometry needs scale >= 1");
    ProxGeometry g;
    g.kind_ = GeometryKind::ScaledEuclidean;
    g.scale_ = scale;
    return g;
  }

  static ProxGeometry entropy() {
    ProxGeometry g;
    g.kind_ = GeometryKind::Entropy;
    return g;
  }

  GeometryKind kind() const { return kind_; }
  double scale() const { return scale_; }

  // Strong-convexity modulus of phi (>= 1 by construction).
  double strong_convexity() const {
    return kind_ == GeometryKind::ScaledEuclidean ? scale_ : 1.0;
  }

  bool is_quadratic() const { return kind_ != GeometryKind::Entropy; }

  bool domain_check(const Vec& x) const {
    if (kind_ != GeometryKind::Entropy) return all_finite(x);
    for (double xi : x)
      if (!(xi > 0.0) || !std::isfinite(xi)) return false;
    return true;
  }

  Vec grad_phi(const Vec& x) const {
    switch (kind_) {
      case GeometryKind::Euclidean:
        return x;
      case GeometryKind::ScaledEuclidean:
        return scaled(scale_, x);
      case GeometryKind::Entropy: {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double xi = std::max(x[i], kEntropyDomainEps);
          g[i] = std::log(xi) + 1.0;
        }
        return g;
      }
    }
    return x;
  }

  // D_phi(x, v).  For entropy, v must be interior (strictly positive); x may
  // touch the boundary (0·log 0 = 0).
  double bregman(const Vec& x, const Vec& v) const {
    if (x.size() != v.size())
      throw std::invalid_argument("bregman: size mismatch");
    switch (kind_) {
      case GeometryKind::Euclidean:
        return 0.5 * dist2sq(x, v);
      case GeometryKind::ScaledEuclidean:
        return 0.5 * scale_ * dist2sq(x, v);
      case GeometryKind::Entropy: {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (!(v[i] > 0.0))
            throw std::domain_error(
                "bregman: entropy reference point on the domain boundary");
          if (x[i] < 0.0)
            throw std::domain_error("bregman: negative entropy coordinate");
          if (x[i] > 0.0) s += x[i] * std::log(x[i] / v[i]);
          s += v[i] - x[i];
        }
        return s;
      }
    }
    return 0.0;
  }

  // argmin_v { h(v) + <c, v> + theta * D_phi(v, vbar) } with h given by spec.
  Vec bregman_prox(const ProxSpec& spec, const Vec& c, double theta,
                   const Vec& vbar) const {
    if (!(theta > 0.0)) throw std::invalid_argument("bregman_prox: theta <= 0");
    if (c.size() != vbar.size())
      throw std::invalid_argument("bregman_prox: size mismatch");
    if (kind_ == GeometryKind::Entropy) {
      if (spec.tag != ProxTag::Simplex || spec.quad_weight != 0.0 ||
          spec.l1_weight != 0.0)
        throw std::invalid_argument(
            "bregman_prox: entropy geometry only registers the simplex "
            "indicator oracle");
      Vec shift = c;
      if (!spec.linear.empty())
        for (std::size_t i = 0; i < shift.size(); ++i)
          shift[i] += spec.linear[i];
      return entropy_bregman_prox(shift, theta, vbar);
    }

    // Quadratic geometries: componentwise closed form followed by the
    // indicator step where present.
    const double w = theta * strong_convexity();
    const std::size_t n = vbar.size();
    if (spec.tag == ProxTag::Simplex) {
      if (spec.quad_weight != 0.0 || spec.l1_weight != 0.0)
        throw std::invalid_argument(
            "bregman_prox: simplex oracle takes linear terms only");
      Vec y(n);
      for (std::size_t i = 0; i < n; ++i)
        y[i] = vbar[i] - (c[i] + spec.linear_at(i)) / w;
      return project_simplex(y);
    }
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = spec.quad_weight + w;
      const double u =
          (spec.quad_weight * spec.center_at(i) + w * vbar[i] - c[i] -
           spec.linear_at(i)) /
          t;
      double vi = spec.l1_weight > 0.0 ? soft_threshold(u, spec.l1_weight / t)
                                       : u;
      if (spec.tag == ProxTag::Box)
        vi = std::min(std::max(vi, spec.box_lo), spec.box_hi);
      v[i] = vi;
    }
    return v;
  }

 private:
  GeometryKind kind_ = GeometryKind::Euclidean;
  double scale_ = 1.0;
};

inline std::string geometry_name(const ProxGeometry& g) {
  switch (g.kind()) {
    case GeometryKind::Euclidean:
      return "euclidean";
    case GeometryKind::ScaledEuclidean:
      return "scaled_euclidean";
    case GeometryKind::Entropy:
      return "entropy";
  }
  return "euclidean";
}

}  // namespace pds
