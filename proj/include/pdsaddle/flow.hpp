#pragma once

// The accelerated primal-dual gradient flow with its scaling-parameter ODEs,
// integrated by fixed-step classical Runge-Kutta; used to verify exponential
// decay of the Lyapunov function along trajectories.

#include <stdexcept>
#include <vector>

#include "pdsaddle/lyapunov.hpp"
#include "pdsaddle/problem.hpp"

namespace pds {

struct FlowState {
  Vec x, v, y, w;
  double gamma = 1.0;
  double beta = 1.0;
};

// Right-hand side of the joint (Z, Theta) system:
//   x' = v - x,              y' = w - y,
//   v' = (mu_f (x-v) - grad f(x) - A^T w) / gamma,
//   w' = (mu_g (y-w) + A v  - grad g(y)) / beta,
//   gamma' = mu_f - gamma,   beta' = mu_g - beta.
// Requires smooth f, g and Euclidean geometries.
inline FlowState apdg_flow_rhs(const SaddleProblem& p, const FlowState& s) {
  if (!(s.gamma > 0.0 && s.beta > 0.0))
    throw std::domain_error("apdg_flow_rhs: gamma and beta must stay positive");
  FlowState d;
  d.x = sub(s.v, s.x);
  d.y = sub(s.w, s.y);
  const Vec gf = p.f.full_gradient(s.x);
  const Vec gg = p.g.full_gradient(s.y);
  const Vec atw = p.A.adjoint(s.w);
  const Vec av = p.A.apply(s.v);
  d.v.resize(s.v.size());
  for (std::size_t i = 0; i < d.v.size(); ++i)
    d.v[i] = (p.f.mu * (s.x[i] - s.v[i]) - gf[i] - atw[i]) / s.gamma;
  d.w.resize(s.w.size());
  for (std::size_t i = 0; i < d.w.size(); ++i)
    d.w[i] = (p.g.mu * (s.y[i] - s.w[i]) + av[i] - gg[i]) / s.beta;
  d.gamma = p.f.mu - s.gamma;
  d.beta = p.g.mu - s.beta;
  return d;
}

struct FlowSample {
  double t = 0.0;
  FlowState state;
  double energy = 0.0;  // E(Theta, Z; zhat)
};

struct FlowResult {
  std::vector<FlowSample> samples;
  bool blew_up = false;
  double blowup_time = 0.0;
};

namespace detail {

inline FlowState flow_axpy(const FlowState& base, double h,
                           const FlowState& d) {
  FlowState r;
  r.x = axpy(h, d.x, base.x);
  r.v = axpy(h, d.v, base.v);
  r.y = axpy(h, d.y, base.y);
  r.w = axpy(h, d.w, base.w);
  r.gamma = base.gamma + h * d.gamma;
  r.beta = base.beta + h * d.beta;
  return r;
}

inline double flow_norm(const FlowState& s) {
  return std::sqrt(norm2sq(s.x) + norm2sq(s.v) + norm2sq(s.y) + norm2sq(s.w));
}

}  // namespace detail

// Classical RK4 on the joint system.  Samples every sample_every steps plus
// the endpoint; aborts with the failure time when the trajectory blows up.
inline FlowResult integrate_flow(const SaddleProblem& p, FlowState s0,
                                 double T, double h, long sample_every = 1) {
  if (!(h > 0.0 && h <= 1e-2))
    throw std::invalid_argument("integrate_flow: step size must be in (0, 1e-2]");
  if (!(T > 0.0 && T <= 50.0))
    throw std::invalid_argument("integrate_flow: horizon must be in (0, 50]");
  if (!p.known_saddle)
    throw std::invalid_argument(
        "integrate_flow: energy sampling needs a known saddle point");
  if (!p.f.geometry.is_quadratic() || !p.g.geometry.is_quadratic() ||
      p.f.geometry.strong_convexity() != 1.0 ||
      p.g.geometry.strong_convexity() != 1.0)
    throw std::invalid_argument("integrate_flow: Euclidean geometries only");
  const SaddlePoint& zhat = *p.known_saddle;

  auto energy = [&](const FlowState& s) {
    IterateState z{s.x, s.v, s.y, s.w};
    return lyapunov_E(s.gamma, s.beta, z, zhat, p);
  };

  FlowResult out;
  const long steps = std::lround(T / h);
  FlowState s = std::move(s0);
  out.samples.push_back({0.0, s, energy(s)});
  for (long k = 0; k < steps; ++k) {
    const FlowState k1 = apdg_flow_rhs(p, s);
    const FlowState k2 = apdg_flow_rhs(p, detail::flow_axpy(s, 0.5 * h, k1));
    const FlowState k3 = apdg_flow_rhs(p, detail::flow_axpy(s, 0.5 * h, k2));
    const FlowState k4 = apdg_flow_rhs(p, detail::flow_axpy(s, h, k3));
    FlowState next = s;
    const double w6 = h / 6.0;
    auto advance = [&](Vec& dst, const Vec& a, const Vec& b, const Vec& c,
                       const Vec& d) {
      for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] += w6 * (a[i] + 2.0 * (b[i] + c[i]) + d[i]);
    };
    advance(next.x, k1.x, k2.x, k3.x, k4.x);
    advance(next.v, k1.v, k2.v, k3.v, k4.v);
    advance(next.y, k1.y, k2.y, k3.y, k4.y);
    advance(next.w, k1.w, k2.w, k3.w, k4.w);
    next.gamma += w6 * (k1.gamma + 2.0 * (k2.gamma + k3.gamma) + k4.gamma);
    next.beta += w6 * (k1.beta + 2.0 * (k2.beta + k3.beta) + k4.beta);
    s = next;
    const double t = double(k + 1) * h;
    if (detail::flow_norm(s) > 1e12) {
      out.blew_up = true;
      out.blowup_time = t;
      out.samples.push_back({t, s, energy(s)});
      return out;
    }
    if ((k + 1) % sample_every == 0 || k + 1 == steps)
      out.samples.push_back({t, s, energy(s)});
  }
  return out;
}

}  // namespace pds
