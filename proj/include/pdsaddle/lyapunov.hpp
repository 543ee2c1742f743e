#pragma once

// Lyapunov functions for the primal-dual dynamics and their discrete
// counterpart, plus the per-step descent residual and the certified gap
// bound reconstructed from theta.

#include "pdsaddle/problem.hpp"

namespace pds {

struct IterateState {
  Vec x, v;  // primal iterate and momentum
  Vec y, w;  // dual iterate and momentum
};

// E(Theta, Z; zhat) = gap + (gamma/2)||v - xhat||^2 + (beta/2)||w - yhat||^2.
inline double lyapunov_E(double gamma, double beta, const IterateState& z,
                         const SaddlePoint& zhat, const SaddleProblem& p) {
  return gap(p, z.x, z.y, zhat) + 0.5 * gamma * dist2sq(z.v, zhat.x) +
         0.5 * beta * dist2sq(z.w, zhat.y);
}

// Bregman variant: gap + gamma*D_phi(xhat, v) + beta*D_psi(yhat, w).
// Coincides with lyapunov_E for Euclidean geometries.
inline double lyapunov_ED(double gamma, double beta, const IterateState& z,
                          const SaddlePoint& zhat, const SaddleProblem& p) {
  return gap(p, z.x, z.y, zhat) +
         gamma * p.f.geometry.bregman(zhat.x, z.v) +
         beta * p.g.geometry.bregman(zhat.y, z.w);
}

// Discrete Lyapunov function: E_D minus the cross coupling term.  The
// nonnegativity guarantee needs ||A||^2 alpha^2 <= gamma beta (see
// cross_condition_ok); callers flag runs where it lapses.
inline double lyapunov_H(double alpha, double gamma, double beta,
                         const IterateState& z, const SaddlePoint& zhat,
                         const SaddleProblem& p) {
  const Vec dv = sub(z.v, zhat.x);
  const Vec dw = sub(z.w, zhat.y);
  return lyapunov_ED(gamma, beta, z, zhat, p) - alpha * dot(p.A.apply(dv), dw);
}

inline bool cross_condition_ok(double alpha, double gamma, double beta,
                               double opnorm) {
  return opnorm * opnorm * alpha * alpha <= gamma * beta * (1.0 + 1e-12);
}

// H_{k+1} - H_k + alpha_k H_{k+1} + Omega_k; nonpositive up to slack when the
// active descent theorem holds.  Omega is supplied by the caller (the solvers
// know chi and the momentum increments; the symmetric method passes 0).
inline double descent_residual(double H_k, double H_next, double alpha_k,
                               double Omega_k) {
  return H_next - H_k + alpha_k * H_next + Omega_k;
}

// Certified gap bound 2 theta_k H_0.
inline double gap_from_certificate(double theta_k, double H_0) {
  return 2.0 * theta_k * H_0;
}

}  // namespace pds
