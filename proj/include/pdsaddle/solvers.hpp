#pragma once

// One-step transition maps for the three accelerated Bregman primal-dual
// splitting methods plus the PDHG / Chambolle-Pock baselines, and a driver
// that runs them to termination while checking the Lyapunov certificates
// online.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pdsaddle/lyapunov.hpp"
#include "pdsaddle/params.hpp"
#include "pdsaddle/problem.hpp"

namespace pds {

enum class Algorithm { AbpdPs, AbpdPgs, SymAbpdPgs, ChambollePock, Pdhg };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::AbpdPs: return "abpd_ps";
    case Algorithm::AbpdPgs: return "abpd_pgs";
    case Algorithm::SymAbpdPgs: return "sym_abpd_pgs";
    case Algorithm::ChambollePock: return "cp";
    case Algorithm::Pdhg: return "pdhg";
  }
  return "?";
}

inline std::optional<Algorithm> algorithm_from_name(const std::string& s) {
  if (s == "abpd_ps") return Algorithm::AbpdPs;
  if (s == "abpd_pgs") return Algorithm::AbpdPgs;
  if (s == "sym_abpd_pgs") return Algorithm::SymAbpdPgs;
  if (s == "cp") return Algorithm::ChambollePock;
  if (s == "pdhg") return Algorithm::Pdhg;
  return std::nullopt;
}

// Subproblem data handed to a user-registered oracle when the splitting
// method runs under a non-quadratic geometry (the composed prox of the
// primal/dual update has the Bregman term at an affine image of the decision
// variable, so no registered tag oracle applies).
struct ComposedProxArgs {
  ProxSpec objective;   // full nonsmooth part (f or g)
  Vec linear;           // fixed linear term (A^T w_k, resp. -A vbar_{k+1})
  Vec iterate;          // x_k (resp. y_k)
  Vec momentum;         // v_k (resp. w_k)
  double alpha = 0.0;   // alpha_k (resp. eta_k * alpha_k)
  double gamma = 0.0;   // gamma_k (resp. beta_k)
  double mu = 0.0;      // mu_f (resp. mu_g)
};
using ComposedProxOracle = std::function<Vec(const ComposedProxArgs&)>;

struct SolverConfig {
  Algorithm algorithm = Algorithm::AbpdPs;
  double gamma0 = 1.0;
  double beta0 = 1.0;
  double chi = 0.0;
  long max_iters = 100;
  long certificate_every = 1;
  std::optional<double> gap_tol;  // requires known_saddle

  // Baseline (CP/PDHG) parameters; PDHG is theta_relax = 0.
  double tau = 0.0;    // 0 = choose 0.95/||A|| at run time
  double sigma = 0.0;
  double theta_relax = 1.0;

  // Optional starting point overrides.
  std::optional<Vec> x0, v0, y0, w0;

  // Composed prox oracles for ABPD-PS / the ABPD-PGS dual update under
  // non-quadratic geometries.
  ComposedProxOracle primal_composed_prox;
  ComposedProxOracle dual_composed_prox;
};

// Fixed trace CSV column order:
// k, alpha, gamma, beta, eta, theta, gap, H, bound, dist_x, dist_y, dv2, dw2,
// descent_residual.
struct TraceRecord {
  long k = 0;
  double alpha = 0, gamma = 0, beta = 0, eta = 0, theta = 1;
  double gap = 0;
  double H = 0;
  double bound = 0;  // 2 theta_k H_0
  double dist_x = 0, dist_y = 0;
  double dv2 = 0, dw2 = 0;  // squared momentum increments of the producing step
  double descent_residual = 0;
};

struct Trace {
  std::vector<TraceRecord> rows;
  bool certified = false;
  double H0 = 0.0;
  long iters = 0;
  double final_gap = 0.0;
  long descent_violations = 0;
  long gap_violations = 0;
  bool summability_ok = true;
  bool telescoping_ok = true;
  double weighted_increment_sum = 0.0;  // sum chi/theta_i (gamma_i dv2 + beta_i dw2)
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> warnings;
  bool cross_condition_flag = false;  // set if ||A||^2 a^2 <= gamma beta lapsed

  bool violations() const { return descent_violations > 0; }
};

// Scalar bundle for one iteration of the accelerated family.
struct StepScalars {
  double alpha = 0;       // alpha_k
  double gamma = 0;       // gamma_k
  double beta = 0;        // beta_k
  double gamma_next = 0;  // gamma_{k+1}
  double beta_next = 0;   // beta_{k+1}
  double alpha_next = 0;  // alpha_{k+1}
  double eta = 0;         // eta_k = alpha_{k+1} (1+alpha_k) / alpha_k
};

namespace detail {

inline double alpha_rule(Algorithm algo, const SaddleProblem& p, double chi,
                         double gamma, double beta) {
  // Step sizes consume the geometry-effective weights: gamma D_phi absorbs
  // the strong-convexity modulus of phi, so the cross-term condition reads
  // ||A||^2 a^2 <= (s_phi gamma)(s_psi beta).
  const double ge = p.f.geometry.strong_convexity() * gamma;
  const double be = p.g.geometry.strong_convexity() * beta;
  switch (algo) {
    case Algorithm::AbpdPs:
      return step_size_ps(ge, be, p.A.norm_bound(), chi);
    case Algorithm::AbpdPgs:
      return step_size_pgs(ge, be, p.f.lipschitz(), p.A.norm_bound(), chi);
    case Algorithm::SymAbpdPgs:
      return step_size_sym(ge, be, p.f.lipschitz(), p.g.lipschitz(),
                           p.A.norm_bound());
    default:
      throw std::logic_error("alpha_rule: baseline has no scaling parameters");
  }
}

}  // namespace detail

// Computes alpha_k, the advanced (gamma, beta), alpha_{k+1} and eta_k from
// the current scaling parameters.  Pure; usable standalone for tests.
inline StepScalars advance_scalars(Algorithm algo, const SaddleProblem& p,
                                   double chi, double gamma, double beta) {
  StepScalars s;
  s.gamma = gamma;
  s.beta = beta;
  s.alpha = detail::alpha_rule(algo, p, chi, gamma, beta);
  std::tie(s.gamma_next, s.beta_next) =
      advance_gamma_beta(gamma, beta, s.alpha, p.f.mu, p.g.mu);
  s.alpha_next = detail::alpha_rule(algo, p, chi, s.gamma_next, s.beta_next);
  s.eta = eta_factor(s.alpha, s.alpha_next);
  return s;
}

namespace detail {

inline Vec affine_combo(const Vec& a, double ca, const Vec& b, double cb) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = ca * a[i] + cb * b[i];
  return r;
}

// Dual update shared by ABPD-PS and ABPD-PGS (composed form, full g).
inline void dual_composed_update(const SaddleProblem& p, const IterateState& z,
                                 const StepScalars& s, const Vec& vbar_next,
                                 const SolverConfig& cfg, IterateState& out) {
  const double a = s.alpha, eta = s.eta, mu_g = p.g.mu;
  const Vec cd = scaled(-1.0, p.A.apply(vbar_next));
  if (p.g.geometry.is_quadratic()) {
    const double tau = mu_g * a + s.beta * (1.0 + eta * a);
    const Vec yt = affine_combo(z.y, (mu_g * a + s.beta) / tau, z.w,
                                eta * s.beta * a / tau);
    const auto full = p.g.full_prox();
    out.y = p.g.geometry.bregman_prox(*full, cd, tau / (eta * a * a), yt);
  } else {
    ComposedProxArgs args;
    args.objective = p.g.prox;  // full g; smooth part empty here by contract
    args.linear = cd;
    args.iterate = z.y;
    args.momentum = z.w;
    args.alpha = a;
    args.gamma = s.beta;
    args.mu = mu_g;
    out.y = cfg.dual_composed_prox(args);
  }
  out.w = affine_combo(out.y, 1.0 + 1.0 / (a * eta), z.y, -1.0 / (a * eta));
}

}  // namespace detail

// One step of the proximal splitting method (both prox steps act on the full
// f and g).  Quadratic geometries use the closed forms; otherwise the
// registered composed oracles are invoked.
inline IterateState abpd_ps_step(const SaddleProblem& p, const IterateState& z,
                                 const StepScalars& s,
                                 const SolverConfig& cfg) {
  IterateState out;
  const double a = s.alpha, mu_f = p.f.mu;
  if (p.f.geometry.is_quadratic()) {
    const double delta = mu_f * a + s.gamma * (1.0 + a);
    const Vec xt = detail::affine_combo(z.x, (mu_f * a + s.gamma) / delta, z.v,
                                        s.gamma * a / delta);
    const Vec c = p.A.adjoint(z.w);
    const auto full = p.f.full_prox();
    out.x = p.f.geometry.bregman_prox(*full, c, delta / (a * a), xt);
  } else {
    ComposedProxArgs args;
    args.objective = p.f.prox;
    args.linear = p.A.adjoint(z.w);
    args.iterate = z.x;
    args.momentum = z.v;
    args.alpha = a;
    args.gamma = s.gamma;
    args.mu = mu_f;
    out.x = cfg.primal_composed_prox(args);
  }
  out.v = detail::affine_combo(out.x, 1.0 + 1.0 / a, z.x, -1.0 / a);
  const Vec vbar =
      detail::affine_combo(out.v, 1.0 + 1.0 / s.eta, z.v, -1.0 / s.eta);
  detail::dual_composed_update(p, z, s, vbar, cfg, out);
  return out;
}

// One step of the proximal gradient splitting method: f = f1 + f2 with the
// gradient of f1 evaluated at the interpolated point, f2 handled by a direct
// Bregman prox in the momentum variable; dual update as in the splitting
// method.
inline IterateState abpd_pgs_step(const SaddleProblem& p,
                                  const IterateState& z, const StepScalars& s,
                                  const SolverConfig& cfg) {
  IterateState out;
  const double a = s.alpha, mu_f = p.f.mu;
  const Vec xbar =
      detail::affine_combo(z.x, 1.0 / (1.0 + a), z.v, a / (1.0 + a));
  Vec vt = p.f.smooth_gradient(xbar);
  {
    const Vec atw = p.A.adjoint(z.w);
    for (std::size_t i = 0; i < vt.size(); ++i) vt[i] += atw[i];
  }
  if (mu_f > 0.0) {
    const Vec gx = p.f.geometry.grad_phi(xbar);
    const Vec gv = p.f.geometry.grad_phi(z.v);
    for (std::size_t i = 0; i < vt.size(); ++i) vt[i] -= mu_f * (gx[i] - gv[i]);
  }
  out.v =
      p.f.geometry.bregman_prox(p.f.prox, vt, (s.gamma + mu_f * a) / a, z.v);
  out.x = detail::affine_combo(z.x, 1.0 / (1.0 + a), out.v, a / (1.0 + a));
  const Vec vbar =
      detail::affine_combo(out.v, 1.0 + 1.0 / s.eta, z.v, -1.0 / s.eta);
  detail::dual_composed_update(p, z, s, vbar, cfg, out);
  return out;
}

// One step of the symmetric method: both sides carry the smooth + nonsmooth
// split and both updates are direct Bregman proxes.
inline IterateState sym_abpd_pgs_step(const SaddleProblem& p,
                                      const IterateState& z,
                                      const StepScalars& s,
                                      const SolverConfig& cfg) {
  IterateState out;
  const double a = s.alpha, eta = s.eta;
  const double mu_f = p.f.mu, mu_g = p.g.mu;
  // Primal half, identical to the proximal gradient splitting step.
  const Vec xbar =
      detail::affine_combo(z.x, 1.0 / (1.0 + a), z.v, a / (1.0 + a));
  Vec vt = p.f.smooth_gradient(xbar);
  {
    const Vec atw = p.A.adjoint(z.w);
    for (std::size_t i = 0; i < vt.size(); ++i) vt[i] += atw[i];
  }
  if (mu_f > 0.0) {
    const Vec gx = p.f.geometry.grad_phi(xbar);
    const Vec gv = p.f.geometry.grad_phi(z.v);
    for (std::size_t i = 0; i < vt.size(); ++i) vt[i] -= mu_f * (gx[i] - gv[i]);
  }
  out.v =
      p.f.geometry.bregman_prox(p.f.prox, vt, (s.gamma + mu_f * a) / a, z.v);
  out.x = detail::affine_combo(z.x, 1.0 / (1.0 + a), out.v, a / (1.0 + a));
  const Vec vbar =
      detail::affine_combo(out.v, 1.0 + 1.0 / eta, z.v, -1.0 / eta);
  // Dual half, mirrored.
  const Vec ybar = detail::affine_combo(z.y, 1.0 / (1.0 + eta * a), z.w,
                                        eta * a / (1.0 + eta * a));
  Vec wt = p.g.smooth_gradient(ybar);
  {
    const Vec av = p.A.apply(vbar);
    for (std::size_t i = 0; i < wt.size(); ++i) wt[i] -= av[i];
  }
  if (mu_g > 0.0) {
    const Vec gy = p.g.geometry.grad_phi(ybar);
    const Vec gw = p.g.geometry.grad_phi(z.w);
    for (std::size_t i = 0; i < wt.size(); ++i)
      wt[i] -= (mu_g / eta) * (gy[i] - gw[i]);
  }
  out.w = p.g.geometry.bregman_prox(p.g.prox, wt,
                                    (s.beta + mu_g * a) / (eta * a), z.w);
  out.y = detail::affine_combo(z.y, 1.0 / (1.0 + a * eta), out.w,
                               a * eta / (1.0 + a * eta));
  return out;
}

// Chambolle-Pock / PDHG baseline state and step.  theta_relax = 0 is PDHG.
struct CpState {
  Vec x, y, xbar;
};

inline CpState cp_step(const SaddleProblem& p, const CpState& z, double tau,
                       double sigma, double theta_relax) {
  const auto full_f = p.f.full_prox();
  const auto full_g = p.g.full_prox();
  if (!full_f || !full_g || !p.f.geometry.is_quadratic() ||
      !p.g.geometry.is_quadratic())
    throw std::invalid_argument(
        "cp_step: baseline needs closed-form proxes under a quadratic "
        "geometry");
  CpState out;
  out.x = p.f.geometry.bregman_prox(*full_f, p.A.adjoint(z.y), 1.0 / tau, z.x);
  out.xbar = detail::affine_combo(out.x, 1.0 + theta_relax, z.x, -theta_relax);
  out.y = p.g.geometry.bregman_prox(*full_g, scaled(-1.0, p.A.apply(out.xbar)),
                                    1.0 / sigma, z.y);
  return out;
}

namespace detail {

// val / theta computed safely when theta has underflowed.
inline double ratio_over_theta(double val, double theta, double log_theta) {
  if (val == 0.0) return 0.0;
  if (theta >= 1e-280) return val / theta;
  const double lr = std::log(std::abs(val)) - log_theta;
  const double r = std::exp(std::min(lr, 700.0));
  return val > 0.0 ? r : -r;
}

// gap-side certificate lhs <= 2 theta H0 (1 + 1e-9), falling back to a
// log-space comparison once the bound underflows.
inline bool gap_certificate_ok(double lhs, double theta, double log_theta,
                               double H0) {
  if (!(lhs > 0.0)) return true;
  const double bound = 2.0 * theta * H0;
  if (lhs <= bound * (1.0 + 1e-9)) return true;
  if (H0 > 0.0 && bound < 1e-290)
    return std::log(lhs) <= std::log(2.0 * H0) + log_theta + 1e-9;
  return false;
}

inline void validate(const SaddleProblem& p, const SolverConfig& cfg) {
  const bool accel = cfg.algorithm == Algorithm::AbpdPs ||
                     cfg.algorithm == Algorithm::AbpdPgs ||
                     cfg.algorithm == Algorithm::SymAbpdPgs;
  if (accel) {
    if (!(cfg.gamma0 > 0.0 && cfg.beta0 > 0.0))
      throw std::invalid_argument("solver config: gamma0, beta0 must be > 0");
    if (!(cfg.chi >= 0.0 && cfg.chi < 1.0))
      throw std::invalid_argument("solver config: chi outside [0,1)");
  }
  switch (cfg.algorithm) {
    case Algorithm::AbpdPs: {
      if (!(p.A.norm_bound() > 0.0))
        throw std::invalid_argument(
            "abpd_ps: zero coupling rejected (step-size rule needs ||A||>0)");
      if (p.f.geometry.is_quadratic()) {
        if (!p.f.full_prox())
          throw std::invalid_argument(
              "abpd_ps: no closed-form prox for the full primal objective");
      } else if (!cfg.primal_composed_prox) {
        throw std::invalid_argument(
            "abpd_ps: non-quadratic primal geometry requires a registered "
            "composed-prox oracle");
      } else if (!p.f.smooth.trivial()) {
        throw std::invalid_argument(
            "abpd_ps: composed-prox oracle sees only the nonsmooth part; "
            "fold the smooth primal piece into it first");
      }
      if (p.g.geometry.is_quadratic()) {
        if (!p.g.full_prox())
          throw std::invalid_argument(
              "abpd_ps: no closed-form prox for the full dual objective");
      } else if (!cfg.dual_composed_prox) {
        throw std::invalid_argument(
            "abpd_ps: non-quadratic dual geometry requires a registered "
            "composed-prox oracle");
      } else if (!p.g.smooth.trivial()) {
        throw std::invalid_argument(
            "abpd_ps: composed-prox oracle sees only the nonsmooth part; "
            "fold the smooth dual piece into it first");
      }
      break;
    }
    case Algorithm::AbpdPgs: {
      if (!(p.f.lipschitz() * cfg.beta0 +
                p.A.norm_bound() * p.A.norm_bound() >
            0.0))
        throw std::invalid_argument(
            "abpd_pgs: L_f*beta + ||A||^2 must be positive (zero coupling "
            "needs L_f > 0)");
      if (!p.f.geometry.is_quadratic() && p.f.prox.tag != ProxTag::Simplex)
        throw std::invalid_argument(
            "abpd_pgs: the entropy geometry registers only the simplex "
            "oracle for the primal prox");
      if (p.g.geometry.is_quadratic()) {
        if (!p.g.full_prox())
          throw std::invalid_argument(
              "abpd_pgs: no closed-form prox for the full dual objective");
      } else if (!cfg.dual_composed_prox) {
        throw std::invalid_argument(
            "abpd_pgs: non-quadratic dual geometry requires a registered "
            "composed-prox oracle (route entropy demos through "
            "sym_abpd_pgs)");
      }
      break;
    }
    case Algorithm::SymAbpdPgs: {
      const double denom = p.f.lipschitz() * cfg.beta0 +
                           p.g.lipschitz() * cfg.gamma0 +
                           p.A.norm_bound() * p.A.norm_bound();
      if (!(denom > 0.0))
        throw std::invalid_argument(
            "sym_abpd_pgs: L_f*beta + L_g*gamma + ||A||^2 must be positive");
      if (!p.f.geometry.is_quadratic() && p.f.prox.tag != ProxTag::Simplex)
        throw std::invalid_argument(
            "sym_abpd_pgs: the entropy geometry registers only the simplex "
            "oracle for the primal prox");
      if (!p.g.geometry.is_quadratic() && p.g.prox.tag != ProxTag::Simplex)
        throw std::invalid_argument(
            "sym_abpd_pgs: the entropy geometry registers only the simplex "
            "oracle for the dual prox");
      break;
    }
    case Algorithm::ChambollePock:
    case Algorithm::Pdhg: {
      if (!p.f.full_prox() || !p.g.full_prox() ||
          !p.f.geometry.is_quadratic() || !p.g.geometry.is_quadratic())
        throw std::invalid_argument(
            "cp/pdhg: baseline needs closed-form proxes under quadratic "
            "geometries");
      break;
    }
  }
  if (cfg.gap_tol && !p.known_saddle)
    throw std::invalid_argument(
        "solver config: gap_tol stopping requires a known saddle point");
}

}  // namespace detail

inline Trace solve(const SaddleProblem& p, const SolverConfig& cfg) {
  detail::validate(p, cfg);
  Trace trace;
  const bool accel = cfg.algorithm == Algorithm::AbpdPs ||
                     cfg.algorithm == Algorithm::AbpdPgs ||
                     cfg.algorithm == Algorithm::SymAbpdPgs;
  const long every = std::max<long>(1, cfg.certificate_every);

  IterateState z;
  z.x = cfg.x0 ? *cfg.x0 : p.default_x_start();
  z.v = cfg.v0 ? *cfg.v0 : z.x;
  z.y = cfg.y0 ? *cfg.y0 : p.default_y_start();
  z.w = cfg.w0 ? *cfg.w0 : z.y;

  const SaddlePoint* zhat =
      p.known_saddle ? &*p.known_saddle : nullptr;
  trace.certified = accel && zhat != nullptr;
  if (accel && !zhat)
    trace.warnings.push_back(
        "certificates disabled: no known saddle point available");

  // Baselines keep their own state embedded in (x, v=xbar, y).
  double tau = cfg.tau, sigma = cfg.sigma;
  double theta_relax =
      cfg.algorithm == Algorithm::Pdhg ? 0.0 : cfg.theta_relax;
  if (!accel) {
    if (tau <= 0.0 || sigma <= 0.0) {
      const double nb = std::max(p.A.norm_bound(), 1e-30);
      tau = sigma = 0.95 / nb;
    }
    if (tau * sigma * p.A.norm_bound() * p.A.norm_bound() > 1.0 + 1e-12)
      trace.warnings.push_back("cp/pdhg: tau*sigma*||A||^2 > 1");
  }

  // Precomputed saddle data for O(n+m) gap evaluation per iteration.
  Vec at_yhat, a_xhat;
  double f_xhat = 0.0, g_yhat = 0.0;
  if (zhat) {
    at_yhat = p.A.adjoint(zhat->y);
    a_xhat = p.A.apply(zhat->x);
    f_xhat = p.f.value(zhat->x);
    g_yhat = p.g.value(zhat->y);
  }
  auto gap_at = [&](const IterateState& s) -> double {
    const double lx = p.f.value(s.x) + dot(s.x, at_yhat) - g_yhat;
    const double ly = f_xhat + dot(a_xhat, s.y) - p.g.value(s.y);
    return lx - ly;
  };

  ParamState ps;
  ps.gamma = cfg.gamma0;
  ps.beta = cfg.beta0;
  ps.theta = 1.0;
  ps.log_theta = 0.0;

  double H_k = 0.0;
  double sum_omega_over_theta = 0.0;
  double prev_dv2 = 0.0, prev_dw2 = 0.0, prev_resid = 0.0;

  StepScalars s;
  if (accel) {
    s = advance_scalars(cfg.algorithm, p, cfg.chi, ps.gamma, ps.beta);
    if (trace.certified) {
      H_k = lyapunov_H(s.alpha, ps.gamma, ps.beta, z, *zhat, p);
      trace.H0 = H_k;
      const double ge = p.f.geometry.strong_convexity() * ps.gamma;
      const double be = p.g.geometry.strong_convexity() * ps.beta;
      if (!cross_condition_ok(s.alpha, ge, be, p.A.norm_bound()))
        trace.cross_condition_flag = true;
    }
  }

  auto record = [&](long k) {
    TraceRecord r;
    r.k = k;
    if (accel) {
      r.alpha = s.alpha;
      r.gamma = ps.gamma;
      r.beta = ps.beta;
      r.eta = s.eta;
      r.theta = ps.theta;
    }
    if (zhat) {
      r.gap = gap_at(z);
      r.dist_x = dist2sq(z.x, zhat->x);
      r.dist_y = dist2sq(z.y, zhat->y);
      if (trace.certified) {
        r.H = H_k;
        r.bound = gap_from_certificate(ps.theta, trace.H0);
      }
    }
    r.dv2 = prev_dv2;
    r.dw2 = prev_dw2;
    r.descent_residual = prev_resid;
    trace.rows.push_back(r);
  };

  const double mu_f = p.f.mu, mu_g = p.g.mu;
  long k = 0;
  for (; k < cfg.max_iters; ++k) {
    if (k % every == 0) record(k);

    IterateState next;
    if (accel) {
      switch (cfg.algorithm) {
        case Algorithm::AbpdPs:
          next = abpd_ps_step(p, z, s, cfg);
          break;
        case Algorithm::AbpdPgs:
          next = abpd_pgs_step(p, z, s, cfg);
          break;
        default:
          next = sym_abpd_pgs_step(p, z, s, cfg);
          break;
      }
    } else {
      CpState nc = cp_step(p, {z.x, z.y, z.v}, tau, sigma, theta_relax);
      next.x = nc.x;
      next.v = nc.xbar;
      next.y = nc.y;
      next.w = nc.y;
    }

    if (!all_finite(next.x) || !all_finite(next.y) || !all_finite(next.v) ||
        !all_finite(next.w)) {
      trace.aborted = true;
      trace.abort_reason = "non-finite iterate at k=" + std::to_string(k + 1);
      record(k + 1);
      break;
    }

    prev_dv2 = dist2sq(next.v, z.v);
    prev_dw2 = dist2sq(next.w, z.w);
    prev_resid = 0.0;

    if (accel) {
      const double theta_next = advance_theta(ps.theta, s.alpha);
      const double log_theta_next = ps.log_theta - std::log1p(s.alpha);
      if (trace.certified) {
        IterateState& zn = next;
        const double H_next =
            lyapunov_H(s.alpha_next, s.gamma_next, s.beta_next, zn, *zhat, p);
        double omega = 0.0;
        if (cfg.algorithm != Algorithm::SymAbpdPgs && cfg.chi > 0.0) {
          const double ge = p.f.geometry.strong_convexity() * s.gamma;
          const double be = p.g.geometry.strong_convexity() * s.beta;
          omega = cfg.chi * (0.5 * ge * prev_dv2 + 0.5 * be * prev_dw2);
        }
        prev_resid = descent_residual(H_k, H_next, s.alpha, omega);
        if (prev_resid > 1e-9 * (1.0 + std::abs(H_k)))
          ++trace.descent_violations;

        // Weighted increment sum of the fast-convergence estimate.
        if (omega > 0.0)
          sum_omega_over_theta +=
              detail::ratio_over_theta(omega, ps.theta, ps.log_theta);

        // Gap certificate at k+1.
        const double gp = gap_at(zn);
        const double lhs = gp + 0.5 * mu_f * dist2sq(zn.x, zhat->x) +
                           0.5 * mu_g * dist2sq(zn.y, zhat->y);
        if (!detail::gap_certificate_ok(lhs, theta_next, log_theta_next,
                                        trace.H0))
          ++trace.gap_violations;

        // Telescoped bound H_k/theta_k + sum Omega_i/theta_i <= H_0.
        const double hr =
            detail::ratio_over_theta(H_next, theta_next, log_theta_next);
        if (hr + sum_omega_over_theta >
            trace.H0 * (1.0 + 1e-9) + 1e-9 * (1.0 + std::abs(trace.H0)))
          trace.telescoping_ok = false;

        if (sum_omega_over_theta * 2.0 >
            4.0 * trace.H0 * (1.0 + 1e-9) + 1e-12)
          trace.summability_ok = false;
        H_k = H_next;
      }
      ps.gamma = s.gamma_next;
      ps.beta = s.beta_next;
      ps.theta = theta_next;
      ps.log_theta = log_theta_next;
      ps.k = k + 1;
      s = advance_scalars(cfg.algorithm, p, cfg.chi, ps.gamma, ps.beta);
    }

    z = next;

    if (cfg.gap_tol && zhat) {
      const double gp = gap_at(z);
      if (gp <= *cfg.gap_tol) {
        ++k;
        break;
      }
    }
  }

  if (!trace.aborted) record(k);
  trace.iters = k;
  trace.final_gap = zhat ? gap_at(z) : 0.0;
  trace.weighted_increment_sum = 2.0 * sum_omega_over_theta;
  return trace;
}

}  // namespace pds
