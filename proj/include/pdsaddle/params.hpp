#pragma once

// Scalar parameter machinery shared by the accelerated solvers: the
// (alpha, gamma, beta, eta, theta) recursions, the closed-form decay bounds
// on theta for each step-size rule, and the two-branch technical sequence
// estimate they rest on.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pdsaddle/linalg.hpp"

namespace pds {

inline constexpr double kModulusEps = 1e-15;  // mu below this counts as zero

struct ParamConfig {
  double mu_f = 0.0;
  double mu_g = 0.0;
  double L_f = 0.0;
  double L_g = 0.0;
  double opnorm = 0.0;  // safeguarded ||A|| estimate
  double gamma0 = 1.0;
  double beta0 = 1.0;
  double chi = 0.0;  // step-size slack in [0,1)
};

struct ParamState {
  double alpha = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double eta = 1.0;
  double theta = 1.0;
  double log_theta = 0.0;  // exact even after theta underflows
  long k = 0;
};

// alpha with ||A||^2 alpha^2 = (1-chi) gamma beta.
inline double step_size_ps(double gamma, double beta, double opnorm,
                           double chi) {
  if (!(gamma > 0.0 && beta > 0.0))
    throw std::invalid_argument("step_size_ps: gamma, beta must be positive");
  if (!(chi >= 0.0 && chi < 1.0))
    throw std::invalid_argument("step_size_ps: chi outside [0,1)");
  if (!(opnorm > 0.0))
    throw std::invalid_argument(
        "step_size_ps: zero coupling norm (unconstrained problem)");
  return std::sqrt((1.0 - chi) * gamma * beta) / opnorm;
}

// alpha with (L_f beta + ||A||^2) alpha^2 = (1-chi)^2 gamma beta.
inline double step_size_pgs(double gamma, double beta, double L_f,
                            double opnorm, double chi) {
  if (!(gamma > 0.0 && beta > 0.0))
    throw std::invalid_argument("step_size_pgs: gamma, beta must be positive");
  if (!(chi >= 0.0 && chi < 1.0))
    throw std::invalid_argument("step_size_pgs: chi outside [0,1)");
  const double denom = L_f * beta + opnorm * opnorm;
  if (!(denom > 0.0))
    throw std::invalid_argument("step_size_pgs: L_f*beta + ||A||^2 is zero");
  return (1.0 - chi) * std::sqrt(gamma * beta / denom);
}

// alpha with (L_f beta + L_g gamma + ||A||^2) alpha^2 = gamma beta.
inline double step_size_sym(double gamma, double beta, double L_f, double L_g,
                            double opnorm) {
  if (!(gamma > 0.0 && beta > 0.0))
    throw std::invalid_argument("step_size_sym: gamma, beta must be positive");
  const double denom = L_f * beta + L_g * gamma + opnorm * opnorm;
  if (!(denom > 0.0))
    throw std::invalid_argument(
        "step_size_sym: L_f*beta + L_g*gamma + ||A||^2 is zero");
  return std::sqrt(gamma * beta / denom);
}

inline std::pair<double, double> advance_gamma_beta(double gamma, double beta,
                                                    double alpha, double mu_f,
                                                    double mu_g) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("advance_gamma_beta: alpha must be positive");
  return {(mu_f * alpha + gamma) / (1.0 + alpha),
          (mu_g * alpha + beta) / (1.0 + alpha)};
}

inline double eta_factor(double alpha_k, double alpha_next) {
  if (!(alpha_k > 0.0 && alpha_next > 0.0))
    throw std::invalid_argument("eta_factor: alphas must be positive");
  return alpha_next * (1.0 + alpha_k) / alpha_k;
}

inline double advance_theta(double theta, double alpha) {
  if (!(theta > 0.0 && theta <= 1.0) && theta != 0.0)
    throw std::invalid_argument("advance_theta: theta outside (0,1]");
  if (!(alpha > 0.0))
    throw std::invalid_argument("advance_theta: alpha must be positive");
  return theta / (1.0 + alpha);
}

// Which rate-theorem hypotheses a configuration satisfies.  Bounds return
// +inf when the matching flag set is not satisfied instead of presenting an
// uncovered number as a guarantee.
struct RateHypotheses {
  bool gamma0_ok = false;   // gamma0 >= mu_f
  bool beta0_ok = false;    // beta0 >= mu_g
  bool product_ok = false;  // gamma0*beta0 <= theorem-specific cap
  bool all() const { return gamma0_ok && beta0_ok && product_ok; }
};

inline RateHypotheses check_hypotheses_ps(const ParamConfig& c) {
  return {c.gamma0 >= c.mu_f, c.beta0 >= c.mu_g,
          c.gamma0 * c.beta0 <= c.opnorm * c.opnorm};
}
inline RateHypotheses check_hypotheses_pgs(const ParamConfig& c) {
  return {c.gamma0 >= c.mu_f, c.beta0 >= c.mu_g,
          c.gamma0 * c.beta0 <= c.L_f * c.beta0 + c.opnorm * c.opnorm};
}
inline RateHypotheses check_hypotheses_sym(const ParamConfig& c) {
  return {c.gamma0 >= c.mu_f, c.beta0 >= c.mu_g,
          c.gamma0 * c.beta0 <=
              c.L_f * c.beta0 + c.L_g * c.gamma0 + c.opnorm * c.opnorm};
}

inline double kappa_primal(const ParamConfig& c) {
  return c.opnorm * c.opnorm / (c.mu_f * c.mu_g);
}

// Decay bound for the splitting step-size rule: the minimum of the
// applicable branches (those whose modulus is positive).
inline double theta_bound_ps(long k, const ParamConfig& c) {
  if (k <= 0) return 1.0;
  if (!check_hypotheses_ps(c).all())
    return std::numeric_limits<double>::infinity();
  const double ahat = c.opnorm / (1.0 - c.chi);
  const double kd = double(k);
  double bound = ahat / (std::sqrt(c.gamma0 * c.beta0) * kd);
  if (c.mu_g > kModulusEps)
    bound = std::min(bound, 64.0 * ahat * ahat / (c.mu_g * c.gamma0 * kd * kd));
  if (c.mu_f > kModulusEps)
    bound = std::min(bound, 64.0 * ahat * ahat / (c.mu_f * c.beta0 * kd * kd));
  if (c.mu_f > kModulusEps && c.mu_g > kModulusEps)
    bound = std::min(
        bound, std::pow(1.0 + (1.0 - c.chi) / std::sqrt(kappa_primal(c)), -kd));
  return bound;
}

// Decay bound for the proximal-gradient rule (one-sided smooth structure).
inline double theta_bound_pgs(long k, const ParamConfig& c) {
  if (k <= 0) return 1.0;
  if (!check_hypotheses_pgs(c).all())
    return std::numeric_limits<double>::infinity();
  const double omc = 1.0 - c.chi;
  const double ahat = c.opnorm / omc;
  const double lfhat = c.L_f / (omc * omc);
  const double kd = double(k);
  double bound = 64.0 * lfhat / (c.gamma0 * kd * kd) +
                 4.0 * ahat / (std::sqrt(c.gamma0 * c.beta0) * kd);
  if (c.mu_f > kModulusEps) {
    const double exp_term =
        c.L_f > 0.0 ? std::exp(-0.25 * kd * std::sqrt(c.mu_f / lfhat)) : 0.0;
    bound = std::min(bound, exp_term + 64.0 * ahat * ahat /
                                           (c.mu_f * c.beta0 * kd * kd));
  }
  if (c.mu_g > kModulusEps)
    bound = std::min(bound, 64.0 * lfhat / (c.gamma0 * kd * kd) +
                                64.0 * ahat * ahat /
                                    (c.mu_g * c.gamma0 * kd * kd));
  if (c.mu_f > kModulusEps && c.mu_g > kModulusEps) {
    const double kappa_f1 = c.L_f / c.mu_f;
    bound = std::min(
        bound,
        std::pow(1.0 + omc / std::sqrt(kappa_primal(c) + kappa_f1), -kd));
  }
  return bound;
}

// Decay bound for the symmetric rule (smooth structure on both sides).
inline double theta_bound_sym(long k, const ParamConfig& c) {
  if (k <= 0) return 1.0;
  if (!check_hypotheses_sym(c).all())
    return std::numeric_limits<double>::infinity();
  const double a = c.opnorm;
  const double kd = double(k);
  double bound = 64.0 * c.L_f / (c.gamma0 * kd * kd) +
                 64.0 * c.L_g / (c.beta0 * kd * kd) +
                 4.0 * a / (std::sqrt(c.gamma0 * c.beta0) * kd);
  if (c.mu_f > kModulusEps) {
    const double exp_term =
        c.L_f > 0.0 ? std::exp(-0.25 * kd * std::sqrt(c.mu_f / c.L_f)) : 0.0;
    bound = std::min(bound,
                     exp_term + 64.0 * (c.L_g * c.mu_f + a * a) /
                                    (c.mu_f * c.beta0 * kd * kd));
  }
  if (c.mu_g > kModulusEps) {
    const double exp_term =
        c.L_g > 0.0 ? std::exp(-0.25 * kd * std::sqrt(c.mu_g / c.L_g)) : 0.0;
    bound = std::min(bound,
                     exp_term + 64.0 * (c.L_f * c.mu_g + a * a) /
                                    (c.mu_g * c.gamma0 * kd * kd));
  }
  if (c.mu_f > kModulusEps && c.mu_g > kModulusEps) {
    const double kappa_f1 = c.L_f / c.mu_f;
    const double kappa_g1 = c.L_g / c.mu_g;
    bound = std::min(
        bound, std::pow(1.0 + 1.0 / std::sqrt(kappa_primal(c) + kappa_f1 +
                                              kappa_g1),
                        -kd));
  }
  return bound;
}

// Bound on a positive sequence obeying
//   theta_{k+1} - theta_k <= -theta_k^nu * theta_{k+1} / sqrt(Q theta_k + R^2)
// with theta_0 = 1 and ratio theta_{k+1}/theta_k >= delta.
inline double technical_bound(long k, double Q, double R, double nu,
                              double delta) {
  if (!(Q > 0.0) || R < 0.0 || nu < 0.5 || !(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("technical_bound: parameter out of range");
  if (k <= 0) return 2.0;
  const double kd = double(k);
  if (nu == 0.5) {
    const double first = std::exp(-delta * kd / (2.0 * std::sqrt(Q)));
    const double second =
        R > 0.0 ? std::pow(4.0 * R / (4.0 * R + delta * kd), 2.0) : 0.0;
    return first + second;
  }
  const double sq = 4.0 * std::sqrt(Q);
  const double first =
      std::pow(sq / (sq + delta * (2.0 * nu - 1.0) * kd), 2.0 / (2.0 * nu - 1.0));
  const double second =
      R > 0.0 ? std::pow(2.0 * R / (2.0 * R + delta * nu * kd), 1.0 / nu) : 0.0;
  return first + second;
}

}  // namespace pds
