#pragma once

// Problem zoo: seeded generators with analytic or oracle-computed saddle
// points.  Oracles are deliberately independent of the accelerated solvers
// under test (vertex-enumeration LP, dense KKT solve, long conservative
// baseline run).

#include <stdexcept>
#include <string>
#include <vector>

#include "pdsaddle/solvers.hpp"
#include "pdsaddle/spectral.hpp"

namespace pds {

struct ZooSpec {
  std::string generator;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  double mu = 0.0;         // quadratic game modulus / mu_f
  double lambda_reg = 0.0; // l1 weight
};

// f(x) = mu/2 |x|^2, g(y) = mu/2 |y|^2, dense Gaussian coupling; the unique
// saddle point is the origin.
inline SaddleProblem make_quadratic_game(std::size_t n, std::size_t m,
                                         double mu, std::uint64_t seed) {
  if (!(mu > 0.0)) throw std::invalid_argument("quadratic game: mu <= 0");
  Rng rng(seed);
  Matrix a(m, n);
  for (auto& e : a.data) e = rng.gaussian();
  SaddleProblem p;
  p.A = LinearCoupling(std::move(a));
  p.f.smooth.quad_weight = mu;
  p.f.mu = mu;
  p.g.smooth.quad_weight = mu;
  p.g.mu = mu;
  p.known_saddle = SaddlePoint{zeros(n), zeros(m)};
  p.x_start = ones(n);
  p.y_start = ones(m);
  p.name = "quadratic_game";
  return p;
}

// As above but with the coupling rescaled so its exact spectral norm hits a
// target (used to pin the condition number).
inline SaddleProblem make_quadratic_game_scaled(std::size_t n, std::size_t m,
                                                double mu, double target_norm,
                                                std::uint64_t seed) {
  SaddleProblem p = make_quadratic_game(n, m, mu, seed);
  const double cur = spectral_norm_exact(p.A.dense());
  Matrix a = p.A.dense();
  for (auto& e : a.data) e *= target_norm / cur;
  p.A = LinearCoupling(std::move(a));
  return p;
}

namespace detail {

// KKT residual threshold accepted from saddle oracles.
inline constexpr double kOracleResidual = 1e-9;

}  // namespace detail

// min_x 1/2 mu_f |x|^2 + lambda |x|_1 + max_y <Ax, y> - (1/2 |y|^2 + <b, y>).
// The dual part is 1-strongly convex; the saddle comes from a long
// conservative Chambolle-Pock run accepted only under a tight KKT residual.
inline SaddleProblem make_lasso_saddle(std::size_t n, std::size_t m,
                                       double lambda_reg, double mu_f,
                                       std::uint64_t seed,
                                       long oracle_iters = 1000000) {
  if (!(lambda_reg > 0.0)) throw std::invalid_argument("lasso: lambda <= 0");
  if (mu_f < 0.0) throw std::invalid_argument("lasso: mu_f < 0");
  Rng rng(seed);
  Matrix a(m, n);
  for (auto& e : a.data) e = rng.gaussian() / std::sqrt(double(n));
  Vec b = rng.gaussian_vec(m);
  SaddleProblem p;
  p.A = LinearCoupling(std::move(a));
  p.f.smooth.quad_weight = mu_f;
  p.f.mu = mu_f;
  p.f.prox = ProxSpec::l1(lambda_reg);
  p.g.smooth.quad_weight = 1.0;
  p.g.smooth.linear = b;
  p.g.mu = 1.0;
  p.name = "lasso_saddle";

  // Saddle oracle: a long relaxed-CP run at conservative steps, independent
  // of the accelerated methods under test.
  const double step = 0.9 / std::max(p.A.norm_bound(), 1e-12);
  CpState st{zeros(n), scaled(-1.0, b), zeros(n)};
  st.xbar = st.x;
  for (long k = 0; k < oracle_iters; ++k) st = cp_step(p, st, step, step, 1.0);
  SaddlePoint z{st.x, st.y};
  const double res = saddle_residual(p, z);
  if (res > detail::kOracleResidual)
    throw std::runtime_error(
        "lasso saddle oracle rejected: KKT residual " + format_double(res));
  p.known_saddle = std::move(z);
  return p;
}

namespace detail {

// Vertex-enumeration LP oracle for min_{x in simplex} max_i (Ax)_i.
// Returns the optimal value and strategy.  Desk scale only (n, m <= 6).
struct SimplexGameSolution {
  double value = 0.0;
  Vec strategy;
};

inline SimplexGameSolution solve_simplex_game(const Matrix& a) {
  const std::size_t m = a.rows, n = a.cols;
  if (n > 8 || m > 8)
    throw std::invalid_argument("matrix game LP oracle: desk scale only");
  // Feasible set P = {(x, t): sum x = 1, x >= 0, Ax <= t 1}.  A vertex
  // activates n of the m+n inequality constraints; enumerate all subsets.
  const std::size_t total = m + n;  // constraint ids: [0,m) rows, [m,m+n) x_j=0
  SimplexGameSolution best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> comb(n);
  auto try_vertex = [&](const std::vector<std::size_t>& active) {
    Matrix sys(n + 1, n + 1);
    Vec rhs(n + 1, 0.0);
    // sum x = 1
    for (std::size_t j = 0; j < n; ++j) sys(0, j) = 1.0;
    rhs[0] = 1.0;
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t cid = active[r];
      if (cid < m) {
        for (std::size_t j = 0; j < n; ++j) sys(r + 1, j) = a(cid, j);
        sys(r + 1, n) = -1.0;  // (Ax)_i - t = 0
      } else {
        sys(r + 1, cid - m) = 1.0;  // x_j = 0
      }
    }
    Vec sol;
    try {
      sol = solve_dense(sys, rhs);
    } catch (const std::runtime_error&) {
      return;
    }
    const double t = sol[n];
    for (std::size_t j = 0; j < n; ++j)
      if (sol[j] < -1e-9) return;
    Vec ax(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * sol[j];
      if (s > t + 1e-9) return;
    }
    if (t < best.value - 1e-15) {
      best.value = t;
      best.strategy.assign(sol.begin(), sol.begin() + n);
      for (auto& xj : best.strategy) xj = std::max(xj, 0.0);
      double sum = 0.0;
      for (double xj : best.strategy) sum += xj;
      for (auto& xj : best.strategy) xj /= sum;
    }
  };

  // iterate over all n-subsets of [0, total)
  for (std::size_t j = 0; j < n; ++j) comb[j] = j;
  while (true) {
    try_vertex(comb);
    bool advanced = false;
    std::size_t i = n;
    while (i-- > 0) {
      if (comb[i] < total - n + i) {
        ++comb[i];
        for (std::size_t j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return best;
}

}  // namespace detail

// Bilinear game on the probability simplices; payoff entries uniform in
// [-1, 1].  Entropy geometry by default (the non-Euclidean showcase); the
// Euclidean variant projects onto the simplices instead.  Saddle strategies
// and the game value come from the vertex-enumeration LP oracle.
inline SaddleProblem make_matrix_game_from(Matrix a, bool entropy = true) {
  const std::size_t m = a.rows, n = a.cols;
  SaddleProblem p;
  p.A = LinearCoupling(std::move(a));
  p.f.prox = ProxSpec::simplex();
  p.g.prox = ProxSpec::simplex();
  if (entropy) {
    p.f.geometry = ProxGeometry::entropy();
    p.g.geometry = ProxGeometry::entropy();
  }
  p.name = "matrix_game";

  // min player: min_{x} max_i (Ax)_i; max player via the transposed game
  // min_{y} max_j (-A^T y)_j whose value is -value.
  const auto primal = detail::solve_simplex_game(p.A.dense());
  Matrix neg_at = p.A.dense().transpose();
  for (auto& e : neg_at.data) e = -e;
  const auto dual = detail::solve_simplex_game(neg_at);
  SaddlePoint z{primal.strategy, dual.strategy};
  const double res = saddle_residual(p, z);
  if (res > 1e-8)
    throw std::runtime_error("matrix game LP oracle rejected: residual " +
                             format_double(res));
  p.known_saddle = std::move(z);
  p.x_start = Vec(n, 1.0 / double(n));
  p.y_start = Vec(m, 1.0 / double(m));
  return p;
}

inline SaddleProblem make_matrix_game(std::size_t n, std::size_t m,
                                      std::uint64_t seed, bool entropy = true) {
  Rng rng(seed);
  Matrix a(m, n);
  for (auto& e : a.data) e = rng.uniform(-1.0, 1.0);
  return make_matrix_game_from(std::move(a), entropy);
}

// min 1/2 mu_f |x - a|^2  s.t.  Ax = b, via g(y) = <b, y>.  A is resampled
// until well-conditioned full row rank; the saddle solves the KKT system.
inline SaddleProblem make_constrained_qp(std::size_t n, std::size_t m,
                                         double mu_f, std::uint64_t seed) {
  if (!(mu_f > 0.0)) throw std::invalid_argument("constrained qp: mu_f <= 0");
  if (m > n) throw std::invalid_argument("constrained qp: need m <= n");
  Rng rng(seed);
  Matrix a;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= 10)
      throw std::runtime_error(
          "constrained qp: rank failure after 10 resamples");
    a = Matrix(m, n);
    for (auto& e : a.data) e = rng.gaussian();
    const Matrix gram = a.mul(a.transpose());
    const auto eig = eigenvalues_sym(gram);
    if (std::sqrt(std::max(eig.back(), 0.0)) > 1e-3) break;
  }
  Vec center = rng.gaussian_vec(n);
  Vec b = rng.gaussian_vec(m);

  SaddleProblem p;
  p.A = LinearCoupling(std::move(a));
  p.f.smooth.quad_weight = mu_f;
  p.f.smooth.center = center;
  p.f.mu = mu_f;
  p.g.prox = ProxSpec::zero();
  p.g.prox.linear = b;
  p.name = "constrained_qp";

  // KKT: mu_f (x - a) + A^T y = 0, A x = b  =>  (A A^T) y = mu_f (A a - b).
  const Matrix gram = p.A.dense().mul(p.A.dense().transpose());
  Vec rhs = p.A.apply(center);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = mu_f * (rhs[i] - b[i]);
  const Vec yhat = solve_dense(gram, rhs);
  Vec xhat = p.A.adjoint(yhat);
  for (std::size_t j = 0; j < n; ++j) xhat[j] = center[j] - xhat[j] / mu_f;
  SaddlePoint z{std::move(xhat), yhat};
  const double res = saddle_residual(p, z);
  if (res > 1e-8)
    throw std::runtime_error("constrained qp KKT oracle rejected: residual " +
                             format_double(res));
  p.known_saddle = std::move(z);
  return p;
}

inline SaddleProblem make_from_zoo_spec(const ZooSpec& spec) {
  if (spec.generator == "quadratic_game")
    return make_quadratic_game(spec.n, spec.m, spec.mu, spec.seed);
  if (spec.generator == "lasso_saddle")
    return make_lasso_saddle(spec.n, spec.m, spec.lambda_reg, spec.mu,
                             spec.seed);
  if (spec.generator == "matrix_game")
    return make_matrix_game(spec.n, spec.m, spec.seed);
  if (spec.generator == "constrained_qp")
    return make_constrained_qp(spec.n, spec.m, spec.mu, spec.seed);
  throw std::invalid_argument("unknown zoo generator: " + spec.generator);
}

}  // namespace pds
