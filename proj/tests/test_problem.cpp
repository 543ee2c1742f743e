#include <catch2/catch_amalgamated.hpp>

#include "pdsaddle/problem.hpp"

using namespace pds;

namespace {

SaddleProblem scalar_bilinear() {
  // f = g = 0, A = [1]
  SaddleProblem p;
  Matrix a(1, 1);
  a(0, 0) = 1.0;
  p.A = LinearCoupling(std::move(a));
  return p;
}

SaddleProblem quadratic_game_identity(std::size_t n, double mu) {
  SaddleProblem p;
  p.A = LinearCoupling(Matrix::identity(n));
  p.f.smooth.quad_weight = mu;
  p.f.mu = mu;
  p.g.smooth.quad_weight = mu;
  p.g.mu = mu;
  p.known_saddle = SaddlePoint{zeros(n), zeros(n)};
  return p;
}

}  // namespace

TEST_CASE("lagrangian value: frozen examples") {
  const SaddleProblem p = scalar_bilinear();
  CHECK(lagrangian_value(p, {1.0}, {2.0}) == Catch::Approx(2.0));
  CHECK(lagrangian_value(p, {0.0}, {0.0}) == 0.0);

  const SaddleProblem q = quadratic_game_identity(2, 1.0);
  CHECK(lagrangian_value(q, {1.0, 0.0}, {0.0, 1.0}) ==
        Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("gap: frozen examples") {
  const SaddleProblem p = scalar_bilinear();
  const SaddlePoint origin{{0.0}, {0.0}};
  CHECK(gap(p, {0.0}, {0.0}, origin) == 0.0);
  CHECK(gap(p, {1.0}, {1.0}, origin) == Catch::Approx(0.0).margin(1e-15));

  const SaddleProblem q = quadratic_game_identity(2, 1.0);
  const SaddlePoint z{zeros(2), zeros(2)};
  CHECK(gap(q, {1.0, 0.0}, {1.0, 0.0}, z) == Catch::Approx(1.0));
}

TEST_CASE("operator norm estimate") {
  CHECK(operator_norm_estimate(Matrix::identity(3)) ==
        Catch::Approx(1.0).epsilon(1e-5));
  Matrix d(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 4.0;
  CHECK(operator_norm_estimate(d) == Catch::Approx(4.0).epsilon(1e-5));
  Matrix shift(2, 2);
  shift(0, 1) = 1.0;  // nilpotent, singular values {1, 0}
  CHECK(operator_norm_estimate(shift) == Catch::Approx(1.0).epsilon(1e-5));
  Matrix z(3, 2);
  CHECK(operator_norm_estimate(z) == 0.0);

  // safeguarded: estimate never undershoots on random probes
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    Matrix a(4, 5);
    for (auto& e : a.data) e = rng.gaussian();
    const double s = operator_norm_estimate(a);
    for (int probe = 0; probe < 50; ++probe) {
      const Vec x = rng.gaussian_vec(5);
      CHECK(norm2(a.apply(x)) <= s * norm2(x) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("adjoint consistency on random probes") {
  Rng rng(5);
  Matrix a(6, 4);
  for (auto& e : a.data) e = rng.gaussian();
  const LinearCoupling A(a);
  for (int t = 0; t < 100; ++t) {
    const Vec x = rng.gaussian_vec(4);
    const Vec y = rng.gaussian_vec(6);
    const double lhs = dot(A.apply(x), y);
    const double rhs = dot(x, A.adjoint(y));
    CHECK(std::abs(lhs - rhs) <=
          1e-12 * (norm2(x) * norm2(y) * A.norm_bound() + 1e-30));
  }
}

TEST_CASE("full prox composition") {
  ConvexPart f;
  f.smooth.quad_weight = 0.5;
  f.prox = ProxSpec::l1(0.1);
  const auto full = f.full_prox();
  REQUIRE(full.has_value());
  CHECK(full->quad_weight == 0.5);
  CHECK(full->l1_weight == 0.1);

  // lasso-style dual part: quadratic plus linear offset
  ConvexPart g;
  g.smooth.quad_weight = 1.0;
  g.smooth.linear = {1.0, -2.0};
  const auto gp = g.full_prox();
  REQUIRE(gp.has_value());
  CHECK(gp->tag == ProxTag::Quadratic);
  CHECK(gp->linear[1] == -2.0);

  // indicator + quadratic smooth does not fold
  ConvexPart h;
  h.smooth.quad_weight = 1.0;
  h.prox = ProxSpec::simplex();
  CHECK_FALSE(h.full_prox().has_value());
}

TEST_CASE("lagrangian respects indicator domains") {
  SaddleProblem p = scalar_bilinear();
  p.f.prox = ProxSpec::box(0.0, 1.0);
  CHECK(std::isinf(lagrangian_value(p, {2.0}, {0.0})));
  const SaddlePoint z{{0.5}, {0.0}};
  CHECK_THROWS_AS(gap(p, {2.0}, {0.0}, z), std::domain_error);
}
