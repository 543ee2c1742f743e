#include <catch2/catch_amalgamated.hpp>

#include "pdsaddle/lyapunov.hpp"

using namespace pds;

namespace {

SaddleProblem scalar_bilinear() {
  SaddleProblem p;
  Matrix a(1, 1);
  a(0, 0) = 1.0;
  p.A = LinearCoupling(std::move(a));
  return p;
}

}  // namespace

TEST_CASE("lyapunov E and H: frozen scalar examples") {
  const SaddleProblem p = scalar_bilinear();
  const SaddlePoint zhat{{0.0}, {0.0}};

  IterateState z{{1.0}, {1.0}, {0.0}, {1.0}};
  CHECK(lyapunov_E(1.0, 1.0, z, zhat, p) == Catch::Approx(1.0));
  CHECK(lyapunov_ED(1.0, 1.0, z, zhat, p) == Catch::Approx(1.0));
  CHECK(lyapunov_H(1.0, 1.0, 1.0, z, zhat, p) ==
        Catch::Approx(0.0).margin(1e-15));
  // alpha = 0 reduces H to E_D
  CHECK(lyapunov_H(0.0, 1.0, 1.0, z, zhat, p) ==
        Catch::Approx(lyapunov_ED(1.0, 1.0, z, zhat, p)));
  // gamma = beta = 0 reduces E to the gap
  CHECK(lyapunov_E(0.0, 0.0, z, zhat, p) ==
        Catch::Approx(gap(p, z.x, z.y, zhat)));

  IterateState at_saddle{{0.0}, {0.0}, {0.0}, {0.0}};
  CHECK(lyapunov_E(2.0, 3.0, at_saddle, zhat, p) == 0.0);

  // v = xhat kills the cross term
  IterateState vx{{1.0}, {0.0}, {0.5}, {2.0}};
  CHECK(lyapunov_H(0.7, 1.0, 1.0, vx, zhat, p) ==
        Catch::Approx(lyapunov_ED(1.0, 1.0, vx, zhat, p)));
}

TEST_CASE("lyapunov ED matches E for euclidean and KL for entropy") {
  const SaddleProblem p = scalar_bilinear();
  const SaddlePoint zhat{{0.0}, {0.0}};
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    IterateState z{{rng.gaussian()}, {rng.gaussian()}, {rng.gaussian()},
                   {rng.gaussian()}};
    const double g = rng.uniform(0.1, 2.0), b = rng.uniform(0.1, 2.0);
    CHECK(lyapunov_ED(g, b, z, zhat, p) ==
          Catch::Approx(lyapunov_E(g, b, z, zhat, p)).epsilon(1e-14));
  }

  // entropy side: gamma * KL(xhat, v) with a zero-gap instance
  SaddleProblem q;
  q.A = LinearCoupling(Matrix(2, 2));  // A = 0: gap vanishes identically
  q.f.prox = ProxSpec::simplex();
  q.f.geometry = ProxGeometry::entropy();
  q.g.prox = ProxSpec::simplex();
  q.g.geometry = ProxGeometry::entropy();
  const SaddlePoint uz{{0.5, 0.5}, {0.5, 0.5}};
  IterateState z2{{0.5, 0.5}, {0.25, 0.75}, {0.5, 0.5}, {0.5, 0.5}};
  const double kl = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(lyapunov_ED(2.0, 0.0, z2, uz, q) ==
        Catch::Approx(2.0 * kl).epsilon(1e-12));
}

TEST_CASE("descent residual and certified gap bound") {
  CHECK(descent_residual(0.0, 0.0, 1.0, 0.0) == 0.0);
  CHECK(descent_residual(1.0, 0.5, 1.0, 0.0) == Catch::Approx(0.0));
  CHECK(descent_residual(1.0, 0.6, 1.0, 0.0) == Catch::Approx(0.2));

  CHECK(gap_from_certificate(1.0, 3.0) == Catch::Approx(6.0));
  CHECK(gap_from_certificate(0.5, 1.0) == Catch::Approx(1.0));
  CHECK(gap_from_certificate(0.25, 0.0) == 0.0);
}

TEST_CASE("cross-term bound under the step-size condition") {
  Rng rng(29);
  Matrix a(3, 4);
  for (auto& e : a.data) e = rng.gaussian();
  const LinearCoupling A(a);
  const double nb = A.norm_bound();
  const ProxGeometry euclid;
  for (int t = 0; t < 1000; ++t) {
    const double gamma = rng.uniform(0.1, 3.0);
    const double beta = rng.uniform(0.1, 3.0);
    const double alpha = std::sqrt(gamma * beta) / nb * rng.uniform(0.0, 1.0);
    const Vec v = rng.gaussian_vec(4), x = rng.gaussian_vec(4);
    const Vec w = rng.gaussian_vec(3), y = rng.gaussian_vec(3);
    const double cross = alpha * std::abs(dot(A.apply(sub(v, x)), sub(w, y)));
    const double rhs =
        gamma * euclid.bregman(x, v) + beta * euclid.bregman(y, w);
    CHECK(cross <= rhs * (1.0 + 1e-12) + 1e-30);
  }
}
