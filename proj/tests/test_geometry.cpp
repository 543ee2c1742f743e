#include <catch2/catch_amalgamated.hpp>

#include "pdsaddle/geometry.hpp"

using namespace pds;

namespace {

Vec random_simplex_point(Rng& rng, std::size_t n) {
  Vec v(n);
  double s = 0.0;
  for (auto& vi : v) {
    vi = rng.uniform(0.05, 1.0);
    s += vi;
  }
  for (auto& vi : v) vi /= s;
  return v;
}

// Prox optimality residual, tag-agnostic: v* solves the subproblem iff it is
// a fixed point of a re-prox with the first-order terms moved into the
// linear part.
double prox_fixed_point_residual(const ProxGeometry& geom, const ProxSpec& h,
                                 const Vec& c, double theta, const Vec& vbar) {
  const Vec vstar = geom.bregman_prox(h, c, theta, vbar);
  const Vec g1 = geom.grad_phi(vstar);
  const Vec g0 = geom.grad_phi(vbar);
  Vec c2 = c;
  for (std::size_t i = 0; i < c2.size(); ++i) c2[i] += theta * (g1[i] - g0[i]);
  const Vec again = geom.bregman_prox(h, c2, 1.0, vstar);
  return std::sqrt(dist2sq(again, vstar));
}

}  // namespace

TEST_CASE("bregman divergence: frozen values") {
  const ProxGeometry euclid;
  CHECK(euclid.bregman({3.0}, {1.0}) == Catch::Approx(2.0));
  CHECK(euclid.bregman({3.0, -1.0}, {3.0, -1.0}) == 0.0);

  // entropy KL on the simplex, hand value 0.5 ln 2 + 0.5 ln(2/3)
  const ProxGeometry ent = ProxGeometry::entropy();
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(ent.bregman({0.5, 0.5}, {0.25, 0.75}) ==
        Catch::Approx(expected).epsilon(1e-12));
  CHECK(expected == Catch::Approx(0.143841).margin(1e-6));
  CHECK(ent.bregman({0.5, 0.5}, {0.5, 0.5}) == Catch::Approx(0.0).margin(1e-15));

  CHECK_THROWS_AS(ent.bregman({0.5, 0.5}, {0.0, 1.0}), std::domain_error);
}

TEST_CASE("three-term identity across geometries") {
  Rng rng(7);
  const std::size_t n = 5;
  const auto check_identity = [&](const ProxGeometry& g, auto sample) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec x = sample(), v = sample(), xb = sample();
      const Vec gx = g.grad_phi(x), gv = g.grad_phi(v);
      double lhs = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        lhs += (gx[i] - gv[i]) * (v[i] - xb[i]);
      const double rhs = g.bregman(xb, x) - g.bregman(xb, v) - g.bregman(v, x);
      const double scale = std::abs(g.bregman(xb, x)) +
                           std::abs(g.bregman(xb, v)) +
                           std::abs(g.bregman(v, x)) + 1e-30;
      CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
    }
  };
  check_identity(ProxGeometry::euclidean(),
                 [&] { return rng.gaussian_vec(n); });
  check_identity(ProxGeometry::scaled_euclidean(2.5),
                 [&] { return rng.gaussian_vec(n); });
  check_identity(ProxGeometry::entropy(),
                 [&] { return random_simplex_point(rng, n); });
}

TEST_CASE("strong convexity lower bound") {
  Rng rng(11);
  const std::size_t n = 6;
  const ProxGeometry geoms[] = {ProxGeometry::euclidean(),
                                ProxGeometry::scaled_euclidean(3.0),
                                ProxGeometry::entropy()};
  for (const auto& g : geoms) {
    for (int trial = 0; trial < 200; ++trial) {
      Vec x, v;
      if (g.kind() == GeometryKind::Entropy) {
        x = random_simplex_point(rng, n);
        v = random_simplex_point(rng, n);
      } else {
        x = rng.gaussian_vec(n);
        v = rng.gaussian_vec(n);
      }
      CHECK(g.bregman(x, v) >= 0.5 * dist2sq(x, v) * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("entropy bregman prox: frozen values and shift invariance") {
  // c = 0 keeps vbar
  const Vec vbar{0.3, 0.7};
  Vec out = entropy_bregman_prox({0.0, 0.0}, 2.0, vbar);
  CHECK(out[0] == Catch::Approx(0.3).epsilon(1e-14));
  CHECK(out[1] == Catch::Approx(0.7).epsilon(1e-14));

  // uniform vbar, c = (theta ln 2, 0) -> (1/3, 2/3)
  const double theta = 1.7;
  out = entropy_bregman_prox({theta * std::log(2.0), 0.0}, theta, {0.5, 0.5});
  CHECK(out[0] == Catch::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(out[1] == Catch::Approx(2.0 / 3.0).epsilon(1e-13));

  // theta -> infinity leaves vbar
  out = entropy_bregman_prox({5.0, -5.0}, 1e12, vbar);
  CHECK(std::abs(out[0] - 0.3) <= 1e-9);
  CHECK(std::abs(out[1] - 0.7) <= 1e-9);

  // adding a constant to c leaves the result unchanged (softmax invariance)
  const Vec c{3.0, -1.0, 0.5};
  const Vec vb{0.2, 0.5, 0.3};
  const Vec a = entropy_bregman_prox(c, 0.7, vb);
  Vec cshift = c;
  for (auto& ci : cshift) ci += 123.0;
  const Vec b = entropy_bregman_prox(cshift, 0.7, vb);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(a[i] == Catch::Approx(b[i]).epsilon(1e-12));

  // large |c|/theta must not overflow
  const Vec huge = entropy_bregman_prox({-5000.0, 5000.0}, 1.0, {0.5, 0.5});
  CHECK(huge[0] == Catch::Approx(1.0));
  CHECK(all_finite(huge));
}

TEST_CASE("bregman prox optimality for all registered oracles") {
  Rng rng(23);
  const std::size_t n = 7;
  const ProxGeometry euclid;
  const ProxGeometry scaled = ProxGeometry::scaled_euclidean(2.0);
  const ProxGeometry ent = ProxGeometry::entropy();

  const ProxSpec specs[] = {
      ProxSpec::zero(), ProxSpec::l1(0.7), ProxSpec::box(-0.5, 1.5),
      ProxSpec::quadratic(1.3, Vec(n, 0.25)), ProxSpec::simplex()};

  for (const auto& spec : specs) {
    for (int trial = 0; trial < 50; ++trial) {
      const Vec c = rng.gaussian_vec(n);
      const Vec vbar = rng.gaussian_vec(n);
      const double theta = rng.uniform(0.2, 4.0);
      CHECK(prox_fixed_point_residual(euclid, spec, c, theta, vbar) <= 1e-9);
      CHECK(prox_fixed_point_residual(scaled, spec, c, theta, vbar) <= 1e-9);
    }
  }
  // entropy geometry registers the simplex oracle
  for (int trial = 0; trial < 50; ++trial) {
    const Vec c = rng.gaussian_vec(n);
    const Vec vbar = random_simplex_point(rng, n);
    const double theta = rng.uniform(0.2, 4.0);
    CHECK(prox_fixed_point_residual(ent, ProxSpec::simplex(), c, theta, vbar) <=
          1e-9);
  }
  CHECK_THROWS_AS(ent.bregman_prox(ProxSpec::l1(1.0), zeros(n), 1.0,
                                   random_simplex_point(rng, n)),
                  std::invalid_argument);
}

TEST_CASE("simplex projection") {
  const Vec p = project_simplex({0.4, 0.3, 0.3});
  CHECK(p[0] == Catch::Approx(0.4));
  const Vec q = project_simplex({10.0, -5.0, 0.0});
  CHECK(q[0] == Catch::Approx(1.0));
  CHECK(q[1] == 0.0);
  double s = 0.0;
  for (double qi : project_simplex({0.1, -2.0, 3.7, 0.9})) s += qi;
  CHECK(s == Catch::Approx(1.0).epsilon(1e-12));
}
