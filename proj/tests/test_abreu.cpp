#include "toric/abreu.hpp"
#include "toric/errors.hpp"
#include "toric/verify.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <random>

using namespace toric;

namespace {

Eigen::Matrix2d simplex_H(const Point2& m) {
  Eigen::Matrix2d H;
  H << 2.0 * m.x() * (1.0 - m.x()), -2.0 * m.x() * m.y(), -2.0 * m.x() * m.y(), 2.0 * m.y() * (1.0 - m.y());
  return H;
}

}  // namespace

TEST_CASE("canonical simplex metric") {
  const Polytope2 s = unit_simplex();
  const auto c = canonical_sample<double>(s, Point2(1.0 / 3.0, 1.0 / 3.0));
  Eigen::Matrix2d expected;
  expected << 4.0 / 9.0, -2.0 / 9.0, -2.0 / 9.0, 4.0 / 9.0;
  CHECK((c.H - expected).norm() < 1e-14);
  CHECK(c.s_J == doctest::Approx(12.0).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Point2 m = random_interior_point(rng, s, 0.01);
    const auto x = canonical_sample<double>(s, m);
    CHECK((x.H - simplex_H(m)).norm() < 1e-12);
    CHECK(x.s_J == doctest::Approx(12.0).epsilon(1e-9));
    CHECK((x.G * x.H - Eigen::Matrix2d::Identity()).norm() < 1e-10);
  }
}

TEST_CASE("sample symmetries and positivity on random Delzant polygons") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const Polytope2 P = random_delzant_polygon(rng);
    const auto x = canonical_sample<double>(P, random_interior_point(rng, P, 0.02));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(x.G);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    CHECK((x.G * x.H - Eigen::Matrix2d::Identity()).norm() < 1e-10);
    const double scale = x.H.norm();
    CHECK(std::abs(x.H(0, 1) - x.H(1, 0)) <= 1e-15 * scale);
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(x.dH[a](0, 1) - x.dH[a](1, 0)) <= 1e-13 * (1.0 + x.dH[a].norm()));
      for (int b = 0; b < 2; ++b) CHECK((x.d2H[a][b] - x.d2H[b][a]).norm() <= 1e-12 * (1.0 + x.d2H[a][b].norm()));
    }
  }
}

TEST_CASE("derivatives of H against central differences") {
  std::mt19937_64 rng(23);
  const double h = 1e-4;
  for (int i = 0; i < 40; ++i) {
    const Polytope2 P = random_delzant_polygon(rng);
    const Point2 m = random_interior_point(rng, P, 0.05);
    const auto x = canonical_sample<double>(P, m);
    for (int a = 0; a < 2; ++a) {
      const Point2 e = h * Point2::Unit(a);
      const auto plus = canonical_sample<double>(P, Point2(m + e));
      const auto minus = canonical_sample<double>(P, Point2(m - e));
      const Eigen::Matrix2d dH = (plus.H - minus.H) / (2.0 * h);
      CHECK((dH - x.dH[a]).norm() <= 1e-5 * (1.0 + x.dH[a].norm()));
      const Eigen::Matrix2d d2H = (plus.H - 2.0 * x.H + minus.H) / (h * h);
      CHECK((d2H - x.d2H[a][a]).norm() <= 1e-5 * (1.0 + x.d2H[a][a].norm()));
      for (int b = 0; b < 2; ++b) {
        const Eigen::Matrix2d d2 = (plus.dH[b] - minus.dH[b]) / (2.0 * h);
        CHECK((d2 - x.d2H[b][a]).norm() <= 1e-5 * (1.0 + x.d2H[b][a].norm()));
      }
    }
  }
}

TEST_CASE("boundary points are rejected") {
  CHECK_THROWS_AS(canonical_sample<double>(unit_simplex(), Point2(0.0, 0.3)), DomainError);
  CHECK_THROWS_AS(canonical_sample<double>(unit_simplex(), Point2(0.7, 0.7)), DomainError);
}

TEST_CASE("weighted scalar curvature") {
  const Polytope2 s = unit_simplex();
  for (double n : {3.0, 4.0, 7.0}) CHECK(weighted_scalar_curvature(s, {0.2, 0.3}, {0, 0, 1}, -2.0, n) == doctest::Approx(12.0));

  std::mt19937_64 rng(29);
  for (int i = 0; i < 100; ++i) {
    const Polytope2 P = random_delzant_polygon(rng, true);
    const AffineFn2 f = random_positive_function(rng, P);
    const auto x = canonical_sample<double>(P, random_interior_point(rng, P, 0.02));
    const double n = 3.0 + 3.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double fv = f(x.point);
    const double s_w = weighted_scalar_curvature(x, f, -2.0, n);
    const double div = -std::pow(fv, 1.0 + n) * divergence_form(x, f, 1.0 - n);
    CHECK(std::abs(s_w - div) <= 1e-8 * std::max(1.0, std::abs(s_w)));
    // Same quantity from the conformal-change formula.
    CHECK(std::abs(conformal_scalar_curvature(x, f, -2.0, n) - s_w) <= 1e-8 * std::max(1.0, std::abs(s_w)));
    const double alpha = std::uniform_real_distribution<double>(-4.0, 4.0)(rng);
    const double lhs = divergence_form(x, f, alpha);
    CHECK(std::abs(lhs - divergence_expansion(x, f, alpha)) <= 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("divergence form needs k = -2") {
  const Polytope2 d = delta_p(0.4);
  const AffineFn2 f{0.8, -0.6, 1.0};
  const auto x = canonical_sample<double>(d, Point2(0.2, 0.3));
  CHECK(std::abs(divergence_reduction_residual(x, f, -2.0, 4.0)) < 1e-10);
  CHECK(std::abs(divergence_reduction_residual(x, f, -1.0, 4.0)) > 1e-3);
}

TEST_CASE("integration by parts") {
  const Polytope2 s = unit_simplex();
  const auto affine = integration_by_parts_residual(s, {1, 1, 1}, 4.0, Polynomial2(std::vector<double>{0.3, 1.0, -2.0}));
  CHECK(std::abs(affine.residual) < 1e-4 * affine.scale);
  CHECK(std::abs(affine.rhs_interior) < 1e-12 * affine.scale);

  // phi = mu1^2, f = 1: the interior term is int 2 H_11 = int 4 mu1 (1 - mu1) = 1/3.
  const Polynomial2 sq(std::vector<double>{0, 0, 0, 1, 0, 0});
  for (double n : {3.0, 4.0}) {
    const auto r = integration_by_parts_residual(s, {0, 0, 1}, n, sq);
    CHECK(std::abs(r.residual) < 1e-4 * r.scale);
    CHECK(r.rhs_interior == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  }

  const auto zero = integration_by_parts_residual(s, {1, 1, 1}, 4.0, Polynomial2::constant(0.0));
  CHECK(zero.residual == 0.0);
}
