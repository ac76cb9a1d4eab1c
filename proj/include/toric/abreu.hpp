#pragma once

// Calculus of the canonical symplectic potential u = 1/2 sum_k l_k log l_k on a
// Delzant polygon: Hessian G, inverse H, and closed-form first and second
// derivatives of H.

#include "toric/errors.hpp"
#include "toric/polytope.hpp"
#include "toric/quadrature.hpp"

#include <Eigen/LU>

#include <array>
#include <cmath>
#include <vector>

namespace toric {

template <typename Scalar>
struct CurvatureSample {
  Vec2<Scalar> point;
  Mat2<Scalar> G;                                ///< u_{,ij}
  Mat2<Scalar> H;                                ///< G^{-1}
  std::array<Mat2<Scalar>, 2> dH;                ///< dH[a] = d_a H
  std::array<std::array<Mat2<Scalar>, 2>, 2> d2H;  ///< d2H[a][b] = d_b d_a H
  Scalar s_J{0};                                 ///< -sum_ij H_{ij,ij}

  /// (sum_j H_{ij,j})_i
  Vec2<Scalar> divergence() const {
    Vec2<Scalar> v;
    for (int i = 0; i < 2; ++i) v(i) = dH[0](i, 0) + dH[1](i, 1);
    return v;
  }
  /// sum_ij H_{ij,ij}
  Scalar double_divergence() const {
    Scalar s(0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += d2H[i][j](i, j);
    return s;
  }
};

namespace detail {

/// Value, gradient and Hessian of a scalar function at one point.
template <typename Scalar>
struct Jet2 {
  Scalar v{0};
  Vec2<Scalar> g = Vec2<Scalar>::Zero();
  Mat2<Scalar> h = Mat2<Scalar>::Zero();

  static Jet2 constant(Scalar c) { return {c, Vec2<Scalar>::Zero(), Mat2<Scalar>::Zero()}; }

  Jet2& operator+=(const Jet2& o) {
    v += o.v;
    g += o.g;
    h += o.h;
    return *this;
  }
  Jet2 operator*(Scalar c) const { return {v * c, g * c, h * c}; }
  Jet2 operator*(const Jet2& o) const {
    return {v * o.v, g * o.v + v * o.g, h * o.v + g * o.g.transpose() + o.g * g.transpose() + v * o.h};
  }
  Jet2 operator/(const Jet2& d) const {
    Jet2 q;
    q.v = v / d.v;
    q.g = (g - q.v * d.g) / d.v;
    q.h = (h - q.v * d.h - q.g * d.g.transpose() - d.g * q.g.transpose()) / d.v;
    return q;
  }
};

}  // namespace detail

/// Samples the canonical potential at an interior point. With
/// G = sum_k nu_k nu_k^T / (2 l_k), clearing denominators gives H = 2 N / D,
/// N = sum_k nu_k^perp nu_k^perp^T prod_{m != k} l_m and
/// D = sum_{j<k} (nu_j x nu_k)^2 prod_{m != j,k} l_m. Both are polynomials and
/// D is a sum of nonnegative terms, so H and its derivatives stay accurate up
/// to the boundary, unlike the inverse of G.
template <typename Scalar>
CurvatureSample<Scalar> canonical_sample(const Polytope2& polytope, const Vec2<Scalar>& mu) {
  using J = detail::Jet2<Scalar>;
  const int m = polytope.size();
  std::vector<J> l(static_cast<std::size_t>(m));
  std::vector<Vec2<Scalar>> nu(static_cast<std::size_t>(m));
  CurvatureSample<Scalar> out;
  out.point = mu;
  out.G.setZero();
  for (int k = 0; k < m; ++k) {
    const std::size_t kk = static_cast<std::size_t>(k);
    const Scalar lk = polytope.edge_function<Scalar>(k, mu);
    if (!(lk > Scalar(0))) throw DomainError("point is not in the interior of the polytope");
    nu[kk] = polytope.edges()[kk].inward_normal.template cast<Scalar>();
    l[kk] = J{lk, nu[kk], Mat2<Scalar>::Zero()};
    out.G += nu[kk] * nu[kk].transpose() / (Scalar(2) * lk);
  }

  auto product_except = [&](int a, int b) {
    J p = J::constant(Scalar(1));
    for (int k = 0; k < m; ++k) {
      if (k != a && k != b) p = p * l[static_cast<std::size_t>(k)];
    }
    return p;
  };
  std::array<std::array<J, 2>, 2> N;
  for (auto& row : N) row = {J{}, J{}};
  J D;
  for (int k = 0; k < m; ++k) {
    const Vec2<Scalar>& n = nu[static_cast<std::size_t>(k)];
    const Vec2<Scalar> perp(-n(1), n(0));
    const J p = product_except(k, -1);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) N[a][b] += p * (perp(a) * perp(b));
    for (int j = k + 1; j < m; ++j) {
      const Vec2<Scalar>& n2 = nu[static_cast<std::size_t>(j)];
      const Scalar cross = n(0) * n2(1) - n(1) * n2(0);
      if (cross != Scalar(0)) D += product_except(k, j) * (cross * cross);
    }
  }

  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const J h = (N[a][b] * Scalar(2)) / D;
      out.H(a, b) = h.v;
      for (int c = 0; c < 2; ++c) {
        out.dH[c](a, b) = h.g(c);
        for (int e = 0; e < 2; ++e) out.d2H[c][e](a, b) = h.h(c, e);
      }
    }
  }
  out.s_J = -out.double_divergence();
  return out;
}

/// s_{J,f,k,n} in the expanded form with coefficients k(n-1) and
/// k(n-1)(k(n-2)/4 - 1).
template <typename Scalar>
Scalar weighted_scalar_curvature(const CurvatureSample<Scalar>& s, const AffineFn<Scalar>& f, Scalar k, Scalar n) {
  const Scalar fv = f(s.point);
  const Vec2<Scalar> df = f.gradient();
  const Scalar c1 = k * (n - Scalar(1));
  const Scalar c2 = c1 * (k * (n - Scalar(2)) / Scalar(4) - Scalar(1));
  const Scalar bracket =
      s.double_divergence() + c1 / fv * df.dot(s.divergence()) + c2 / (fv * fv) * df.dot(s.H * df);
  return -std::pow(fv, -k) * bracket;
}

/// sum_ij (f^alpha H_ij)_{,ij} by the product rule, contracting both index
/// orders separately.
template <typename Scalar>
Scalar divergence_form(const CurvatureSample<Scalar>& s, const AffineFn<Scalar>& f, Scalar alpha) {
  const Scalar fv = f(s.point);
  const Vec2<Scalar> df = f.gradient();
  const Scalar p0 = std::pow(fv, alpha);
  const Scalar p1 = alpha * std::pow(fv, alpha - Scalar(1));
  const Scalar p2 = alpha * (alpha - Scalar(1)) * std::pow(fv, alpha - Scalar(2));
  Scalar sum(0);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      sum += p2 * df(i) * df(j) * s.H(i, j);
      sum += p1 * df(i) * s.dH[j](i, j);
      sum += p1 * df(j) * s.dH[i](i, j);
      sum += p0 * s.d2H[i][j](i, j);
    }
  }
  return sum;
}

/// Right-hand side of the expansion
/// f^alpha sum {H_ij,ij + (2 alpha / f) f_i H_ij,j + alpha(alpha-1)/f^2 f_i f_j H_ij}.
template <typename Scalar>
Scalar divergence_expansion(const CurvatureSample<Scalar>& s, const AffineFn<Scalar>& f, Scalar alpha) {
  const Scalar fv = f(s.point);
  const Vec2<Scalar> df = f.gradient();
  return std::pow(fv, alpha) * (s.double_divergence() + Scalar(2) * alpha / fv * df.dot(s.divergence()) +
                                alpha * (alpha - Scalar(1)) / (fv * fv) * df.dot(s.H * df));
}

/// Laplacian -sum {phi_ij H_ij + phi_i H_ij,j} from the derivatives of phi at the sample point.
template <typename Scalar>
Scalar laplacian(const CurvatureSample<Scalar>& s, const Vec2<Scalar>& grad_phi, const Mat2<Scalar>& hess_phi) {
  return -((hess_phi.cwiseProduct(s.H)).sum() + grad_phi.dot(s.divergence()));
}

/// Laplacian of f^beta for affine f in closed form:
/// -beta f^beta sum {(beta - 1) f_i f_j / f^2 H_ij + f_i / f H_ij,j}.
template <typename Scalar>
Scalar laplacian_of_power(const CurvatureSample<Scalar>& s, const AffineFn<Scalar>& f, Scalar beta) {
  const Scalar fv = f(s.point);
  const Vec2<Scalar> df = f.gradient();
  return -beta * std::pow(fv, beta) *
         ((beta - Scalar(1)) / (fv * fv) * df.dot(s.H * df) + df.dot(s.divergence()) / fv);
}

/// s_{J,f,k,n} from the conformal-change form
/// f^-k s_J + 4(n-1)/(n-2) f^{-k(n+2)/4} Lap f^{k(n-2)/4}.
template <typename Scalar>
Scalar conformal_scalar_curvature(const CurvatureSample<Scalar>& s, const AffineFn<Scalar>& f, Scalar k, Scalar n) {
  const Scalar fv = f(s.point);
  const Scalar beta = k * (n - Scalar(2)) / Scalar(4);
  return std::pow(fv, -k) * s.s_J + Scalar(4) * (n - Scalar(1)) / (n - Scalar(2)) *
                                        std::pow(fv, -k * (n + Scalar(2)) / Scalar(4)) *
                                        laplacian_of_power(s, f, beta);
}

/// Residual of the divergence-form reduction
/// s_{J,f,k,n} = -f^{-k-alpha} sum (f^alpha H_ij)_{,ij}, alpha = k(n-1)/2.
/// Vanishes identically exactly when k = -2 (then alpha = 1 - n).
template <typename Scalar>
Scalar divergence_reduction_residual(const CurvatureSample<Scalar>& s, const AffineFn<Scalar>& f, Scalar k,
                                     Scalar n) {
  const Scalar alpha = k * (n - Scalar(1)) / Scalar(2);
  const Scalar fv = f(s.point);
  return weighted_scalar_curvature(s, f, k, n) + std::pow(fv, -k - alpha) * divergence_form(s, f, alpha);
}

/// Convenience for double-precision callers.
double weighted_scalar_curvature(const Polytope2& polytope, const Point2& mu, const AffineFn2& f, double k,
                                 double n);

struct IntegrationByPartsReport {
  double lhs = 0.0;            ///< int phi sum (f^(1-n) H_ij),ij
  double rhs_interior = 0.0;   ///< int f^(1-n) sum H_ij phi_ij
  double rhs_boundary = 0.0;   ///< 2 int_bd f^(1-n) phi
  double residual = 0.0;       ///< lhs - (rhs_interior - rhs_boundary)
  double scale = 0.0;          ///< max of the absolute terms
};

inline constexpr double kAbreuMargin = 1e-3;

/// Assembles both sides of the integration-by-parts identity; interior terms
/// use margin-extrapolated field integrals, the boundary term the exact
/// boundary quadrature.
IntegrationByPartsReport integration_by_parts_residual(const Polytope2& polytope, const AffineFn2& f, double n,
                                                       const Polynomial2& phi, double tol = 1e-9,
                                                       double margin = kAbreuMargin);

}  // namespace toric
