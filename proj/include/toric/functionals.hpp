#pragma once

// Toric k = -2 functionals as polytope integrals. Angle factors (2 pi)^m are
// dropped throughout; the Einstein-Hilbert constant is fixed to 2 so that
// eh = d_const * vol^(2/n) holds exactly.

#include "toric/polytope.hpp"
#include "toric/quadrature.hpp"

#include <Eigen/Core>

namespace toric {

struct FunctionalContext {
  Polytope2 polytope;
  AffineFn2 f;
  double n = 4.0;
  double tol = kDefaultTol;

  /// Throws DomainError if f is not positive on the polytope, n is 0, 1 or 2,
  /// or tol <= 0.
  static FunctionalContext make(Polytope2 polytope, const AffineFn2& f, double n, double tol = kDefaultTol);

  /// Same polytope and n, different potential.
  FunctionalContext with_potential(const AffineFn2& g) const { return make(polytope, g, n, tol); }
};

/// Integral of f^-n.
double vol(const FunctionalContext& ctx);
/// 2 * boundary integral of f^(2-n).
double total_scalar(const FunctionalContext& ctx);
/// 2 * boundary integral of f^(1-n) over interior integral of f^(-1-n).
double c_const(const FunctionalContext& ctx);
double d_const(const FunctionalContext& ctx);

/// Futaki invariant on an affine function, assembled from the moment basis.
double futaki(const FunctionalContext& ctx, const AffineFn2& phi);
/// (Fut(1), Fut(mu1), Fut(mu2)) from one pass over the moments.
Eigen::Vector3d futaki_basis(const FunctionalContext& ctx);

double eh(const FunctionalContext& ctx);

/// Derivative of eh along f + t * direction at t = 0, from the integral forms.
double eh_directional_derivative(const FunctionalContext& ctx, const AffineFn2& direction);

/// Donaldson-Futaki invariant of a piecewise-linear convex weight (affine or sPL).
double df(const FunctionalContext& ctx, const Weight& phi);

/// Repeated DF evaluations at a fixed context; c_const is computed once.
class DFEvaluator {
 public:
  explicit DFEvaluator(FunctionalContext ctx);

  const FunctionalContext& context() const { return ctx_; }
  double c() const { return c_; }
  double operator()(const Weight& phi) const;
  double operator()(const AffineFn2& phi) const { return (*this)(Weight::affine(phi)); }

 private:
  FunctionalContext ctx_;
  double c_;
};

}  // namespace toric
