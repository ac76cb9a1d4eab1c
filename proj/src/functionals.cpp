#include "toric/functionals.hpp"

#include "toric/errors.hpp"

#include <cmath>

namespace toric {

FunctionalContext FunctionalContext::make(Polytope2 polytope, const AffineFn2& f, double n, double tol) {
  if (n == 0.0 || n == 1.0 || n == 2.0) throw DomainError("n must not be 0, 1 or 2");
  if (!std::isfinite(n)) throw DomainError("n must be finite");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!is_positive_on(f, polytope)) throw DomainError("f must be strictly positive on the polytope");
  return FunctionalContext{std::move(polytope), f, n, tol};
}

double vol(const FunctionalContext& ctx) {
  return integrate_interior(ctx.polytope, Weight::one(), ctx.f, -ctx.n, ctx.tol).value;
}

double total_scalar(const FunctionalContext& ctx) {
  return 2.0 * integrate_boundary(ctx.polytope, Weight::one(), ctx.f, 2.0 - ctx.n, ctx.tol).value;
}

double c_const(const FunctionalContext& ctx) {
  const double b = integrate_boundary(ctx.polytope, Weight::one(), ctx.f, 1.0 - ctx.n, ctx.tol).value;
  const double i = integrate_interior(ctx.polytope, Weight::one(), ctx.f, -1.0 - ctx.n, ctx.tol).value;
  return 2.0 * b / i;
}

double d_const(const FunctionalContext& ctx) { return total_scalar(ctx) / vol(ctx); }

double futaki(const FunctionalContext& ctx, const AffineFn2& phi) {
  const Eigen::Vector3d basis = futaki_basis(ctx);
  return phi.c * basis(0) + phi.a * basis(1) + phi.b * basis(2);
}

Eigen::Vector3d futaki_basis(const FunctionalContext& ctx) {
  const auto b = boundary_moments(ctx.polytope, ctx.f, 1.0 - ctx.n, ctx.tol);
  const auto i = interior_moments(ctx.polytope, ctx.f, -1.0 - ctx.n, ctx.tol);
  const double c = 2.0 * b(0) / i(0);
  return 2.0 * b.head<3>() - c * i.head<3>();
}

double eh(const FunctionalContext& ctx) {
  return total_scalar(ctx) / std::pow(vol(ctx), (ctx.n - 2.0) / ctx.n);
}

double eh_directional_derivative(const FunctionalContext& ctx, const AffineFn2& direction) {
  // d/dt [2 B / V^q] with B = int_bd f^(2-n), V = int f^(-n), q = (n-2)/n:
  // (2-n) V^-q [2 int_bd f^(1-n) h - d int f^(-1-n) h], d = 2B/V.
  const double n = ctx.n;
  const double V = vol(ctx);
  const double d = total_scalar(ctx) / V;
  const Weight h = Weight::affine(direction);
  const double bh = integrate_boundary(ctx.polytope, h, ctx.f, 1.0 - n, ctx.tol).value;
  const double ih = integrate_interior(ctx.polytope, h, ctx.f, -1.0 - n, ctx.tol).value;
  return (2.0 - n) * std::pow(V, -(n - 2.0) / n) * (2.0 * bh - d * ih);
}

double df(const FunctionalContext& ctx, const Weight& phi) { return DFEvaluator(ctx)(phi); }

DFEvaluator::DFEvaluator(FunctionalContext ctx) : ctx_(std::move(ctx)), c_(c_const(ctx_)) {}

double DFEvaluator::operator()(const Weight& phi) const {
  const double b = integrate_boundary(ctx_.polytope, phi, ctx_.f, 1.0 - ctx_.n, ctx_.tol).value;
  const double i = integrate_interior(ctx_.polytope, phi, ctx_.f, -1.0 - ctx_.n, ctx_.tol).value;
  return 2.0 * b - c_ * i;
}

}  // namespace toric
