#include "toric/abreu.hpp"

#include <algorithm>

namespace toric {

double weighted_scalar_curvature(const Polytope2& polytope, const Point2& mu, const AffineFn2& f, double k,
                                 double n) {
  if (k == 0.0) throw DomainError("k must be nonzero");
  if (n == 0.0 || n == 1.0 || n == 2.0) throw DomainError("n must not be 0, 1 or 2");
  if (!(f(mu) > 0.0)) throw DomainError("f must be positive at the sample point");
  return weighted_scalar_curvature(canonical_sample<double>(polytope, mu), f, k, n);
}

IntegrationByPartsReport integration_by_parts_residual(const Polytope2& polytope, const AffineFn2& f, double n,
                                                       const Polynomial2& phi, double tol, double margin) {
  if (!is_positive_on(f, polytope)) throw DomainError("f must be strictly positive on the polytope");
  IntegrationByPartsReport r;
  if (phi.coeffs().isZero(0.0)) return r;

  const double alpha = 1.0 - n;
  const Field lhs_field = [&](const Point2& mu) {
    return phi(mu) * divergence_form(canonical_sample<double>(polytope, mu), f, alpha);
  };
  r.lhs = integrate_field(polytope, lhs_field, tol, margin).extrapolated;

  if (phi.degree() == 2) {
    const Eigen::Matrix2d hess = phi.hessian();
    const Field rhs_field = [&](const Point2& mu) {
      const auto s = canonical_sample<double>(polytope, mu);
      return std::pow(f(mu), alpha) * hess.cwiseProduct(s.H).sum();
    };
    r.rhs_interior = integrate_field(polytope, rhs_field, tol, margin).extrapolated;
  }
  r.rhs_boundary = 2.0 * integrate_boundary(polytope, Weight::polynomial(phi), f, alpha, tol).value;
  r.residual = r.lhs - (r.rhs_interior - r.rhs_boundary);
  r.scale = std::max({std::abs(r.lhs), std::abs(r.rhs_interior), std::abs(r.rhs_boundary)});
  return r;
}

}  // namespace toric
