#pragma once

#include "toric/adaptive.hpp"
#include "toric/polytope.hpp"

#include <Eigen/Core>

#include <functional>
#include <variant>
#include <vector>

namespace toric {

inline constexpr double kDefaultTol = 1e-10;
inline constexpr int kMaxDepth = 30;

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;  ///< absolute
  int subdivisions = 0;
};

/// Polynomial of total degree <= 2 in the monomial basis
/// 1, mu1, mu2, mu1^2, mu1*mu2, mu2^2.
class Polynomial2 {
 public:
  using Coeffs = Eigen::Matrix<double, 6, 1>;

  /// Accepts 1, 3 or 6 coefficients (degree 0, 1 or 2); throws DomainError otherwise.
  explicit Polynomial2(const std::vector<double>& coeffs);
  static Polynomial2 constant(double c) { return Polynomial2(std::vector<double>{c}); }
  static Polynomial2 affine(const AffineFn2& f) { return Polynomial2(std::vector<double>{f.c, f.a, f.b}); }

  double operator()(const Point2& mu) const { return monomials(mu).dot(coeffs_); }
  int degree() const { return degree_; }
  const Coeffs& coeffs() const { return coeffs_; }
  Point2 gradient(const Point2& mu) const;
  Eigen::Matrix2d hessian() const;

  static Coeffs monomials(const Point2& mu) {
    Coeffs m;
    m << 1.0, mu.x(), mu.y(), mu.x() * mu.x(), mu.x() * mu.y(), mu.y() * mu.y();
    return m;
  }

 private:
  Coeffs coeffs_ = Coeffs::Zero();
  int degree_ = 0;
};

/// Integrand weight: a polynomial, or an sPL function max{L, 0}.
class Weight {
 public:
  static Weight one() { return Weight(Polynomial2::constant(1.0)); }
  static Weight polynomial(const Polynomial2& p) { return Weight(p); }
  static Weight affine(const AffineFn2& f) { return Weight(Polynomial2::affine(f)); }
  static Weight spl(const SPLFn& s) { return Weight(s); }

  bool is_spl() const { return std::holds_alternative<SPLFn>(kind_); }
  const Polynomial2& as_polynomial() const { return std::get<Polynomial2>(kind_); }
  const SPLFn& as_spl() const { return std::get<SPLFn>(kind_); }
  double operator()(const Point2& mu) const;

 private:
  explicit Weight(Polynomial2 p) : kind_(std::move(p)) {}
  explicit Weight(SPLFn s) : kind_(std::move(s)) {}
  std::variant<Polynomial2, SPLFn> kind_;
};

/// Integral over the polygon of w * f^alpha d(mu). sPL weights are handled by
/// splitting along the crease first. Throws DomainError if f is not positive
/// on the polygon, ToleranceError if the depth limit is hit first.
QuadResult integrate_interior(const Polytope2& polytope, const Weight& w, const AffineFn2& f, double alpha,
                              double tol = kDefaultTol);

/// Same on an arbitrary convex piece (no positivity pre-check beyond the vertices).
QuadResult integrate_interior(const ConvexPolygon& polygon, const Weight& w, const AffineFn2& f, double alpha,
                              double tol = kDefaultTol);

/// Boundary integral of w * f^alpha d(sigma), edge by edge in the polytope's
/// boundary measure (lattice by default). All edges share one adaptive pass, so tol applies to the total.
QuadResult integrate_boundary(const Polytope2& polytope, const Weight& w, const AffineFn2& f, double alpha,
                              double tol = kDefaultTol);

/// Integrals of f^beta times each monomial 1, mu1, mu2, mu1^2, mu1*mu2, mu2^2.
Eigen::Matrix<double, 6, 1> interior_moments(const Polytope2& polytope, const AffineFn2& f, double beta,
                                             double tol = kDefaultTol);
Eigen::Matrix<double, 6, 1> boundary_moments(const Polytope2& polytope, const AffineFn2& f, double beta,
                                             double tol = kDefaultTol);

using Field = std::function<double(const Point2&)>;

struct FieldIntegral {
  QuadResult shrunk;          ///< integral over the margin-shrunk polygon
  double extrapolated = 0.0;  ///< zero-margin estimate
  double margin = 0.0;
};

/// Integral of a pointwise field over the polygon shrunk toward its centroid by
/// the homothety factor (1 - margin). For margin > 0 the zero-margin value is
/// Richardson-extrapolated from margins {4h, 2h, h}. Throws EvaluationError on
/// a non-finite field value.
FieldIntegral integrate_field(const Polytope2& polytope, const Field& field, double tol = 1e-9,
                              double margin = 0.0);

}  // namespace toric
