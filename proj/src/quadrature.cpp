#include "toric/quadrature.hpp"

#include "toric/errors.hpp"

#include <cmath>
#include <array>
#include <sstream>

namespace toric {

const KronrodRule& kronrod_rule() {
  static const KronrodRule rule = [] {
    // Abscissae and weights on [-1, 1], nonnegative half, from the centre out.
    constexpr std::array<double, 8> x{0.0,
                                      0.207784955007898467600689403773245,
                                      0.405845151377397166906606412076961,
                                      0.586087235467691130294144845693013,
                                      0.741531185599394439863864773280788,
                                      0.864864423359769072789712788640926,
                                      0.949107912342758524526189684047851,
                                      0.991455371120812639206854697526329};
    constexpr std::array<double, 8> wk{0.209482141084727828012999174891714,
                                       0.204432940075298892414161999234649,
                                       0.190350578064785409913256402421014,
                                       0.169004726639267902826583426598550,
                                       0.140653259715525918745189590510238,
                                       0.104790010322250183839876322541518,
                                       0.063092092629978553290700663189204,
                                       0.022935322010529224963732008058970};
    constexpr std::array<double, 8> wg{0.417959183673469387755102040816327,
                                       0.0,
                                       0.381830050505118944950369775488975,
                                       0.0,
                                       0.279705391489276667901467771423780,
                                       0.0,
                                       0.129484966168869693270611432679082,
                                       0.0};
    KronrodRule r{};
    for (int k = -7; k <= 7; ++k) {
      const std::size_t q = static_cast<std::size_t>(k + 7);
      const std::size_t m = static_cast<std::size_t>(std::abs(k));
      r.nodes[q] = 0.5 * (1.0 + (k < 0 ? -x[m] : x[m]));
      r.kronrod[q] = 0.5 * wk[m];
      r.gauss[q] = 0.5 * wg[m];
    }
    return r;
  }();
  return rule;
}

const TriangleRule& triangle_rule() {
  static const TriangleRule rule = [] {
    // mu = (1-s) a + s(1-t) b + s t c, area element 2 A s ds dt.
    const KronrodRule& g = kronrod_rule();
    const Eigen::Index n = static_cast<Eigen::Index>(g.nodes.size());
    TriangleRule r;
    r.barycentric.resize(3, n * n);
    r.kronrod.resize(n * n);
    r.gauss.resize(n * n);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      for (std::size_t j = 0; j < g.nodes.size(); ++j) {
        const double s = g.nodes[i];
        const double t = g.nodes[j];
        const Eigen::Index q = static_cast<Eigen::Index>(i) * n + static_cast<Eigen::Index>(j);
        r.barycentric.col(q) << 1.0 - s, s * (1.0 - t), s * t;
        r.kronrod(q) = 2.0 * s * g.kronrod[i] * g.kronrod[j];
        r.gauss(q) = 2.0 * s * g.gauss[i] * g.gauss[j];
      }
    }
    return r;
  }();
  return rule;
}

std::vector<TriangleCell> fan_triangulation(const ConvexPolygon& polygon) {
  const Point2 c = polygon.centroid();
  const auto& v = polygon.vertices;
  std::vector<TriangleCell> cells;
  cells.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) cells.push_back({c, v[i], v[(i + 1) % v.size()]});
  return cells;
}

Polynomial2::Polynomial2(const std::vector<double>& coeffs) {
  switch (coeffs.size()) {
    case 1: degree_ = 0; break;
    case 3: degree_ = 1; break;
    case 6: degree_ = 2; break;
    default: throw DomainError("polynomial weight needs 1, 3 or 6 coefficients");
  }
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs_(static_cast<Eigen::Index>(i)) = coeffs[i];
}

Point2 Polynomial2::gradient(const Point2& mu) const {
  const Coeffs& k = coeffs_;
  return {k(1) + 2.0 * k(3) * mu.x() + k(4) * mu.y(), k(2) + k(4) * mu.x() + 2.0 * k(5) * mu.y()};
}

Eigen::Matrix2d Polynomial2::hessian() const {
  Eigen::Matrix2d h;
  h << 2.0 * coeffs_(3), coeffs_(4), coeffs_(4), 2.0 * coeffs_(5);
  return h;
}

double Weight::operator()(const Point2& mu) const {
  return std::visit([&mu](const auto& w) { return w(mu); }, kind_);
}

namespace {

using Vec1 = Eigen::Matrix<double, 1, 1>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

void require_positive(const ConvexPolygon& polygon, const AffineFn2& f) {
  for (const auto& v : polygon.vertices) {
    if (!(f(v) > 0.0)) throw DomainError("f must be strictly positive on the polytope");
  }
}

[[noreturn]] void tolerance_failure(const char* what, double value, double error) {
  std::ostringstream os;
  os.precision(6);
  os << what << ": tolerance not reached before the depth limit (estimate " << value << ", error " << error
     << ")";
  throw ToleranceError(os.str(), value, error);
}

QuadResult interior_polynomial(const ConvexPolygon& polygon, const Polynomial2& w, const AffineFn2& f,
                               double alpha, double tol) {
  const PowerFn pw(alpha);
  auto g = [&](const Point2& x) { return Vec1(w(x) * pw(f(x))); };
  const auto out = adaptive_integrate<1>(fan_triangulation(polygon), g, tol, kMaxDepth);
  if (!out.converged) tolerance_failure("interior integral", out.value(0), out.error(0));
  return {out.value(0), out.error(0), out.subdivisions};
}

// Portion of segment [a, b] where L >= 0, as parameter interval [t0, t1].
// Values within eps of zero count as zero.
std::optional<std::pair<double, double>> positive_part(const AffineFn2& L, const Point2& a, const Point2& b,
                                                       double eps) {
  double la = L(a);
  double lb = L(b);
  if (std::abs(la) <= eps) la = 0.0;
  if (std::abs(lb) <= eps) lb = 0.0;
  if (la <= 0.0 && lb <= 0.0) return std::nullopt;
  if (la >= 0.0 && lb >= 0.0) return std::pair{0.0, 1.0};
  const double t = la / (la - lb);
  return la > 0.0 ? std::pair{0.0, t} : std::pair{t, 1.0};
}

}  // namespace

QuadResult integrate_interior(const ConvexPolygon& polygon, const Weight& w, const AffineFn2& f, double alpha,
                              double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  require_positive(polygon, f);
  if (!w.is_spl()) return interior_polynomial(polygon, w.as_polynomial(), f, alpha, tol);
  const SPLFn& s = w.as_spl();
  const auto pieces = split_along(polygon, s.L);
  if (!pieces.first) return {};
  return interior_polynomial(*pieces.first, Polynomial2::affine(s.L), f, alpha, tol);
}

QuadResult integrate_interior(const Polytope2& polytope, const Weight& w, const AffineFn2& f, double alpha,
                              double tol) {
  return integrate_interior(polytope.polygon(), w, f, alpha, tol);
}

QuadResult integrate_boundary(const Polytope2& polytope, const Weight& w, const AffineFn2& f, double alpha,
                              double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  require_positive(polytope.polygon(), f);
  const PowerFn pw(alpha);
  const bool spl = w.is_spl();
  const Polynomial2 poly = spl ? Polynomial2::affine(w.as_spl().L) : w.as_polynomial();
  auto g = [&](const Point2& x) { return Vec1(poly(x) * pw(f(x))); };

  double eps = 0.0;
  if (spl) {
    for (const Point2& v : polytope.vertices()) eps = std::max(eps, std::abs(w.as_spl().L(v)));
    eps *= kGeometryTol;
  }
  std::vector<SegmentCell> cells;
  for (int k = 0; k < polytope.size(); ++k) {
    const Edge& e = polytope.edges()[static_cast<std::size_t>(k)];
    const Point2& a = polytope.vertex(e.start);
    const Point2& b = polytope.vertex(e.end);
    double t0 = 0.0, t1 = 1.0;
    if (spl) {
      const auto part = positive_part(w.as_spl().L, a, b, eps);
      if (!part) continue;
      std::tie(t0, t1) = *part;
      if (t1 - t0 <= 0.0) continue;
    }
    cells.push_back({a + t0 * (b - a), a + t1 * (b - a), (t1 - t0) * polytope.edge_measure(k)});
  }
  if (cells.empty()) return {};
  const auto out = adaptive_integrate<1>(cells, g, tol, kMaxDepth);
  if (!out.converged) tolerance_failure("boundary integral", out.value(0), out.error(0));
  return {out.value(0), out.error(0), out.subdivisions};
}

Vec6 interior_moments(const Polytope2& polytope, const AffineFn2& f, double beta, double tol) {
  require_positive(polytope.polygon(), f);
  const PowerFn pw(beta);
  auto g = [&](const Point2& x) -> Vec6 { return pw(f(x)) * Polynomial2::monomials(x); };
  const auto out = adaptive_integrate<6>(fan_triangulation(polytope.polygon()), g, tol, kMaxDepth);
  if (!out.converged) tolerance_failure("interior moments", out.value(0), out.error.maxCoeff());
  return out.value;
}

Vec6 boundary_moments(const Polytope2& polytope, const AffineFn2& f, double beta, double tol) {
  require_positive(polytope.polygon(), f);
  const PowerFn pw(beta);
  auto g = [&](const Point2& x) -> Vec6 { return pw(f(x)) * Polynomial2::monomials(x); };
  std::vector<SegmentCell> cells;
  for (int k = 0; k < polytope.size(); ++k) {
    const Edge& e = polytope.edges()[static_cast<std::size_t>(k)];
    cells.push_back({polytope.vertex(e.start), polytope.vertex(e.end), polytope.edge_measure(k)});
  }
  const auto out = adaptive_integrate<6>(cells, g, tol, kMaxDepth);
  if (!out.converged) tolerance_failure("boundary moments", out.value(0), out.error.maxCoeff());
  return out.value;
}

FieldIntegral integrate_field(const Polytope2& polytope, const Field& field, double tol, double margin) {
  if (!(margin >= 0.0 && margin < 0.25)) throw DomainError("boundary margin must be in [0, 0.25)");
  auto g = [&field](const Point2& x) {
    const double v = field(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "field is not finite at (" << x.x() << ", " << x.y() << ")";
      throw EvaluationError(os.str());
    }
    return Vec1(v);
  };
  auto shrunk_integral = [&](double h) {
    const ConvexPolygon piece = h > 0.0 ? polytope.polygon().shrunk(h) : polytope.polygon();
    const auto out = adaptive_integrate<1>(fan_triangulation(piece), g, tol, kMaxDepth);
    if (!out.converged) tolerance_failure("field integral", out.value(0), out.error(0));
    return QuadResult{out.value(0), out.error(0), out.subdivisions};
  };

  FieldIntegral result;
  result.margin = margin;
  result.shrunk = shrunk_integral(margin);
  if (margin == 0.0) {
    result.extrapolated = result.shrunk.value;
    return result;
  }
  const double i2 = shrunk_integral(2.0 * margin).value;
  const double i4 = shrunk_integral(4.0 * margin).value;
  result.extrapolated = (8.0 * result.shrunk.value - 6.0 * i2 + i4) / 3.0;
  return result;
}

}  // namespace toric
