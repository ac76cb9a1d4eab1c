#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace toric {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

using Point2 = Eigen::Vector2d;
using LatticeVector = Eigen::Vector2i;

/// Relative tolerance for collinearity and degeneracy tests.
inline constexpr double kGeometryTol = 1e-12;

/// Affine function a*mu1 + b*mu2 + c. Used both as a Killing potential and as
/// a test direction.
template <typename Scalar>
struct AffineFn {
  Scalar a{0};
  Scalar b{0};
  Scalar c{0};

  static AffineFn constant(Scalar value) { return {Scalar(0), Scalar(0), value}; }
  static AffineFn coordinate(int i) {
    return i == 0 ? AffineFn{Scalar(1), Scalar(0), Scalar(0)} : AffineFn{Scalar(0), Scalar(1), Scalar(0)};
  }
  static AffineFn from_coeffs(const Eigen::Matrix<Scalar, 3, 1>& v) { return {v(0), v(1), v(2)}; }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& mu) const {
    return a * Scalar(mu(0)) + b * Scalar(mu(1)) + c;
  }

  Vec2<Scalar> gradient() const { return {a, b}; }
  Eigen::Matrix<Scalar, 3, 1> coeffs() const { return {a, b, c}; }

  template <typename Other>
  AffineFn<Other> cast() const {
    return {Other(a), Other(b), Other(c)};
  }

  friend AffineFn operator+(const AffineFn& l, const AffineFn& r) { return {l.a + r.a, l.b + r.b, l.c + r.c}; }
  friend AffineFn operator-(const AffineFn& l, const AffineFn& r) { return {l.a - r.a, l.b - r.b, l.c - r.c}; }
  friend AffineFn operator-(const AffineFn& f) { return {-f.a, -f.b, -f.c}; }
  friend AffineFn operator*(Scalar s, const AffineFn& f) { return {s * f.a, s * f.b, s * f.c}; }
};

using AffineFn2 = AffineFn<double>;

struct Segment {
  Point2 start;
  Point2 end;
  double length() const { return (end - start).norm(); }
};

/// Plain convex polygon, counterclockwise, without lattice data. Pieces of a
/// split polytope are of this type.
struct ConvexPolygon {
  std::vector<Point2> vertices;

  double area() const;
  Point2 centroid() const;
  /// Homothety about the centroid with factor (1 - margin).
  ConvexPolygon shrunk(double margin) const;
};

struct Edge {
  int start = 0;
  int end = 0;
  LatticeVector direction;       ///< primitive, along start -> end
  LatticeVector inward_normal;   ///< primitive, rotated +90 degrees from direction
  double lattice_length = 0.0;   ///< Euclidean length / |direction|
  double euclidean_length = 0.0;
};

/// How boundary integrals measure an edge.
enum class BoundaryMeasure { Lattice, Euclidean };

/// Convex lattice polygon in the plane. Vertices are stored counterclockwise;
/// every edge direction is rational. The Delzant condition is recorded, not
/// enforced.
class Polytope2 {
 public:
  /// Validates and builds the polygon. Clockwise input is reversed; repeated
  /// points, non-convex order, collinear triples and irrational edge
  /// directions throw ValidationError.
  static Polytope2 from_vertices(std::vector<Point2> points,
                                 BoundaryMeasure measure = BoundaryMeasure::Lattice);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Point2& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(vertices_.size()); }

  bool is_delzant() const { return non_delzant_.empty(); }
  /// Vertices where the two primitive edge directions fail to span Z^2.
  const std::vector<int>& non_delzant_vertices() const { return non_delzant_; }

  BoundaryMeasure measure() const { return measure_; }
  Polytope2 with_measure(BoundaryMeasure m) const;

  /// Length of edge k in the active boundary measure.
  double edge_measure(int k) const;
  double lattice_perimeter() const;
  double area() const { return polygon_.area(); }
  Point2 centroid() const { return polygon_.centroid(); }
  const ConvexPolygon& polygon() const { return polygon_; }

  /// Lattice-normalized edge function l_k(mu) = <nu_k, mu> - lambda_k; positive inside.
  template <typename Scalar>
  Scalar edge_function(int k, const Vec2<Scalar>& mu) const {
    const Edge& e = edges_[static_cast<std::size_t>(k)];
    const Vec2<Scalar> nu = e.inward_normal.cast<Scalar>();
    return nu.dot(mu - vertex(e.start).cast<Scalar>());
  }

  /// Smallest edge function value; > 0 exactly on the interior.
  double interior_margin(const Point2& mu) const;

 private:
  std::vector<Point2> vertices_;
  std::vector<Edge> edges_;
  std::vector<int> non_delzant_;
  ConvexPolygon polygon_;
  BoundaryMeasure measure_ = BoundaryMeasure::Lattice;
};

/// Convex hull of (0,0), (p,0), (p,1-p), (0,1); moment polygon of the one point
/// blow-up of CP^2. Throws DomainError unless 0 < p < 1.
Polytope2 delta_p(double p);

Polytope2 unit_simplex();
Polytope2 unit_square();

/// Strict positivity: the minimum over the vertices is > 0.
bool is_positive_on(const AffineFn2& f, const Polytope2& polytope);
double min_over_vertices(const AffineFn2& f, const Polytope2& polytope);
double max_over_vertices(const AffineFn2& f, const Polytope2& polytope);

/// Chord {L = 0} of the polygon when it meets the interior with positive length.
std::optional<Segment> crease_segment(const AffineFn2& L, const Polytope2& polytope);

/// {L >= 0} and {L <= 0} pieces; a piece is absent when it is empty or has
/// (relatively) zero area.
std::pair<std::optional<ConvexPolygon>, std::optional<ConvexPolygon>> split_along(
    const ConvexPolygon& polygon, const AffineFn2& L);
std::pair<std::optional<ConvexPolygon>, std::optional<ConvexPolygon>> split_along(
    const Polytope2& polytope, const AffineFn2& L);

/// Simple piecewise-linear convex function max{L, 0}.
struct SPLFn {
  AffineFn2 L;
  std::optional<Segment> crease;

  double operator()(const Point2& mu) const { return std::max(L(mu), 0.0); }
};

SPLFn make_spl(const AffineFn2& L, const Polytope2& polytope);

/// Image U*x + t. Throws DomainError unless |det U| = 1.
Polytope2 unimodular_transform(const Polytope2& polytope, const Eigen::Matrix2i& U, const Point2& t);

/// Pullback f o T^{-1} for T(x) = U x + t, so that (f o T^{-1})(T x) = f(x).
AffineFn2 push_forward(const AffineFn2& f, const Eigen::Matrix2i& U, const Point2& t);

std::string describe(const Polytope2& polytope);

}  // namespace toric
