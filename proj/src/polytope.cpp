#include "toric/polytope.hpp"

#include "toric/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <sstream>

namespace toric {

namespace {

double cross(const Point2& u, const Point2& v) { return u.x() * v.y() - u.y() * v.x(); }

// Best rational approximation of r in [0,1] with denominator <= max_den.
std::optional<std::pair<int, int>> rationalize(double r, int max_den, double tol) {
  long long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  double x = r;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(x);
    const long long h = static_cast<long long>(a) * h1 + h2;
    const long long k = static_cast<long long>(a) * k1 + k2;
    if (k > max_den) break;
    if (std::abs(r - static_cast<double>(h) / static_cast<double>(k)) <= tol) {
      return std::pair<int, int>{static_cast<int>(h), static_cast<int>(k)};
    }
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    const double frac = x - a;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  return std::nullopt;
}

std::optional<LatticeVector> primitive_direction(const Point2& d) {
  const double ax = std::abs(d.x());
  const double ay = std::abs(d.y());
  const double big = std::max(ax, ay);
  if (big == 0.0) return std::nullopt;
  const auto pq = rationalize(std::min(ax, ay) / big, 1000, 1e-9);
  if (!pq) return std::nullopt;
  const auto [num, den] = *pq;
  LatticeVector v = ax >= ay ? LatticeVector(den, num) : LatticeVector(num, den);
  if (d.x() < 0) v.x() = -v.x();
  if (d.y() < 0) v.y() = -v.y();
  return v;
}

double signed_area(const std::vector<Point2>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s += cross(pts[i], pts[(i + 1) % pts.size()]);
  }
  return 0.5 * s;
}

double extent(const std::vector<Point2>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, (p - pts.front()).lpNorm<Eigen::Infinity>());
  return s;
}

}  // namespace

double ConvexPolygon::area() const { return signed_area(vertices); }

Point2 ConvexPolygon::centroid() const {
  Point2 c = Point2::Zero();
  double a = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Point2& p = vertices[i];
    const Point2& q = vertices[(i + 1) % vertices.size()];
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

ConvexPolygon ConvexPolygon::shrunk(double margin) const {
  const Point2 c = centroid();
  ConvexPolygon out;
  out.vertices.reserve(vertices.size());
  for (const auto& v : vertices) out.vertices.push_back(c + (1.0 - margin) * (v - c));
  return out;
}

Polytope2 Polytope2::from_vertices(std::vector<Point2> points, BoundaryMeasure measure) {
  const std::size_t n = points.size();
  if (n < 3) throw ValidationError("polytope needs at least 3 vertices");
  for (const auto& p : points) {
    if (!p.allFinite()) throw ValidationError("vertex coordinates must be finite");
  }
  const double scale = extent(points);
  if (scale == 0.0) throw ValidationError("all vertices coincide");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((points[i] - points[j]).lpNorm<Eigen::Infinity>() <= kGeometryTol * scale) {
        throw ValidationError("repeated vertex " + std::to_string(j));
      }
    }
  }
  if (signed_area(points) < 0.0) std::reverse(points.begin(), points.end());

  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 u = points[(i + 1) % n] - points[i];
    const Point2 v = points[(i + 2) % n] - points[(i + 1) % n];
    const double c = cross(u, v);
    if (c <= kGeometryTol * scale * scale) {
      throw ValidationError("vertices are not in strictly convex counterclockwise order (at vertex " +
                            std::to_string((i + 1) % n) + ")");
    }
    turning += std::atan2(c, u.dot(v));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    throw ValidationError("vertex sequence winds more than once");
  }

  Polytope2 poly;
  poly.measure_ = measure;
  poly.vertices_ = std::move(points);
  poly.polygon_.vertices = poly.vertices_;
  poly.edges_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const Point2 d = poly.vertices_[j] - poly.vertices_[i];
    const auto dir = primitive_direction(d);
    if (!dir) {
      throw ValidationError("edge " + std::to_string(i) + " has no rational direction");
    }
    Edge e;
    e.start = static_cast<int>(i);
    e.end = static_cast<int>(j);
    e.direction = *dir;
    e.inward_normal = LatticeVector(-dir->y(), dir->x());
    // Use the dominant component so that axis-aligned and diagonal edges of
    // rational polygons come out exact.
    const int k = std::abs(d.x()) >= std::abs(d.y()) ? 0 : 1;
    e.lattice_length = std::abs(d(k)) / std::abs(static_cast<double>((*dir)(k)));
    e.euclidean_length = d.norm();
    poly.edges_.push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Edge& in = poly.edges_[(i + n - 1) % n];
    const Edge& out = poly.edges_[i];
    const int det = in.direction.x() * out.direction.y() - in.direction.y() * out.direction.x();
    if (std::abs(det) != 1) poly.non_delzant_.push_back(static_cast<int>(i));
  }
  return poly;
}

Polytope2 Polytope2::with_measure(BoundaryMeasure m) const {
  Polytope2 copy = *this;
  copy.measure_ = m;
  return copy;
}

double Polytope2::edge_measure(int k) const {
  const Edge& e = edges_[static_cast<std::size_t>(k)];
  return measure_ == BoundaryMeasure::Lattice ? e.lattice_length : e.euclidean_length;
}

double Polytope2::lattice_perimeter() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.lattice_length;
  return s;
}

double Polytope2::interior_margin(const Point2& mu) const {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < size(); ++k) m = std::min(m, edge_function<double>(k, mu));
  return m;
}

Polytope2 delta_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must be in (0,1)");
  return Polytope2::from_vertices({{0.0, 0.0}, {p, 0.0}, {p, 1.0 - p}, {0.0, 1.0}});
}

Polytope2 unit_simplex() { return Polytope2::from_vertices({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}); }

Polytope2 unit_square() {
  return Polytope2::from_vertices({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

double min_over_vertices(const AffineFn2& f, const Polytope2& polytope) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& v : polytope.vertices()) m = std::min(m, f(v));
  return m;
}

double max_over_vertices(const AffineFn2& f, const Polytope2& polytope) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& v : polytope.vertices()) m = std::max(m, f(v));
  return m;
}

bool is_positive_on(const AffineFn2& f, const Polytope2& polytope) {
  return min_over_vertices(f, polytope) > 0.0;
}

std::optional<Segment> crease_segment(const AffineFn2& L, const Polytope2& polytope) {
  const auto& vs = polytope.vertices();
  const std::size_t n = vs.size();
  if (L.a == 0.0 && L.b == 0.0) return std::nullopt;

  std::vector<double> s(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = L(vs[i]);
    scale = std::max(scale, std::abs(s[i]));
  }
  const double eps = kGeometryTol * scale;

  std::vector<Point2> hits;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (std::abs(s[i]) <= eps) hits.push_back(vs[i]);
    if ((s[i] > eps && s[j] < -eps) || (s[i] < -eps && s[j] > eps)) {
      const double t = s[i] / (s[i] - s[j]);
      hits.push_back(vs[i] + t * (vs[j] - vs[i]));
    }
  }
  if (hits.size() < 2) return std::nullopt;

  const Point2 along(-L.b, L.a);
  auto lo = hits.begin();
  auto hi = hits.begin();
  for (auto it = hits.begin(); it != hits.end(); ++it) {
    if (it->dot(along) < lo->dot(along)) lo = it;
    if (it->dot(along) > hi->dot(along)) hi = it;
  }
  Segment seg{*lo, *hi};
  const double diam = extent(vs);
  if (seg.length() <= kGeometryTol * diam) return std::nullopt;
  const Point2 mid = 0.5 * (seg.start + seg.end);
  if (polytope.interior_margin(mid) <= kGeometryTol * diam) return std::nullopt;
  return seg;
}

std::pair<std::optional<ConvexPolygon>, std::optional<ConvexPolygon>> split_along(
    const ConvexPolygon& polygon, const AffineFn2& L) {
  const auto& vs = polygon.vertices;
  const std::size_t n = vs.size();
  std::vector<double> s(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = L(vs[i]);
    scale = std::max(scale, std::abs(s[i]));
  }
  const double eps = kGeometryTol * scale;

  ConvexPolygon pos, neg;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const bool zero = std::abs(s[i]) <= eps;
    if (s[i] > 0.0 || zero) pos.vertices.push_back(vs[i]);
    if (s[i] < 0.0 || zero) neg.vertices.push_back(vs[i]);
    if ((s[i] > eps && s[j] < -eps) || (s[i] < -eps && s[j] > eps)) {
      const double t = s[i] / (s[i] - s[j]);
      const Point2 x = vs[i] + t * (vs[j] - vs[i]);
      pos.vertices.push_back(x);
      neg.vertices.push_back(x);
    }
  }
  const double total = polygon.area();
  auto keep = [total](ConvexPolygon& piece) -> std::optional<ConvexPolygon> {
    if (piece.vertices.size() < 3 || piece.area() <= kGeometryTol * total) return std::nullopt;
    return std::move(piece);
  };
  return {keep(pos), keep(neg)};
}

std::pair<std::optional<ConvexPolygon>, std::optional<ConvexPolygon>> split_along(
    const Polytope2& polytope, const AffineFn2& L) {
  return split_along(polytope.polygon(), L);
}

SPLFn make_spl(const AffineFn2& L, const Polytope2& polytope) { return {L, crease_segment(L, polytope)}; }

Polytope2 unimodular_transform(const Polytope2& polytope, const Eigen::Matrix2i& U, const Point2& t) {
  const int det = U.determinant();
  if (std::abs(det) != 1) throw DomainError("unimodular transform requires |det U| = 1");
  const Eigen::Matrix2d Ud = U.cast<double>();
  std::vector<Point2> image;
  image.reserve(polytope.vertices().size());
  for (const auto& v : polytope.vertices()) image.push_back(Ud * v + t);
  return Polytope2::from_vertices(std::move(image), polytope.measure());
}

AffineFn2 push_forward(const AffineFn2& f, const Eigen::Matrix2i& U, const Point2& t) {
  const Eigen::Matrix2d Uinv = U.cast<double>().inverse();
  const Point2 g = Uinv.transpose() * f.gradient();
  return {g.x(), g.y(), f.c - g.dot(t)};
}

std::string describe(const Polytope2& polytope) {
  std::ostringstream os;
  os.precision(12);
  os << "polygon with " << polytope.size() << " vertices:";
  for (const auto& v : polytope.vertices()) os << " (" << v.x() << ", " << v.y() << ")";
  os << "; lattice perimeter " << polytope.lattice_perimeter() << ", area " << polytope.area();
  if (!polytope.is_delzant()) os << " [not Delzant]";
  return os.str();
}

}  // namespace toric
