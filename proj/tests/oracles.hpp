#pragma once

// Closed-form reference integrals for convex polygons and affine data, written
// independently of the library's adaptive quadrature.
//
// Interior: by the coarea formula, int_P phi f^alpha dA = int t^alpha Psi(t) dt
// with Psi(t) = (int over the chord {f = t} of phi) / |grad f|. Between two
// consecutive vertex values of f the chord endpoints move linearly in t, so
// Psi is a quadratic there and the t-integral has a closed form.
// Boundary: along an edge f and phi are affine in the edge parameter, so the
// integral is int t^alpha (linear in t) dt after substituting t = f.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

using P2 = Eigen::Vector2d;

struct Affine {
  double a = 0.0, b = 0.0, c = 0.0;
  double operator()(const P2& x) const { return a * x.x() + b * x.y() + c; }
};

/// int_{t0}^{t1} t^alpha t^k dt for t0, t1 > 0.
inline double power_integral(double alpha, int k, double t0, double t1) {
  const double e = alpha + k + 1.0;
  const double r = std::log1p((t1 - t0) / t0);
  if (std::abs(e) < 1e-14) return r;
  return std::pow(t0, e) * std::expm1(e * r) / e;
}

inline double cross(const P2& u, const P2& v) { return u.x() * v.y() - u.y() * v.x(); }

inline double area(const std::vector<P2>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * std::abs(s);
}

/// int_P x^i y^j dA for i + j <= 2 by Green's theorem,
/// int x^i y^j dA = oint x^(i+1) y^j / (i+1) dy, with Simpson's rule on each
/// edge (exact: the edge integrand is a cubic). Counterclockwise input.
inline double green_moment(const std::vector<P2>& poly, int i, int j) {
  auto g = [&](const P2& p) { return std::pow(p.x(), i + 1) * std::pow(p.y(), j) / (i + 1); };
  double s = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const P2& p = poly[k];
    const P2& q = poly[(k + 1) % poly.size()];
    const double dy = q.y() - p.y();
    s += dy * (g(p) + 4.0 * g(0.5 * (p + q)) + g(q)) / 6.0;
  }
  return s;
}

/// Part of a convex polygon where L >= 0 (Sutherland-Hodgman against one line).
inline std::vector<P2> clip(const std::vector<P2>& poly, const Affine& L) {
  std::vector<P2> out;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const P2& p = poly[k];
    const P2& q = poly[(k + 1) % poly.size()];
    const double lp = L(p), lq = L(q);
    if (lp >= 0.0) out.push_back(p);
    if ((lp > 0.0 && lq < 0.0) || (lp < 0.0 && lq > 0.0)) out.push_back(p + lp / (lp - lq) * (q - p));
  }
  return out;
}

/// int_P phi f^alpha dA; f > 0 on P, phi affine.
inline double interior(const std::vector<P2>& poly, const Affine& phi, const Affine& f, double alpha) {
  if (poly.size() < 3 || area(poly) == 0.0) return 0.0;
  const double grad = std::hypot(f.a, f.b);
  if (grad == 0.0) {
    const double m0 = green_moment(poly, 0, 0);
    const double mx = green_moment(poly, 1, 0);
    const double my = green_moment(poly, 0, 1);
    return std::pow(f.c, alpha) * (phi.a * mx + phi.b * my + phi.c * m0);
  }
  std::vector<double> levels;
  for (const P2& v : poly) levels.push_back(f(v));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // Integral of phi over the chord {f = t}, t strictly between vertex values.
  auto chord = [&](double t) {
    std::vector<P2> pts;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const P2& p = poly[k];
      const P2& q = poly[(k + 1) % poly.size()];
      const double dp = f(p) - t, dq = f(q) - t;
      if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) pts.push_back(p + dp / (dp - dq) * (q - p));
    }
    if (pts.size() != 2) throw std::logic_error("oracle chord is not a segment");
    return (pts[1] - pts[0]).norm() * phi(0.5 * (pts[0] + pts[1])) / grad;
  };

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const double t0 = levels[k], t1 = levels[k + 1];
    // Psi = c0 + c1 s + c2 s^2 with s = (t - tm)/h, fitted at s = -1/2, 0, 1/2.
    const double tm = 0.5 * (t0 + t1), h = 0.5 * (t1 - t0);
    const double ym = chord(tm - 0.5 * h), y0 = chord(tm), yp = chord(tm + 0.5 * h);
    const double c0 = y0;
    const double c1 = yp - ym;
    const double c2 = 2.0 * (yp - 2.0 * y0 + ym);
    const double q2 = c2 / (h * h);
    const double q1 = c1 / h - 2.0 * c2 * tm / (h * h);
    const double q0 = c0 - c1 * tm / h + c2 * tm * tm / (h * h);
    total += q0 * power_integral(alpha, 0, t0, t1) + q1 * power_integral(alpha, 1, t0, t1) +
             q2 * power_integral(alpha, 2, t0, t1);
  }
  return total;
}

/// int over the segment [p, q] of phi f^alpha, the segment carrying total
/// measure `measure`.
inline double segment(const P2& p, const P2& q, double measure, const Affine& phi, const Affine& f, double alpha) {
  const double f0 = f(p), f1 = f(q);
  const double g0 = phi(p), g1 = phi(q);
  if (std::abs(f1 - f0) <= 1e-15 * std::max(std::abs(f0), std::abs(f1))) {
    return measure * std::pow(0.5 * (f0 + f1), alpha) * 0.5 * (g0 + g1);
  }
  // phi = g0 + (g1 - g0) s, s = (t - f0)/(f1 - f0), ds = dt / (f1 - f0).
  const double slope = (g1 - g0) / (f1 - f0);
  const double lo = std::min(f0, f1), hi = std::max(f0, f1);
  const double v = (g0 - slope * f0) * power_integral(alpha, 0, lo, hi) + slope * power_integral(alpha, 1, lo, hi);
  return measure * v / std::abs(f1 - f0);
}

/// Smallest integer vector parallel to d (|entries| <= 64).
inline Eigen::Vector2i primitive(const P2& d) {
  for (int n = 1; n <= 128; ++n) {
    for (int a = -n; a <= n; ++a) {
      for (int b : {n - std::abs(a), -(n - std::abs(a))}) {
        if (std::gcd(a, b) != 1) continue;
        if (std::abs(cross(d, P2(a, b))) <= 1e-12 * d.norm() * std::hypot(a, b) && d.dot(P2(a, b)) > 0.0) {
          return {a, b};
        }
      }
    }
  }
  throw std::logic_error("edge direction is not rational with small entries");
}

inline double lattice_length(const P2& p, const P2& q) {
  const Eigen::Vector2i v = primitive(q - p);
  return (q - p).norm() / std::hypot(v.x(), v.y());
}

/// Boundary integral of phi f^alpha in the lattice measure.
inline double boundary(const std::vector<P2>& poly, const Affine& phi, const Affine& f, double alpha) {
  double s = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const P2& p = poly[k];
    const P2& q = poly[(k + 1) % poly.size()];
    s += segment(p, q, lattice_length(p, q), phi, f, alpha);
  }
  return s;
}

/// Same with phi = max{L, 0}.
inline double boundary_spl(const std::vector<P2>& poly, const Affine& L, const Affine& f, double alpha) {
  double s = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const P2& p = poly[k];
    const P2& q = poly[(k + 1) % poly.size()];
    const double lp = L(p), lq = L(q);
    if (lp <= 0.0 && lq <= 0.0) continue;
    P2 a = p, b = q;
    if (lp < 0.0) a = p + lp / (lp - lq) * (q - p);
    if (lq < 0.0) b = p + lp / (lp - lq) * (q - p);
    const double full = lattice_length(p, q);
    s += segment(a, b, full * (b - a).norm() / (q - p).norm(), L, f, alpha);
  }
  return s;
}

inline double interior_spl(const std::vector<P2>& poly, const Affine& L, const Affine& f, double alpha) {
  return interior(clip(poly, L), L, f, alpha);
}

/// Donaldson-Futaki invariant of an affine phi for k = -2.
inline double df_affine(const std::vector<P2>& poly, const Affine& phi, const Affine& f, double n) {
  const Affine one{0, 0, 1};
  const double c = 2.0 * boundary(poly, one, f, 1.0 - n) / interior(poly, one, f, -1.0 - n);
  return 2.0 * boundary(poly, phi, f, 1.0 - n) - c * interior(poly, phi, f, -1.0 - n);
}

/// Same for max{L, 0}.
inline double df_spl(const std::vector<P2>& poly, const Affine& L, const Affine& f, double n) {
  const Affine one{0, 0, 1};
  const double c = 2.0 * boundary(poly, one, f, 1.0 - n) / interior(poly, one, f, -1.0 - n);
  return 2.0 * boundary_spl(poly, L, f, 1.0 - n) - c * interior_spl(poly, L, f, -1.0 - n);
}

}  // namespace oracle
