#include "toric/criticalpoints.hpp"

#include "toric/errors.hpp"
#include "toric/parallel.hpp"
#include "toric/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace toric {

namespace {

// Coefficient directions e = (mu1, mu2, 1) in the monomial basis
// 1, mu1, mu2, mu1^2, mu1 mu2, mu2^2.
constexpr int kFirst[3] = {1, 2, 0};
constexpr int kSecond[3][3] = {{3, 4, 1}, {4, 5, 2}, {1, 2, 0}};

Eigen::Vector3d unit(const AffineFn2& f) { return f.coeffs().normalized(); }

double ray_angle(const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
  return 2.0 * std::asin(std::min(1.0, 0.5 * (x.normalized() - y.normalized()).norm()));
}

/// Orthonormal basis of the plane orthogonal to the unit vector x.
Eigen::Matrix<double, 3, 2> tangent_basis(const Eigen::Vector3d& x) {
  Eigen::Index smallest = 0;
  x.cwiseAbs().minCoeff(&smallest);
  const Eigen::Vector3d seed = Eigen::Vector3d::Unit(smallest);
  const Eigen::Vector3d t1 = (seed - seed.dot(x) * x).normalized();
  const Eigen::Vector3d t2 = x.cross(t1);
  Eigen::Matrix<double, 3, 2> T;
  T << t1, t2;
  return T;
}

}  // namespace

double EHJet::normalized_gradient(const AffineFn2& f) const {
  return gradient.norm() * f.coeffs().norm() / std::abs(value);
}

double EHJet::futaki_residual() const { return futaki.cwiseAbs().maxCoeff() / (std::abs(d) * vol); }

EHJet eh_jet(const Polytope2& polytope, double n, const AffineFn2& f, double tol, bool with_hessian) {
  if (!is_positive_on(f, polytope)) throw DomainError("f must be strictly positive on the polytope");
  const double q = (n - 2.0) / n;
  const auto bd2 = boundary_moments(polytope, f, 2.0 - n, tol);
  const auto bd1 = boundary_moments(polytope, f, 1.0 - n, tol);
  const auto in0 = interior_moments(polytope, f, -n, tol);
  const auto in1 = interior_moments(polytope, f, -1.0 - n, tol);

  EHJet jet;
  const double B = bd2(0);
  const double V = in0(0);
  jet.boundary = B;
  jet.vol = V;
  jet.value = 2.0 * B * std::pow(V, -q);
  jet.c = 2.0 * bd1(0) / in1(0);
  jet.d = 2.0 * B / V;
  for (int i = 0; i < 3; ++i) {
    jet.futaki(i) = 2.0 * bd1(i) - jet.c * in1(i);
    jet.boundary_gradient(i) = (2.0 - n) * bd1(kFirst[i]);
    jet.vol_gradient(i) = -n * in1(kFirst[i]);
  }
  const Eigen::Vector3d& Bi = jet.boundary_gradient;
  const Eigen::Vector3d& Vi = jet.vol_gradient;
  const Eigen::Vector3d L = Bi / B - q * Vi / V;
  jet.gradient = jet.value * L;
  if (!with_hessian) return jet;

  const auto bd0 = boundary_moments(polytope, f, -n, tol);
  const auto in2 = interior_moments(polytope, f, -2.0 - n, tol);
  Eigen::Matrix3d Lij;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double Bij = (2.0 - n) * (1.0 - n) * bd0(kSecond[i][j]);
      const double Vij = n * (n + 1.0) * in2(kSecond[i][j]);
      Lij(i, j) = Bij / B - Bi(i) * Bi(j) / (B * B) - q * (Vij / V - Vi(i) * Vi(j) / (V * V));
    }
  }
  jet.hessian = jet.value * (Lij + L * L.transpose());
  jet.has_hessian = true;
  return jet;
}

EHGradient eh_value_and_gradient(const Polytope2& polytope, double n, const AffineFn2& f, double tol) {
  const EHJet jet = eh_jet(polytope, n, f, tol, false);
  return {jet.value, jet.gradient};
}

std::string to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::Minimum: return "minimum";
    case CriticalKind::Saddle: return "saddle";
    case CriticalKind::Maximum: return "maximum";
    case CriticalKind::Degenerate: return "degenerate";
  }
  return "degenerate";
}

std::string to_string(FamilyBranch branch) {
  switch (branch) {
    case FamilyBranch::A: return "a";
    case FamilyBranch::BPlus: return "b_plus";
    case FamilyBranch::BMinus: return "b_minus";
    case FamilyBranch::CPlus: return "c_plus";
    case FamilyBranch::CMinus: return "c_minus";
  }
  return "a";
}

FamilyBranch parse_branch(const std::string& name) {
  for (FamilyBranch b : {FamilyBranch::A, FamilyBranch::BPlus, FamilyBranch::BMinus, FamilyBranch::CPlus,
                         FamilyBranch::CMinus}) {
    if (to_string(b) == name) return b;
  }
  throw DomainError("unknown family branch '" + name + "' (expected a, b_plus, b_minus, c_plus or c_minus)");
}

CriticalRay analyse_ray(const Polytope2& polytope, double n, const AffineFn2& f, double tol) {
  CriticalRay ray;
  const Eigen::Vector3d x = unit(f);
  ray.f = AffineFn2::from_coeffs(x);
  const EHJet jet = eh_jet(polytope, n, ray.f, tol);
  ray.eh = jet.value;
  ray.grad_norm = jet.normalized_gradient(ray.f);
  ray.futaki_residuals = jet.futaki.cwiseAbs();
  ray.futaki_scale = std::abs(jet.d) * jet.vol;
  ray.cd_gap = std::abs(jet.c - jet.d);

  const auto T = tangent_basis(x);
  const Eigen::Matrix2d Ht = T.transpose() * jet.hessian * T;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(0.5 * (Ht + Ht.transpose()));
  ray.tangent_eigenvalues = eig.eigenvalues();
  const double flat = 1e-7 * std::abs(jet.value);
  const double lo = ray.tangent_eigenvalues(0);
  const double hi = ray.tangent_eigenvalues(1);
  if (std::abs(lo) <= flat || std::abs(hi) <= flat) {
    ray.classification = CriticalKind::Degenerate;
  } else if (lo > 0.0) {
    ray.classification = CriticalKind::Minimum;
  } else if (hi < 0.0) {
    ray.classification = CriticalKind::Maximum;
  } else {
    ray.classification = CriticalKind::Saddle;
  }
  return ray;
}

namespace {

constexpr double kBarrier = 1e-8;

struct Trial {
  bool ok = false;
  double residual = 0.0;
};

/// Levenberg-Marquardt on the tangent gradient, from one start. Returns the
/// unit ray on convergence.
std::optional<Eigen::Vector3d> newton_from(const Polytope2& polytope, double n, Eigen::Vector3d x,
                                           const SearchConfig& config) {
  auto residual_at = [&](const Eigen::Vector3d& y) -> Trial {
    const AffineFn2 g = AffineFn2::from_coeffs(y);
    if (!(min_over_vertices(g, polytope) > kBarrier)) return {};
    try {
      const EHJet jet = eh_jet(polytope, n, g, config.quad_tol, false);
      return {true, jet.normalized_gradient(g)};
    } catch (const std::exception&) {
      return {};
    }
  };

  double lambda = -1.0;
  for (int it = 0; it < config.max_iterations; ++it) {
    const AffineFn2 g = AffineFn2::from_coeffs(x);
    EHJet jet;
    try {
      jet = eh_jet(polytope, n, g, config.quad_tol, true);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    const double r = jet.normalized_gradient(g);
    if (r < config.tol) return x;

    const auto T = tangent_basis(x);
    const Eigen::Vector2d gt = T.transpose() * jet.gradient / std::abs(jet.value);
    const Eigen::Matrix2d Ht = T.transpose() * jet.hessian * T / std::abs(jet.value);
    const Eigen::Matrix2d HtHt = Ht * Ht;
    const double scale = std::max(HtHt.norm(), 1e-300);
    if (lambda < 0.0) lambda = 1e-3 * scale;

    bool accepted = false;
    for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
      const Eigen::Matrix2d A = HtHt + lambda * Eigen::Matrix2d::Identity();
      Eigen::Vector2d s = A.ldlt().solve(-Ht * gt);
      if (!s.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const double len = s.norm();
      if (len > 0.5) s *= 0.5 / len;
      const Eigen::Vector3d y = (x + T * s).normalized();
      const Trial t = residual_at(y);
      if (t.ok && t.residual < r) {
        x = y;
        lambda = std::max(lambda * 0.1, 1e-14 * scale);
        accepted = true;
      } else {
        lambda *= 10.0;
      }
      if (lambda > 1e14 * scale) return std::nullopt;
    }
    if (!accepted) return std::nullopt;
  }
  const Trial last = residual_at(x);
  if (last.ok && last.residual < config.tol) return x;
  return std::nullopt;
}

std::vector<Eigen::Vector3d> fibonacci_sphere(int count) {
  std::vector<Eigen::Vector3d> points;
  points.reserve(static_cast<std::size_t>(count));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double t = golden * i;
    points.emplace_back(r * std::cos(t), r * std::sin(t), z);
  }
  return points;
}

/// f = sum_k exp(-h s_k) l_k over the edge functions l_k, s_k in {0, ..., levels-1}
/// with min s_k = 0. The edge functions generate the positivity cone, so these
/// starts reach the thin layers near its faces that a sphere grid misses.
std::vector<Eigen::Vector3d> edge_weight_starts(const Polytope2& polytope, int levels, double depth) {
  std::vector<Eigen::Vector3d> out;
  if (levels < 1) return out;
  const int m = polytope.size();
  std::vector<Eigen::Vector3d> edge;
  for (const Edge& e : polytope.edges()) {
    const Point2 nu = e.inward_normal.cast<double>();
    edge.emplace_back(nu.x(), nu.y(), -nu.dot(polytope.vertex(e.start)));
  }
  const double h = levels > 1 ? depth / (levels - 1) : 0.0;
  std::vector<int> s(static_cast<std::size_t>(m), 0);
  for (;;) {
    if (*std::min_element(s.begin(), s.end()) == 0) {
      Eigen::Vector3d x = Eigen::Vector3d::Zero();
      for (int k = 0; k < m; ++k) x += std::exp(-h * s[static_cast<std::size_t>(k)]) * edge[static_cast<std::size_t>(k)];
      out.push_back(x.normalized());
    }
    int k = 0;
    while (k < m && ++s[static_cast<std::size_t>(k)] == levels) s[static_cast<std::size_t>(k++)] = 0;
    if (k == m) break;
  }
  return out;
}

}  // namespace

std::vector<CriticalRay> find_critical_rays(const Polytope2& polytope, double n, const SearchConfig& config) {
  if (n == 0.0 || n == 1.0 || n == 2.0) throw DomainError("n must not be 0, 1 or 2");
  std::vector<Eigen::Vector3d> starts;
  for (const Eigen::Vector3d& x : fibonacci_sphere(config.starts)) {
    if (min_over_vertices(AffineFn2::from_coeffs(x), polytope) > config.start_margin) starts.push_back(x);
  }
  for (const Eigen::Vector3d& x : edge_weight_starts(polytope, config.edge_levels, config.edge_depth)) {
    starts.push_back(x);
  }

  std::vector<std::optional<Eigen::Vector3d>> found(starts.size());
  parallel_for(starts.size(), config.threads,
               [&](std::size_t i) { found[i] = newton_from(polytope, n, starts[i], config); });

  std::vector<Eigen::Vector3d> unique;
  for (const auto& x : found) {
    if (!x) continue;
    const bool seen = std::any_of(unique.begin(), unique.end(),
                                  [&](const Eigen::Vector3d& y) { return ray_angle(*x, y) < 1e-6; });
    if (!seen) unique.push_back(*x);
  }

  std::vector<CriticalRay> rays;
  for (const Eigen::Vector3d& x : unique) {
    CriticalRay ray = analyse_ray(polytope, n, AffineFn2::from_coeffs(x), config.quad_tol);
    if (ray.futaki_residuals.maxCoeff() > config.futaki_tol * ray.futaki_scale) continue;
    rays.push_back(std::move(ray));
  }
  auto key = [](const CriticalRay& r) {
    const Eigen::Vector3d x = r.f.coeffs();
    return std::pair{std::acos(std::clamp(x(2), -1.0, 1.0)), std::atan2(x(1), x(0))};
  };
  std::sort(rays.begin(), rays.end(), [&](const CriticalRay& l, const CriticalRay& r) { return key(l) < key(r); });
  return rays;
}

double quartic_F(double x) { return (((x - 4.0) * x + 16.0) * x - 16.0) * x + 4.0; }

double quartic_alpha() {
  auto dF = [](double x) { return ((4.0 * x - 12.0) * x + 32.0) * x - 16.0; };
  // F(0) = 4 > 0 > F(1/2) = -7/16 brackets the smaller root in (0, 1).
  double lo = 0.0;
  double hi = 0.5;
  double x = 0.4;
  for (int it = 0; it < 200; ++it) {
    const double fx = quartic_F(x);
    if (fx == 0.0) return x;
    if (fx > 0.0) lo = x; else hi = x;
    double next = x - fx / dF(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16) return next;
    x = next;
    if (hi - lo < 1e-15) break;
  }
  return x;
}

bool family_defined(double p, FamilyBranch branch) {
  switch (branch) {
    case FamilyBranch::A: return p > 0.0 && p < 1.0;
    case FamilyBranch::BPlus:
    case FamilyBranch::BMinus: return p > 8.0 / 9.0 && p < 1.0;
    case FamilyBranch::CPlus:
    case FamilyBranch::CMinus: return p > 0.0 && p < quartic_alpha();
  }
  return false;
}

AffineFn2 closed_form_family(double p, FamilyBranch branch) {
  if (!family_defined(p, branch)) {
    throw DomainError("p = " + std::to_string(p) + " is outside the range of family " + to_string(branch));
  }
  switch (branch) {
    case FamilyBranch::A: {
      const double r = std::sqrt(1.0 - p);
      return {1.0, 0.0, p * (1.0 - r) / (2.0 * r + p - 2.0)};
    }
    case FamilyBranch::BPlus:
    case FamilyBranch::BMinus: {
      const double s = (branch == FamilyBranch::BPlus ? 1.0 : -1.0) * std::sqrt(9.0 * p * p - 8.0 * p);
      return {-1.0, 0.0, p * (3.0 * p + s) / (2.0 * (p + s))};
    }
    case FamilyBranch::CPlus:
    case FamilyBranch::CMinus: {
      const double s = (branch == FamilyBranch::CPlus ? 1.0 : -1.0) * std::sqrt(quartic_F(p));
      return {-p * p + 4.0 * p - 2.0 + s, 2.0 * s, -p * p - 2.0 * p + 2.0 - s};
    }
  }
  throw DomainError("unknown family branch");
}

std::optional<FamilyMatch> match_family(double p, const AffineFn2& f, double max_angle) {
  std::optional<FamilyMatch> best;
  for (FamilyBranch b : {FamilyBranch::A, FamilyBranch::BPlus, FamilyBranch::BMinus, FamilyBranch::CPlus,
                         FamilyBranch::CMinus}) {
    if (!family_defined(p, b)) continue;
    const Eigen::Vector3d w = closed_form_family(p, b).coeffs();
    for (bool flip : {false, true}) {
      const double angle = ray_angle(f.coeffs(), flip ? Eigen::Vector3d(-w) : w);
      if (angle <= max_angle && (!best || angle < best->angle)) best = FamilyMatch{b, flip, angle};
    }
  }
  return best;
}

SliceReport verify_slice_principle(const Polytope2& polytope, double n, const AffineFn2& f, double tol,
                                   double quad_tol) {
  const EHJet jet = eh_jet(polytope, n, f, quad_tol, false);
  if (std::abs(jet.d) < 1e-10) throw UnsupportedError("d_const vanishes; the gamma = 0 slice is not supported");
  const double V = jet.vol;
  const double B = jet.boundary;
  const Eigen::Vector3d grad_vol = jet.vol_gradient;
  // d = 2 B / V
  const Eigen::Vector3d grad_d = 2.0 * (jet.boundary_gradient * V - B * grad_vol) / (V * V);

  SliceReport report;
  report.futaki_residual = jet.futaki_residual();
  report.lambda = grad_vol.dot(grad_d) / grad_d.squaredNorm();
  report.slice_residual = (grad_vol - report.lambda * grad_d).norm() / grad_vol.norm();
  report.cd_gap = std::abs(jet.c - jet.d) / std::abs(jet.d);
  report.futaki_stationary = report.futaki_residual < tol;
  report.slice_stationary = report.slice_residual < tol;
  return report;
}

}  // namespace toric
