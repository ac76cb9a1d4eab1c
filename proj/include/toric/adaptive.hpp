#pragma once

// Globally adaptive cubature over triangles and segments, vector valued.
// Each cell carries an embedded Gauss-Kronrod 7/15 pair (a conical product on
// triangles); the cell error is |K15 - G7|. Cells are refined by bisection.

#include "toric/polytope.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

namespace toric {

/// Kronrod 15-point nodes on [0, 1] with the embedded 7-point Gauss weights
/// (zero at the Kronrod-only nodes).
struct KronrodRule {
  std::array<double, 15> nodes;
  std::array<double, 15> kronrod;
  std::array<double, 15> gauss;
};

const KronrodRule& kronrod_rule();

/// Conical product of the 1-D pair on the reference triangle, barycentric.
struct TriangleRule {
  Eigen::Matrix3Xd barycentric;
  Eigen::VectorXd kronrod;  ///< sum to 1 (multiply by the triangle area)
  Eigen::VectorXd gauss;
};

const TriangleRule& triangle_rule();

/// x^alpha with an integer fast path; x > 0 assumed.
class PowerFn {
 public:
  explicit PowerFn(double alpha) : alpha_(alpha) {
    const double r = std::round(alpha);
    integral_ = r == alpha && std::abs(r) <= 64.0;
    k_ = static_cast<int>(r);
  }

  double operator()(double x) const {
    if (!integral_) return std::pow(x, alpha_);
    unsigned e = static_cast<unsigned>(k_ < 0 ? -k_ : k_);
    double base = x;
    double out = 1.0;
    while (e != 0U) {
      if (e & 1U) out *= base;
      base *= base;
      e >>= 1U;
    }
    return k_ < 0 ? 1.0 / out : out;
  }

  double exponent() const { return alpha_; }

 private:
  double alpha_;
  int k_ = 0;
  bool integral_ = false;
};

template <int K>
struct CellEstimate {
  Eigen::Matrix<double, K, 1> value;
  Eigen::Matrix<double, K, 1> error;
  Eigen::Matrix<double, K, 1> l1;
};

struct TriangleCell {
  Point2 a, b, c;

  double area() const { return 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x()); }

  template <int K, typename Integrand>
  CellEstimate<K> estimate(Integrand& g) const {
    const TriangleRule& rule = triangle_rule();
    const double A = area();
    Eigen::Matrix<double, K, 1> lo = Eigen::Matrix<double, K, 1>::Zero();
    CellEstimate<K> out{Eigen::Matrix<double, K, 1>::Zero(), {}, Eigen::Matrix<double, K, 1>::Zero()};
    for (Eigen::Index q = 0; q < rule.kronrod.size(); ++q) {
      const Point2 x = rule.barycentric(0, q) * a + rule.barycentric(1, q) * b + rule.barycentric(2, q) * c;
      const Eigen::Matrix<double, K, 1> gx = g(x);
      out.value.noalias() += rule.kronrod(q) * gx;
      out.l1.noalias() += rule.kronrod(q) * gx.cwiseAbs();
      if (rule.gauss(q) != 0.0) lo.noalias() += rule.gauss(q) * gx;
    }
    out.value *= A;
    out.l1 *= A;
    out.error = (out.value - A * lo).cwiseAbs();
    return out;
  }

  /// Longest-edge bisection.
  std::array<TriangleCell, 2> split() const {
    const double lab = (b - a).squaredNorm();
    const double lbc = (c - b).squaredNorm();
    const double lca = (a - c).squaredNorm();
    if (lab >= lbc && lab >= lca) {
      const Point2 m = 0.5 * (a + b);
      return {TriangleCell{a, m, c}, TriangleCell{m, b, c}};
    }
    if (lbc >= lca) {
      const Point2 m = 0.5 * (b + c);
      return {TriangleCell{b, m, a}, TriangleCell{m, c, a}};
    }
    const Point2 m = 0.5 * (c + a);
    return {TriangleCell{c, m, b}, TriangleCell{m, a, b}};
  }
};

/// Straight segment with a length in the chosen boundary measure.
struct SegmentCell {
  Point2 a, b;
  double measure;

  template <int K, typename Integrand>
  CellEstimate<K> estimate(Integrand& g) const {
    const KronrodRule& rule = kronrod_rule();
    Eigen::Matrix<double, K, 1> lo = Eigen::Matrix<double, K, 1>::Zero();
    CellEstimate<K> out{Eigen::Matrix<double, K, 1>::Zero(), {}, Eigen::Matrix<double, K, 1>::Zero()};
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const Point2 x = a + rule.nodes[q] * (b - a);
      const Eigen::Matrix<double, K, 1> gx = g(x);
      out.value.noalias() += rule.kronrod[q] * gx;
      out.l1.noalias() += rule.kronrod[q] * gx.cwiseAbs();
      if (rule.gauss[q] != 0.0) lo.noalias() += rule.gauss[q] * gx;
    }
    out.value *= measure;
    out.l1 *= measure;
    out.error = (out.value - measure * lo).cwiseAbs();
    return out;
  }

  std::array<SegmentCell, 2> split() const {
    const Point2 m = 0.5 * (a + b);
    return {SegmentCell{a, m, 0.5 * measure}, SegmentCell{m, b, 0.5 * measure}};
  }
};

template <int K>
struct AdaptiveOutcome {
  Eigen::Matrix<double, K, 1> value;
  Eigen::Matrix<double, K, 1> error;
  Eigen::Matrix<double, K, 1> l1;
  int subdivisions = 0;
  bool converged = false;
};

/// Convergence target for one component: tol * max(|value|, min(1, integral of |g|)).
inline double adaptive_target(double tol, double value, double l1) {
  return tol * std::max(std::abs(value), std::min(1.0, l1));
}

namespace detail {

template <int K>
struct NeumaierSum {
  Eigen::Matrix<double, K, 1> sum = Eigen::Matrix<double, K, 1>::Zero();
  Eigen::Matrix<double, K, 1> comp = Eigen::Matrix<double, K, 1>::Zero();

  void add(const Eigen::Matrix<double, K, 1>& x) {
    for (int j = 0; j < K; ++j) {
      const double t = sum(j) + x(j);
      if (std::abs(sum(j)) >= std::abs(x(j))) {
        comp(j) += (sum(j) - t) + x(j);
      } else {
        comp(j) += (x(j) - t) + sum(j);
      }
      sum(j) = t;
    }
  }
  Eigen::Matrix<double, K, 1> result() const { return sum + comp; }
};

}  // namespace detail

template <int K, typename Cell, typename Integrand>
AdaptiveOutcome<K> adaptive_integrate(const std::vector<Cell>& initial, Integrand&& g, double tol,
                                      int max_depth, std::size_t max_cells = std::size_t{1} << 18) {
  using VecK = Eigen::Matrix<double, K, 1>;
  struct Node {
    Cell cell;
    int depth;
    CellEstimate<K> est;
    bool alive;
  };

  std::vector<Node> nodes;
  nodes.reserve(initial.size() * 8);

  VecK total_value = VecK::Zero();
  VecK total_error = VecK::Zero();
  VecK total_l1 = VecK::Zero();
  auto push = [&](const Cell& cell, int depth) {
    nodes.push_back(Node{cell, depth, cell.template estimate<K>(g), true});
    total_value += nodes.back().est.value;
    total_error += nodes.back().est.error;
    total_l1 += nodes.back().est.l1;
  };
  for (const Cell& cell : initial) push(cell, 0);

  auto targets = [&]() {
    VecK t;
    for (int j = 0; j < K; ++j) t(j) = adaptive_target(tol, total_value(j), total_l1(j));
    return t;
  };
  auto score = [](const VecK& err, const VecK& tgt) {
    double s = 0.0;
    for (int j = 0; j < K; ++j) s = std::max(s, err(j) / std::max(tgt(j), 1e-300));
    return s;
  };
  auto done = [](const VecK& err, const VecK& tgt) {
    for (int j = 0; j < K; ++j)
      if (!(err(j) <= tgt(j))) return false;
    return true;
  };

  // Max-heap on score; ties go to the older cell so the order is deterministic.
  using Entry = std::pair<double, std::size_t>;
  auto cmp = [](const Entry& l, const Entry& r) {
    if (l.first != r.first) return l.first < r.first;
    return l.second > r.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);
  VecK tgt = targets();
  for (std::size_t i = 0; i < nodes.size(); ++i) queue.push({score(nodes[i].est.error, tgt), i});

  AdaptiveOutcome<K> out;
  int iterations = 0;
  while (!done(total_error, tgt)) {
    if (queue.empty() || nodes.size() + 2 > max_cells) break;
    const std::size_t idx = queue.top().second;
    queue.pop();
    if (nodes[idx].depth >= max_depth) continue;

    nodes[idx].alive = false;
    total_value -= nodes[idx].est.value;
    total_error -= nodes[idx].est.error;
    total_l1 -= nodes[idx].est.l1;
    const auto halves = nodes[idx].cell.split();
    const int depth = nodes[idx].depth + 1;
    for (const Cell& half : halves) push(half, depth);
    ++out.subdivisions;

    // Running sums drift; resum now and then.
    if (++iterations % 256 == 0) {
      total_value.setZero();
      total_error.setZero();
      total_l1.setZero();
      for (const Node& n : nodes) {
        if (!n.alive) continue;
        total_value += n.est.value;
        total_error += n.est.error;
        total_l1 += n.est.l1;
      }
    }
    tgt = targets();
    for (std::size_t k = nodes.size() - 2; k < nodes.size(); ++k) queue.push({score(nodes[k].est.error, tgt), k});
  }

  detail::NeumaierSum<K> value_sum, error_sum, l1_sum;
  for (const Node& n : nodes) {
    if (!n.alive) continue;
    value_sum.add(n.est.value);
    error_sum.add(n.est.error);
    l1_sum.add(n.est.l1);
  }
  out.value = value_sum.result();
  out.error = error_sum.result();
  out.l1 = l1_sum.result();
  VecK final_tgt;
  for (int j = 0; j < K; ++j) final_tgt(j) = adaptive_target(tol, out.value(j), out.l1(j));
  out.converged = done(out.error, final_tgt);
  return out;
}

/// Fan triangulation of a convex polygon from its centroid.
std::vector<TriangleCell> fan_triangulation(const ConvexPolygon& polygon);

}  // namespace toric
