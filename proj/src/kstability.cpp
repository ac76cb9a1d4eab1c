#include "toric/kstability.hpp"

#include "toric/errors.hpp"
#include "toric/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace toric {

EdgeChart edge_chart(const Polytope2& polytope, int edge) {
  const Edge& e = polytope.edges().at(static_cast<std::size_t>(edge));
  const Point2& a = polytope.vertex(e.start);
  const Point2& b = polytope.vertex(e.end);
  const bool a_first = a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  EdgeChart chart;
  chart.edge = edge;
  chart.origin = a_first ? a : b;
  const Point2 dir = e.direction.cast<double>();
  chart.step = a_first ? dir : Point2(-dir);
  chart.length = e.lattice_length;
  return chart;
}

AffineFn2 CreaseCase::crease_function(double e, double f) const {
  const Point2 pu = u(e);
  Point2 d = v(f) - pu;
  const double scale = std::max(u_edge.step.norm() * e_max(), v_edge.step.norm() * f_max());
  if (d.norm() <= kGeometryTol * scale) {
    constexpr double kNudge = 1e-6;
    const double e2 = e + (e < 0.5 * e_max() ? kNudge : -kNudge) * e_max();
    const double f2 = f + (f < 0.5 * f_max() ? kNudge : -kNudge) * f_max();
    d = v(f2) - u(e2);
  }
  const Point2 normal = Point2(d.y(), -d.x()).normalized();
  return {normal.x(), normal.y(), -normal.dot(pu)};
}

std::vector<CreaseCase> enumerate_crease_cases(const Polytope2& polytope) {
  std::vector<CreaseCase> cases;
  const int m = polytope.size();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      CreaseCase c;
      c.id = static_cast<int>(cases.size()) + 1;
      c.u_edge = edge_chart(polytope, j);
      c.v_edge = edge_chart(polytope, i);
      cases.push_back(c);
    }
  }
  return cases;
}

ScanMinimum table_minimum(const std::vector<ScanNode>& nodes, bool skip_degenerate) {
  ScanMinimum best;
  for (const ScanNode& node : nodes) {
    if (!node.valid || (skip_degenerate && node.degenerate)) continue;
    const std::array<double, 2> values{node.df_pos, node.df_neg};
    for (int o = 0; o < 2; ++o) {
      if (!best.found || values[static_cast<std::size_t>(o)] < best.value) {
        best = {true, values[static_cast<std::size_t>(o)], node.e, node.f, o};
      }
    }
  }
  return best;
}

namespace {

double affine_futaki(const Eigen::Vector3d& basis, const AffineFn2& L) {
  return L.c * basis(0) + L.a * basis(1) + L.b * basis(2);
}

double grid_point(int i, int grid, double length) {
  return grid == 1 ? 0.0 : length * static_cast<double>(i) / static_cast<double>(grid - 1);
}

struct NodeContext {
  const DFEvaluator& df;
  const CreaseCase& crease_case;
  Eigen::Vector3d futaki;
  double quad_tol;
};

/// Creases whose smaller side carries less boundary mass than this fraction of
/// the perimeter are skipped during refinement: their DF is resolved only to
/// about eps / width relative accuracy, and the adaptive rules cannot reach
/// tolerance there.
constexpr double kSliverMass = 1e-6;

ScanNode evaluate_node(const NodeContext& ctx, double e, double f, bool skip_slivers = false) {
  const Polytope2& polytope = ctx.df.context().polytope;
  ScanNode node;
  node.e = e;
  node.f = f;
  try {
    const AffineFn2 L = ctx.crease_case.crease_function(e, f);
    const auto crease = crease_segment(L, polytope);
    const AffineFn2 one = AffineFn2::constant(1.0);
    if (!crease) {
      // max{L,0} is L or 0 on the whole polygon.
      node.degenerate = true;
      node.note = "degenerate";
      const double hi = max_over_vertices(L, polytope);
      const double lo = min_over_vertices(L, polytope);
      const bool nonnegative = std::abs(hi) >= std::abs(lo);
      const AffineFn2 kept = nonnegative ? L : -L;
      const double fut = affine_futaki(ctx.futaki, kept);
      const double mass = integrate_boundary(polytope, Weight::affine(kept), one, 0.0, ctx.quad_tol).value;
      node.df_pos = nonnegative ? fut : 0.0;
      node.df_neg = nonnegative ? 0.0 : fut;
      node.mass_pos = nonnegative ? mass : 0.0;
      node.mass_neg = nonnegative ? 0.0 : mass;
      return node;
    }
    const SPLFn pos{L, crease};
    const SPLFn neg{-L, crease};
    node.mass_pos = integrate_boundary(polytope, Weight::spl(pos), one, 0.0, ctx.quad_tol).value;
    node.mass_neg = integrate_boundary(polytope, Weight::spl(neg), one, 0.0, ctx.quad_tol).value;
    if (skip_slivers && std::min(node.mass_pos, node.mass_neg) < kSliverMass * polytope.lattice_perimeter()) {
      node.valid = false;
      node.note = "sliver";
      return node;
    }
    node.df_pos = ctx.df(Weight::spl(pos));
    node.df_neg = ctx.df(Weight::spl(neg));
  } catch (const std::exception& ex) {
    node.valid = false;
    node.note = ex.what();
  }
  return node;
}

/// Orientation with the smaller boundary mass.
int small_side(const ScanNode& node) { return node.mass_pos <= node.mass_neg ? 0 : 1; }

/// DF / boundary mass of the orientation with the smaller boundary mass. That
/// side is integrated relative to its own size, so the ratio stays well
/// conditioned as the crease approaches the boundary; the other side differs
/// from it by Fut(L), which is checked separately.
double normalized_df(const ScanNode& node) {
  const int o = small_side(node);
  const double mass = o == 0 ? node.mass_pos : node.mass_neg;
  if (!node.valid || node.degenerate || !(mass > 0.0)) return std::numeric_limits<double>::infinity();
  return (o == 0 ? node.df_pos : node.df_neg) / mass;
}

/// Nelder-Mead in the box [0, e_max] x [0, f_max]; trial points are clamped.
RefinedMinimum refine(const NodeContext& ctx, double e0, double f0, int grid, int max_iter) {
  const CreaseCase& cc = ctx.crease_case;
  RefinedMinimum out;
  out.case_id = cc.id;
  auto clamp = [&](Eigen::Vector2d x) {
    x(0) = std::clamp(x(0), 0.0, cc.e_max());
    x(1) = std::clamp(x(1), 0.0, cc.f_max());
    return x;
  };
  auto objective = [&](const Eigen::Vector2d& x) {
    ++out.evaluations;
    return normalized_df(evaluate_node(ctx, x(0), x(1), true));
  };

  const double he = cc.e_max() / std::max(grid - 1, 1);
  const double hf = cc.f_max() / std::max(grid - 1, 1);
  std::array<Eigen::Vector2d, 3> simplex{Eigen::Vector2d(e0, f0),
                                         clamp({e0 + (e0 < 0.5 * cc.e_max() ? he : -he), f0}),
                                         clamp({e0, f0 + (f0 < 0.5 * cc.f_max() ? hf : -hf)})};
  std::array<double, 3> values{};
  for (std::size_t k = 0; k < 3; ++k) values[k] = objective(simplex[k]);

  for (int it = 0; it < max_iter; ++it) {
    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b] || (values[a] == values[b] && a < b);
    });
    const std::size_t best = order[0], mid = order[1], worst = order[2];
    const double size = std::max((simplex[mid] - simplex[best]).cwiseAbs().maxCoeff(),
                                 (simplex[worst] - simplex[best]).cwiseAbs().maxCoeff());
    if (size < 1e-9 * std::max(cc.e_max(), cc.f_max())) break;
    if (std::isfinite(values[worst]) && values[worst] - values[best] <= 1e-13 * std::abs(values[best])) break;

    const Eigen::Vector2d centroid = 0.5 * (simplex[best] + simplex[mid]);
    const Eigen::Vector2d xr = clamp(centroid + (centroid - simplex[worst]));
    const double fr = objective(xr);
    if (fr < values[best]) {
      const Eigen::Vector2d xe = clamp(centroid + 2.0 * (centroid - simplex[worst]));
      const double fe = objective(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[mid]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::Vector2d xc =
        outside ? clamp(centroid + 0.5 * (xr - centroid)) : clamp(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = objective(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    for (std::size_t k : {mid, worst}) {
      simplex[k] = simplex[best] + 0.5 * (simplex[k] - simplex[best]);
      values[k] = objective(simplex[k]);
    }
  }
  const std::size_t best =
      static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  out.e = simplex[best](0);
  out.f = simplex[best](1);
  out.normalized = values[best];
  const ScanNode node = evaluate_node(ctx, out.e, out.f, true);
  out.orientation = small_side(node);
  out.df = out.orientation == 0 ? node.df_pos : node.df_neg;
  return out;
}

}  // namespace

ScanTable df_scan(const DFEvaluator& df, const CreaseCase& crease_case, const ScanOptions& options) {
  if (options.grid < 2) throw DomainError("grid must be at least 2");
  ScanTable table;
  table.crease_case = crease_case;
  table.grid = options.grid;
  table.quad_tol = options.quad_tol;
  const NodeContext ctx{df, crease_case, futaki_basis(df.context()), options.quad_tol};
  const int g = options.grid;
  table.nodes.resize(static_cast<std::size_t>(g) * static_cast<std::size_t>(g));
  parallel_for(table.nodes.size(), options.threads, [&](std::size_t k) {
    const int ie = static_cast<int>(k) / g;
    const int jf = static_cast<int>(k) % g;
    table.nodes[k] = evaluate_node(ctx, grid_point(ie, g, crease_case.e_max()), grid_point(jf, g, crease_case.f_max()));
  });
  table.minimum = table_minimum(table.nodes, false);
  table.minimum_nondegenerate = table_minimum(table.nodes, true);
  return table;
}

std::vector<ScanTable> df_scan_all(const DFEvaluator& df, const ScanOptions& options) {
  std::vector<ScanTable> tables;
  for (const CreaseCase& c : enumerate_crease_cases(df.context().polytope)) tables.push_back(df_scan(df, c, options));
  return tables;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Unstable: return "UNSTABLE";
    case Verdict::PolystableEvidence: return "POLYSTABLE-EVIDENCE";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

StabilityReport stability_verdict(const DFEvaluator& df, const VerdictOptions& options) {
  StabilityReport report;
  report.tables = df_scan_all(df, options.scan);

  double df_scale = 0.0;
  double nu_scale = 0.0;
  int invalid = 0;
  for (const ScanTable& t : report.tables) {
    for (const ScanNode& node : t.nodes) {
      if (!node.valid) {
        ++invalid;
        continue;
      }
      df_scale = std::max({df_scale, std::abs(node.df_pos), std::abs(node.df_neg)});
      const double nu = normalized_df(node);
      if (std::isfinite(nu)) nu_scale = std::max(nu_scale, std::abs(nu));
    }
  }
  report.df_scale = df_scale;
  report.tol = options.relative_tol * (df_scale > 0.0 ? df_scale : 1.0);
  report.normalized_tol = options.relative_tol * (nu_scale > 0.0 ? nu_scale : 1.0);

  // Most negative raw value anywhere, degenerate nodes included: an affine
  // direction with Fut != 0 is already destabilizing.
  for (const ScanTable& t : report.tables) {
    const ScanMinimum m = t.minimum;
    if (m.found && m.value < -report.tol && (!report.witness || m.value < report.witness->value)) {
      report.witness = m;
      report.witness_case = t.case_id();
    }
    const ScanMinimum nd = t.minimum_nondegenerate;
    if (nd.found && (!report.minimum.found || nd.value < report.minimum.value)) {
      report.minimum = nd;
      report.minimum_case = t.case_id();
    }
  }
  if (report.witness) {
    report.verdict = Verdict::Unstable;
    report.explanation = "UNSTABLE: DF is negative beyond tolerance at a scanned test function";
    return report;
  }

  // The two orientations differ by Fut(L); they must agree for DF to vanish
  // on affine functions.
  bool orientations_agree = true;
  bool nodes_positive = true;
  for (const ScanTable& t : report.tables) {
    for (const ScanNode& node : t.nodes) {
      if (!node.valid) continue;
      if (!(std::abs(node.df_pos - node.df_neg) <= report.tol)) orientations_agree = false;
      const double nu = normalized_df(node);
      if (std::isfinite(nu) && !(nu > report.normalized_tol)) nodes_positive = false;
    }
  }

  // Local refinement of the normalized DF from the grid minimum of each case.
  const Eigen::Vector3d basis = futaki_basis(df.context());
  for (const ScanTable& t : report.tables) {
    const NodeContext ctx{df, t.crease_case, basis, t.quad_tol};
    const ScanNode* start = nullptr;
    double start_value = std::numeric_limits<double>::infinity();
    for (const ScanNode& node : t.nodes) {
      const double nu = normalized_df(node);
      if (nu < start_value) {
        start_value = nu;
        start = &node;
      }
    }
    if (!start) continue;
    RefinedMinimum r = refine(ctx, start->e, start->f, t.grid, options.refine_iterations);
    if (!(r.normalized <= start_value)) {
      r.e = start->e;
      r.f = start->f;
      r.normalized = start_value;
      r.orientation = small_side(*start);
      r.df = r.orientation == 0 ? start->df_pos : start->df_neg;
    }
    report.refined.push_back(r);
  }

  double refined_min = std::numeric_limits<double>::infinity();
  const RefinedMinimum* refined_witness = nullptr;
  for (const RefinedMinimum& r : report.refined) {
    if (r.normalized < refined_min) {
      refined_min = r.normalized;
      refined_witness = &r;
    }
  }
  if (refined_witness && refined_min < -report.normalized_tol && refined_witness->df < -report.tol) {
    report.verdict = Verdict::Unstable;
    report.witness = ScanMinimum{true, refined_witness->df, refined_witness->e, refined_witness->f,
                                 refined_witness->orientation};
    report.witness_case = refined_witness->case_id;
    report.explanation = "UNSTABLE: local refinement found a test function with negative DF";
    return report;
  }

  const int grid = options.scan.grid;
  if (grid < kMinEvidenceGrid) {
    report.verdict = Verdict::Inconclusive;
    report.explanation = "INCONCLUSIVE: grid " + std::to_string(grid) + " is below the minimum of " +
                         std::to_string(kMinEvidenceGrid) + " nodes per axis required for evidence";
  } else if (invalid > 0) {
    report.verdict = Verdict::Inconclusive;
    report.explanation = "INCONCLUSIVE: " + std::to_string(invalid) + " nodes failed to evaluate";
  } else if (!orientations_agree) {
    report.verdict = Verdict::Inconclusive;
    report.explanation = "INCONCLUSIVE: DF(max{L,0}) and DF(max{-L,0}) differ beyond tolerance, so Fut does not "
                         "vanish numerically on the crease functions";
  } else if (nodes_positive && refined_min > report.normalized_tol) {
    report.verdict = Verdict::PolystableEvidence;
    report.explanation =
        "POLYSTABLE-EVIDENCE: DF is positive on every scanned simple piecewise-linear test function with "
        "nonempty crease, in both orientations and after local refinement, and vanishes on the affine limits. "
        "This is numerical evidence for strict positivity of DF on sPL functions with nonempty crease, the "
        "condition that implies K-polystability for toric surfaces; a finite scan does not prove it.";
  } else {
    report.verdict = Verdict::Inconclusive;
    report.explanation = "INCONCLUSIVE: the smallest normalized DF lies within tolerance of zero";
  }
  return report;
}

void emit_scan_csv(const std::vector<ScanTable>& tables, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "case,e,f,df_pos,df_neg,valid\n";
  char line[256];
  for (const ScanTable& t : tables) {
    for (const ScanNode& node : t.nodes) {
      std::snprintf(line, sizeof line, "%d,%.12g,%.12g,%.12g,%.12g,%d\n", t.case_id(), node.e, node.f, node.df_pos,
                    node.df_neg, node.valid ? 1 : 0);
      out << line;
    }
  }
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace toric
