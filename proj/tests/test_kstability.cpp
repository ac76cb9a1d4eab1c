#include "oracles.hpp"

#include "toric/criticalpoints.hpp"
#include "toric/errors.hpp"
#include "toric/io.hpp"
#include "toric/kstability.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace toric;

namespace {

std::vector<oracle::P2> corners(const Polytope2& p) { return {p.vertices().begin(), p.vertices().end()}; }
oracle::Affine as_oracle(const AffineFn2& f) { return {f.a, f.b, f.c}; }

DFEvaluator benchmark_evaluator() {
  return DFEvaluator(FunctionalContext::make(delta_p(0.1), closed_form_family(0.1, FamilyBranch::CMinus), 4.0));
}

VerdictOptions with_grid(int grid) {
  VerdictOptions o;
  o.scan.grid = grid;
  return o;
}

const CreaseCase& case_with_edges(const std::vector<CreaseCase>& cases, int u_edge, int v_edge) {
  for (const CreaseCase& c : cases)
    if (c.u_edge.edge == u_edge && c.v_edge.edge == v_edge) return c;
  throw std::logic_error("no such case");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

double min_refined(const StabilityReport& r) {
  double m = std::numeric_limits<double>::infinity();
  for (const RefinedMinimum& x : r.refined) m = std::min(m, x.normalized);
  return m;
}

}  // namespace

TEST_CASE("crease cases on delta_p and the simplex") {
  const double p = 0.1;
  const auto cases = enumerate_crease_cases(delta_p(p));
  REQUIRE(cases.size() == 6);
  for (std::size_t i = 0; i < cases.size(); ++i) CHECK(cases[i].id == static_cast<int>(i) + 1);
  CHECK(enumerate_crease_cases(unit_simplex()).size() == 3);

  // Edges of delta_p: 0 bottom, 1 right, 2 slanted, 3 left.
  const CreaseCase& lr = case_with_edges(cases, 3, 1);
  CHECK(lr.e_max() == doctest::Approx(1.0));
  CHECK(lr.f_max() == doctest::Approx(1.0 - p));
  for (double e : {0.0, 0.3, 1.0}) {
    CHECK((lr.u(e) - Point2(0.0, e)).norm() < 1e-15);
    CHECK((lr.v(e * (1 - p)) - Point2(p, e * (1 - p))).norm() < 1e-15);
  }

  // L is proportional to (f - e) mu1 - p mu2 + p e with unit gradient.
  const double e = 0.7, f = 0.2;
  const AffineFn2 L = lr.crease_function(e, f);
  CHECK(std::hypot(L.a, L.b) == doctest::Approx(1.0));
  const Eigen::Vector3d printed(f - e, -p, p * e);
  CHECK((L.coeffs() - printed / printed.head<2>().norm()).norm() < 1e-14);
  CHECK(std::abs(L(lr.u(e))) < 1e-15);
  CHECK(std::abs(L(lr.v(f))) < 1e-15);
}

TEST_CASE("left-right crease at e = f = 0.5 has positive DF") {
  const DFEvaluator eval = benchmark_evaluator();
  const Polytope2& d = eval.context().polytope;
  const CreaseCase& lr = case_with_edges(enumerate_crease_cases(d), 3, 1);
  const AffineFn2 L = lr.crease_function(0.5, 0.5);
  const double value = eval(Weight::spl(make_spl(L, d)));
  CHECK(value > 0.0);
  CHECK(value == doctest::Approx(oracle::df_spl(corners(d), as_oracle(L), as_oracle(eval.context().f), 4.0))
                     .epsilon(1e-8));
}

TEST_CASE("scan nodes: orientation identity and degenerate limits") {
  const DFEvaluator eval(FunctionalContext::make(delta_p(0.3), {0.2, -0.4, 1.0}, 4.0));
  const Eigen::Vector3d fut = futaki_basis(eval.context());
  ScanOptions o;
  o.grid = 5;
  for (const CreaseCase& c : enumerate_crease_cases(eval.context().polytope)) {
    const ScanTable t = df_scan(eval, c, o);
    REQUIRE(t.nodes.size() == 25);
    const double scale = std::abs(d_const(eval.context())) * vol(eval.context());
    for (const ScanNode& node : t.nodes) {
      REQUIRE(node.valid);
      const AffineFn2 L = c.crease_function(node.e, node.f);
      const double fl = L.c * fut(0) + L.a * fut(1) + L.b * fut(2);
      if (node.degenerate) {
        CHECK((node.df_pos == 0.0 || node.df_neg == 0.0));
        CHECK(std::abs(std::abs(node.df_pos + node.df_neg) - std::abs(fl)) < 1e-8 * scale);
      } else {
        CHECK(std::abs(node.df_pos - node.df_neg - fl) < 1e-8 * scale);
      }
    }
    const ScanMinimum m = table_minimum(t.nodes, false);
    CHECK(m.value == t.minimum.value);
  }
}

TEST_CASE("benchmark verdict and frozen grid minimum") {
  const DFEvaluator eval = benchmark_evaluator();
  const StabilityReport r = stability_verdict(eval, with_grid(33));
  CHECK(r.verdict == Verdict::PolystableEvidence);
  CHECK(r.explanation.find("does not prove") != std::string::npos);
  std::size_t rows = 0;
  for (const ScanTable& t : r.tables) {
    rows += t.nodes.size();
    for (const ScanNode& node : t.nodes) {
      REQUIRE(node.valid);
      if (node.degenerate) {
        CHECK(std::abs(node.df_pos) <= r.tol);
        CHECK(std::abs(node.df_neg) <= r.tol);
      } else {
        CHECK(node.df_pos > 0.0);
        CHECK(node.df_neg > 0.0);
      }
    }
  }
  CHECK(rows == 6534);
  for (const RefinedMinimum& m : r.refined) CHECK(m.normalized > 0.0);

  // Frozen from the first validated run, then checked against the oracle.
  REQUIRE(r.minimum.found);
  CHECK(r.minimum_case == 3);
  CHECK(r.minimum.e == doctest::Approx(0.03125));
  CHECK(r.minimum.f == doctest::Approx(0.003125));
  CHECK(r.minimum.orientation == 1);
  CHECK(r.minimum.value == doctest::Approx(2.82232610438e-06).epsilon(1e-6));

  const CreaseCase& c = r.tables[2].crease_case;
  const AffineFn2 L = c.crease_function(r.minimum.e, r.minimum.f);
  const double ref = oracle::df_spl(corners(eval.context().polytope), as_oracle(-L), as_oracle(eval.context().f), 4.0);
  CHECK(r.minimum.value == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("verdict is invariant under scaling and unimodular maps") {
  const DFEvaluator eval = benchmark_evaluator();
  const FunctionalContext& ctx = eval.context();
  for (double C : {0.5, 2.0}) {
    const StabilityReport r = stability_verdict(DFEvaluator(ctx.with_potential(C * ctx.f)), with_grid(17));
    CHECK(r.verdict == Verdict::PolystableEvidence);
  }
  Eigen::Matrix2i U;
  U << 1, 1, 0, 1;
  const Point2 t(0.5, -1.0);
  const Polytope2 moved = unimodular_transform(ctx.polytope, U, t);
  const StabilityReport r =
      stability_verdict(DFEvaluator(FunctionalContext::make(moved, push_forward(ctx.f, U, t), 4.0)), with_grid(17));
  CHECK(r.verdict == Verdict::PolystableEvidence);
}

TEST_CASE("refined minimum is stable under grid refinement") {
  const DFEvaluator eval = benchmark_evaluator();
  const double m33 = min_refined(stability_verdict(eval, with_grid(33)));
  const double m65 = min_refined(stability_verdict(eval, with_grid(65)));
  MESSAGE("refined normalized minimum: grid 33 " << m33 << ", grid 65 " << m65);
  CHECK(m33 > 0.0);
  CHECK(m65 > 0.0);
  CHECK(std::abs(m33 - m65) <= 1e-3 * m33);
}

TEST_CASE("non-critical constant potential is not declared polystable") {
  const DFEvaluator eval(FunctionalContext::make(delta_p(0.1), {0, 0, 1}, 4.0));
  const StabilityReport r = stability_verdict(eval, with_grid(9));
  CHECK(r.verdict != Verdict::PolystableEvidence);
  CHECK(r.verdict == Verdict::Unstable);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->value < -r.tol);
}

TEST_CASE("corner-only grids never give evidence") {
  const StabilityReport r = stability_verdict(benchmark_evaluator(), with_grid(2));
  CHECK(r.verdict == Verdict::Inconclusive);
  CHECK_THROWS_AS(df_scan(benchmark_evaluator(), enumerate_crease_cases(delta_p(0.1))[0], ScanOptions{1}), DomainError);
}

TEST_CASE("CSV emission is deterministic") {
  const DFEvaluator eval = benchmark_evaluator();
  ScanOptions o;
  o.grid = 5;
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "toric_scan_a.csv").string();
  const std::string b = (dir / "toric_scan_b.csv").string();
  emit_scan_csv(df_scan_all(eval, o), a);
  o.threads = 2;
  emit_scan_csv(df_scan_all(eval, o), b);
  CHECK(slurp(a) == slurp(b));
  const std::string text = slurp(a);
  CHECK(text.rfind("case,e,f,df_pos,df_neg,valid\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 6 * 25);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}
