// toric-kstab: command-line front end for the toric K-stability library.

#include "toric/criticalpoints.hpp"
#include "toric/errors.hpp"
#include "toric/functionals.hpp"
#include "toric/io.hpp"
#include "toric/kstability.hpp"
#include "toric/parallel.hpp"
#include "toric/polytope.hpp"
#include "toric/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace toric;

enum ExitCode { kOk = 0, kInvalid = 1, kTolerance = 2, kIo = 3 };

struct Options {
  std::string measure = "lattice";
  int threads = 0;
  double p = 0.0;
  std::string file;
  double n = 4.0;
  std::string branch;
  std::vector<double> f;
  int grid = 33;
  std::string out;
  std::string report;
  double tol = kDefaultTol;
  int starts = 200;
  std::string suite;
};

BoundaryMeasure parse_measure(const std::string& m) {
  return m == "euclidean" ? BoundaryMeasure::Euclidean : BoundaryMeasure::Lattice;
}

void check_n(double n) {
  if (n == 0.0 || n == 1.0 || n == 2.0) throw DomainError("n must not be 0, 1 or 2");
}

AffineFn2 explicit_potential(const std::vector<double>& f) {
  if (f.size() != 3) throw DomainError("--f expects three comma-separated numbers a,b,c");
  return {f[0], f[1], f[2]};
}

int run_critical(const Polytope2& polytope, const Options& o, std::optional<double> p) {
  check_n(o.n);
  SearchConfig config;
  config.starts = o.starts;
  config.quad_tol = o.tol;
  config.threads = resolve_threads(o.threads);
  auto rays = find_critical_rays(polytope, o.n, config);
  if (p) {
    for (CriticalRay& ray : rays) ray.family = match_family(*p, ray.f);
  }
  std::cout << critical_rays_json(polytope, o.n, rays);
  return kOk;
}

int run_scan(const Polytope2& polytope, const AffineFn2& f, const Options& o) {
  check_n(o.n);
  if (o.grid < 2) throw DomainError("--grid must be at least 2");
  const auto started = std::chrono::steady_clock::now();
  const DFEvaluator df(FunctionalContext::make(polytope, f, o.n, o.tol));
  VerdictOptions options;
  options.scan.grid = o.grid;
  options.scan.quad_tol = o.tol;
  options.scan.threads = resolve_threads(o.threads);
  const StabilityReport report = stability_verdict(df, options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (!o.out.empty()) emit_scan_csv(report.tables, o.out);
  if (!o.report.empty()) write_text(o.report, report_json(polytope, f, o.n, report));

  std::size_t rows = 0;
  for (const ScanTable& t : report.tables) rows += t.nodes.size();
  std::printf("f = (%.12g, %.12g, %.12g), n = %g, %zu cases, grid %d, %zu nodes\n", f.a, f.b, f.c, o.n,
              report.tables.size(), o.grid, rows);
  if (report.minimum.found) {
    std::printf("minimum DF over non-degenerate nodes: %.12g (case %d, e = %.6g, f = %.6g, %s)\n",
                report.minimum.value, report.minimum_case, report.minimum.e, report.minimum.f,
                report.minimum.orientation == 0 ? "max{L,0}" : "max{-L,0}");
  }
  std::printf("tolerance: %.3g\n", report.tol);
  std::printf("verdict: %s\n", to_string(report.verdict).c_str());
  std::printf("%s\n", report.explanation.c_str());
  std::printf("elapsed: %.2f s\n", seconds);
  return kOk;
}

int run_futaki(const Polytope2& polytope, const Options& o) {
  check_n(o.n);
  const FunctionalContext ctx = FunctionalContext::make(polytope, explicit_potential(o.f), o.n, o.tol);
  const Eigen::Vector3d fut = futaki_basis(ctx);
  nlohmann::json doc = {{"futaki", {{"1", fut(0)}, {"mu1", fut(1)}, {"mu2", fut(2)}}},
                        {"c", c_const(ctx)},
                        {"d", d_const(ctx)},
                        {"vol", vol(ctx)},
                        {"eh", eh(ctx)}};
  std::cout << doc.dump(2) << "\n";
  return kOk;
}

int run_verify(const Options& o) {
  VerifyOptions options;
  options.threads = resolve_threads(o.threads);
  const auto results = run_suite(o.suite, options);
  bool ok = true;
  for (const CheckResult& r : results) {
    std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kOk : kTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Numerical toric K-stability for constant weighted scalar curvature (k = -2)"};
  app.set_help_all_flag("--help-all", "Show help for all subcommands");
  app.require_subcommand(1);
  app.add_option("--measure", o.measure, "Boundary measure on edges")
      ->check(CLI::IsMember({"lattice", "euclidean"}))
      ->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads (default: TORIC_KSTAB_THREADS or 1)");

  auto add_n = [&](CLI::App* sub) { sub->add_option("--n", o.n, "Exponent n (not 0, 1 or 2)")->capture_default_str(); };
  auto add_tol = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "Relative quadrature tolerance")->capture_default_str();
  };

  auto* dp = app.add_subcommand("delta-p", "Work on the polygon Delta_p");
  dp->add_option("--p", o.p, "Parameter p in (0,1)")->required();
  dp->require_subcommand(1);
  auto* dp_critical = dp->add_subcommand("critical", "Find critical rays of EH and match the printed families");
  add_n(dp_critical);
  add_tol(dp_critical);
  dp_critical->add_option("--starts", o.starts, "Multistart points on the sphere")->capture_default_str();
  auto* dp_scan = dp->add_subcommand("df-scan", "Scan DF over all crease cases and report a verdict");
  add_n(dp_scan);
  add_tol(dp_scan);
  auto* branch_opt =
      dp_scan->add_option("--branch", o.branch, "Potential from a family: a, b_plus, b_minus, c_plus, c_minus");
  auto* f_opt = dp_scan->add_option("--f", o.f, "Explicit potential a,b,c")->delimiter(',')->expected(3);
  branch_opt->excludes(f_opt);
  dp_scan->add_option("--grid", o.grid, "Nodes per parameter axis")->capture_default_str();
  dp_scan->add_option("--out", o.out, "CSV output path");
  dp_scan->add_option("--report", o.report, "JSON report path");
  dp_scan->add_option("--threads", o.threads, "Worker threads");

  auto* poly = app.add_subcommand("polytope", "Work on a polygon read from JSON");
  poly->add_option("--file", o.file, "JSON file {\"vertices\": [[x,y], ...]}")->required();
  poly->require_subcommand(1);
  auto* poly_futaki = poly->add_subcommand("futaki", "Print Fut(1), Fut(mu1), Fut(mu2), c, d, vol and EH");
  poly_futaki->add_option("--f", o.f, "Potential a,b,c")->delimiter(',')->expected(3)->required();
  add_n(poly_futaki);
  add_tol(poly_futaki);
  auto* poly_critical = poly->add_subcommand("critical", "Find critical rays of EH");
  add_n(poly_critical);
  add_tol(poly_critical);
  poly_critical->add_option("--starts", o.starts, "Multistart points on the sphere")->capture_default_str();
  auto* poly_scan = poly->add_subcommand("df-scan", "Scan DF over all crease cases and report a verdict");
  poly_scan->add_option("--f", o.f, "Potential a,b,c")->delimiter(',')->expected(3)->required();
  add_n(poly_scan);
  add_tol(poly_scan);
  poly_scan->add_option("--grid", o.grid, "Nodes per parameter axis")->capture_default_str();
  poly_scan->add_option("--out", o.out, "CSV output path");
  poly_scan->add_option("--report", o.report, "JSON report path");
  poly_scan->add_option("--threads", o.threads, "Worker threads");

  auto* verify = app.add_subcommand("verify", "Run an invariant suite");
  verify->add_option("--suite", o.suite, "Suite name")
      ->check(CLI::IsMember({"identities", "abreu", "slice"}))
      ->required();
  verify->add_option("--threads", o.threads, "Worker threads");

  app.add_subcommand("alpha", "Print the root of x^4 - 4x^3 + 16x^2 - 16x + 4 near 0.386");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    const BoundaryMeasure measure = parse_measure(o.measure);
    if (app.got_subcommand("alpha")) {
      const double a = quartic_alpha();
      std::printf("%.15g\n", a);
      return kOk;
    }
    if (verify->parsed()) return run_verify(o);
    if (dp->parsed()) {
      const Polytope2 polytope = delta_p(o.p).with_measure(measure);
      if (dp_critical->parsed()) return run_critical(polytope, o, o.p);
      AffineFn2 f;
      if (!o.branch.empty()) {
        f = closed_form_family(o.p, parse_branch(o.branch));
      } else if (!o.f.empty()) {
        f = explicit_potential(o.f);
      } else {
        throw DomainError("df-scan needs --branch or --f");
      }
      return run_scan(polytope, f, o);
    }
    if (poly->parsed()) {
      const Polytope2 polytope = read_polytope_json(o.file, measure);
      if (!polytope.is_delzant()) std::fprintf(stderr, "warning: polygon is not Delzant\n");
      if (poly_futaki->parsed()) return run_futaki(polytope, o);
      if (poly_critical->parsed()) return run_critical(polytope, o, std::nullopt);
      return run_scan(polytope, explicit_potential(o.f), o);
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const ToleranceError& e) {
    std::fprintf(stderr, "error: %s (best estimate %.17g, error %.3g)\n", e.what(), e.best_estimate(),
                 e.error_estimate());
    return kTolerance;
  } catch (const EvaluationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kTolerance;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  }
  return kInvalid;
}
