// Acceptance checks, one PASS/FAIL line per criterion.

#include "oracles.hpp"
#include "run_cli.hpp"

#include "toric/criticalpoints.hpp"
#include "toric/io.hpp"
#include "toric/kstability.hpp"
#include "toric/quadrature.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

using namespace toric;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome quartic_root() {
  const auto t0 = Clock::now();
  constexpr int kReps = 100;
  double a = 0.0;
  for (int i = 0; i < kReps; ++i) a = quartic_alpha();
  const double per_call = seconds_since(t0) / kReps;
  std::ostringstream d;
  d << "alpha = " << a << ", |F| = " << std::abs(quartic_F(a)) << ", " << per_call * 1e3 << " ms per call";
  return {a > 0.0 && a < 1.0 && std::abs(quartic_F(a)) < 1e-10 && std::abs(a - 0.386) <= 5e-4 && per_call < 1e-3,
          d.str()};
}

Outcome family_critical(const std::vector<double>& ps, const std::vector<FamilyBranch>& branches, double budget) {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst_grad = 0.0, worst_fut = 0.0;
  for (double p : ps) {
    for (FamilyBranch b : branches) {
      const Polytope2 d = delta_p(p);
      const AffineFn2 f = closed_form_family(p, b);
      if (!is_positive_on(f, d)) {
        ok = false;
        continue;
      }
      const CriticalRay r = analyse_ray(d, 4.0, f);
      const double fut = r.futaki_residuals.maxCoeff() / r.futaki_scale;
      worst_grad = std::max(worst_grad, r.grad_norm);
      worst_fut = std::max(worst_fut, fut);
      ok = ok && r.grad_norm < 1e-6 && fut < 1e-6;
    }
  }
  const double t = seconds_since(t0);
  std::ostringstream d;
  d << "max normalized gradient " << worst_grad << ", max Futaki residual / scale " << worst_fut << ", " << t << " s";
  return {ok && t < budget, d.str()};
}

Outcome benchmark_scan() {
  const std::string csv = (std::filesystem::temp_directory_path() / "toric_acceptance_scan.csv").string();
  const auto t0 = Clock::now();
  const CliRun run = run_cli("delta-p --p 0.1 df-scan --branch c_minus --n 4 --grid 33 --out " + csv);
  const double t = seconds_since(t0);
  if (run.status != 0) return {false, "exit status " + std::to_string(run.status) + ": " + run.output};

  double tol = 0.0;
  const auto pos = run.output.find("tolerance: ");
  if (pos != std::string::npos) tol = std::stod(run.output.substr(pos + 11));
  const bool evidence = run.output.find("verdict: POLYSTABLE-EVIDENCE") != std::string::npos;

  const Polytope2 d = delta_p(0.1);
  const auto cases = enumerate_crease_cases(d);
  const auto rows = read_scan_csv(csv);
  std::filesystem::remove(csv);
  bool signs = true;
  double min_nondegenerate = std::numeric_limits<double>::infinity();
  for (const CsvRow& row : rows) {
    if (!row.valid) continue;
    const CreaseCase& c = cases.at(static_cast<std::size_t>(row.case_id - 1));
    const bool degenerate = !crease_segment(c.crease_function(row.e, row.f), d).has_value();
    for (double v : {row.df_pos, row.df_neg}) {
      if (degenerate) {
        signs = signs && std::abs(v) <= tol;
      } else {
        signs = signs && v > 0.0;
        min_nondegenerate = std::min(min_nondegenerate, v);
      }
    }
  }
  constexpr double kFrozenMinimum = 2.82232610438e-06;
  const bool frozen = std::abs(min_nondegenerate - kFrozenMinimum) <= 1e-6 * kFrozenMinimum;
  std::ostringstream out;
  out << rows.size() << " rows, min DF over non-degenerate nodes " << min_nondegenerate << " (frozen "
      << kFrozenMinimum << "), degenerate nodes within " << tol << ", verdict "
      << (evidence ? "POLYSTABLE-EVIDENCE" : "other") << ", " << t << " s";
  return {rows.size() == 6534 && signs && evidence && frozen && tol > 0.0 && t < 300.0, out.str()};
}

Outcome suite(const std::string& name) {
  const CliRun run = run_cli("verify --suite " + name);
  int passes = 0, fails = 0;
  std::istringstream lines(run.output);
  std::string line;
  std::string failed;
  while (std::getline(lines, line)) {
    if (line.rfind("PASS ", 0) == 0) ++passes;
    if (line.rfind("FAIL ", 0) == 0) {
      ++fails;
      failed += "\n    " + line;
    }
  }
  return {run.status == 0 && passes > 0 && fails == 0,
          std::to_string(passes) + " checks passed, " + std::to_string(fails) + " failed" + failed};
}

Outcome quadrature_oracles() {
  const Polytope2 s = unit_simplex();
  const double in = integrate_interior(s, Weight::one(), {1, 1, 1}, -4.0).value;
  const double bd = integrate_boundary(s, Weight::one(), {1, 1, 1}, -3.0).value;
  const std::vector<oracle::P2> tri{{0, 0}, {1, 0}, {0, 1}};
  const double in_ref = oracle::interior(tri, {0, 0, 1}, {1, 1, 1}, -4.0);
  const double bd_ref = oracle::boundary(tri, {0, 0, 1}, {1, 1, 1}, -3.0);
  bool ok = std::abs(in - 1.0 / 12.0) <= 1e-10 / 12.0 && std::abs(bd - 0.875) <= 1e-10 * 0.875 &&
            std::abs(in_ref - 1.0 / 12.0) <= 1e-12 && std::abs(bd_ref - 0.875) <= 1e-12;
  double worst = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double p = i / 21.0;
    const double err = std::abs(delta_p(p).lattice_perimeter() - (2.0 + p));
    worst = std::max(worst, err);
  }
  ok = ok && worst <= 4.0 * std::numeric_limits<double>::epsilon();
  std::ostringstream d;
  d.precision(15);
  d << "interior " << in << ", boundary " << bd << ", max perimeter error " << worst << " over 20 p";
  return {ok, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"quartic root", quartic_root},
      {"case (c) criticality",
       [] {
         return family_critical({0.05, 0.1, 0.2, 0.35}, {FamilyBranch::CMinus, FamilyBranch::CPlus}, 30.0);
       }},
      {"case (b) criticality", [] { return family_critical({0.92, 0.95, 0.98}, {FamilyBranch::BPlus}, 30.0); }},
      {"benchmark scan", benchmark_scan},
      {"identity suite", [] { return suite("identities"); }},
      {"Abreu suite", [] { return suite("abreu"); }},
      {"slice principle", [] { return suite("slice"); }},
      {"quadrature oracles", quadrature_oracles},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
