#pragma once

// Donaldson-Futaki scans over simple piecewise-linear test functions whose
// crease joins a point u on one edge to a point v on another.

#include "toric/functionals.hpp"
#include "toric/polytope.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace toric {

/// Point on an edge at lattice distance t from the lexicographically smaller
/// endpoint, t in [0, lattice length].
struct EdgeChart {
  int edge = 0;
  Point2 origin;
  Point2 step;  ///< primitive direction, pointing away from origin
  double length = 0.0;

  Point2 at(double t) const { return origin + t * step; }
};

EdgeChart edge_chart(const Polytope2& polytope, int edge);

struct CreaseCase {
  int id = 0;  ///< 1-based
  EdgeChart u_edge;
  EdgeChart v_edge;

  double e_max() const { return u_edge.length; }
  double f_max() const { return v_edge.length; }
  Point2 u(double e) const { return u_edge.at(e); }
  Point2 v(double f) const { return v_edge.at(f); }

  /// L with unit gradient vanishing at u(e) and v(f), positive to the right
  /// of the direction u -> v. When u and v coincide the direction is taken
  /// from parameters nudged into the box.
  AffineFn2 crease_function(double e, double f) const;
};

/// One case per unordered pair of edges i < j; u lies on edge j, v on edge i.
std::vector<CreaseCase> enumerate_crease_cases(const Polytope2& polytope);

struct ScanNode {
  double e = 0.0;
  double f = 0.0;
  double df_pos = 0.0;  ///< DF(max{L, 0})
  double df_neg = 0.0;  ///< DF(max{-L, 0})
  double mass_pos = 0.0;  ///< boundary integral of max{L, 0}
  double mass_neg = 0.0;
  bool valid = true;
  bool degenerate = false;  ///< no interior crease; affine limit
  std::string note;
};

struct ScanMinimum {
  bool found = false;
  double value = 0.0;
  double e = 0.0;
  double f = 0.0;
  int orientation = 0;  ///< 0 for max{L,0}, 1 for max{-L,0}
};

struct ScanTable {
  CreaseCase crease_case;
  int grid = 0;
  double quad_tol = kDefaultTol;
  std::vector<ScanNode> nodes;  ///< e-major: index = ie * grid + jf
  ScanMinimum minimum;                ///< over all valid nodes
  ScanMinimum minimum_nondegenerate;  ///< over valid nodes with an interior crease

  int case_id() const { return crease_case.id; }
};

/// Minimum of both orientations over the valid nodes (optionally skipping
/// degenerate ones).
ScanMinimum table_minimum(const std::vector<ScanNode>& nodes, bool skip_degenerate);

struct ScanOptions {
  int grid = 33;
  double quad_tol = kDefaultTol;
  int threads = 1;
};

/// DF at every node of the grid x grid tensor grid, both orientations.
/// Quadrature failures mark the node invalid; the scan continues.
ScanTable df_scan(const DFEvaluator& df, const CreaseCase& crease_case, const ScanOptions& options);
std::vector<ScanTable> df_scan_all(const DFEvaluator& df, const ScanOptions& options);

enum class Verdict { Unstable, PolystableEvidence, Inconclusive };
std::string to_string(Verdict v);

struct RefinedMinimum {
  int case_id = 0;
  int orientation = 0;  ///< side with the smaller boundary mass at (e, f)
  double e = 0.0;
  double f = 0.0;
  double normalized = 0.0;  ///< DF / boundary mass of that side
  double df = 0.0;
  int evaluations = 0;
};

struct StabilityReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string explanation;
  double tol = 0.0;             ///< absolute, on raw DF
  double normalized_tol = 0.0;  ///< on DF / boundary mass
  double df_scale = 0.0;
  std::optional<ScanMinimum> witness;  ///< negative node when unstable
  int witness_case = 0;
  ScanMinimum minimum;           ///< over all cases, non-degenerate nodes
  int minimum_case = 0;
  std::vector<RefinedMinimum> refined;
  std::vector<ScanTable> tables;
};

inline constexpr int kMinEvidenceGrid = 9;

struct VerdictOptions {
  ScanOptions scan;
  double relative_tol = 1e-7;  ///< tol = relative_tol * max |DF| over the scan
  int refine_iterations = 200;
};

/// Scans every crease case, refines each case by a local minimization of the
/// normalized DF, and classifies. Evidence of polystability requires both
/// orientations to be positive at every node, the orientations to agree up to
/// tol (Fut vanishes on crease functions) and positive refined minima.
StabilityReport stability_verdict(const DFEvaluator& df, const VerdictOptions& options);

/// Writes `case,e,f,df_pos,df_neg,valid` rows, case then e-major. Throws IoError.
void emit_scan_csv(const std::vector<ScanTable>& tables, const std::string& path);

}  // namespace toric
