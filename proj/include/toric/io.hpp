#pragma once

#include "toric/criticalpoints.hpp"
#include "toric/kstability.hpp"
#include "toric/polytope.hpp"

#include <map>
#include <string>
#include <vector>

namespace toric {

/// {"vertices": [[x, y], ...]}. Throws ValidationError on malformed JSON or
/// geometry, IoError if the file cannot be read.
Polytope2 parse_polytope_json(const std::string& text, BoundaryMeasure measure = BoundaryMeasure::Lattice);
Polytope2 read_polytope_json(const std::string& path, BoundaryMeasure measure = BoundaryMeasure::Lattice);
std::string polytope_json(const Polytope2& polytope);

struct CsvRow {
  int case_id = 0;
  double e = 0.0;
  double f = 0.0;
  double df_pos = 0.0;
  double df_neg = 0.0;
  bool valid = false;
};

/// Reads a file written by emit_scan_csv. Throws IoError.
std::vector<CsvRow> read_scan_csv(const std::string& path);
/// Minimum over valid rows per case id, both orientations.
std::map<int, ScanMinimum> csv_minima(const std::vector<CsvRow>& rows);

/// {"polytope", "f", "n", "verdict", "minimum", "cases", ...}
std::string report_json(const Polytope2& polytope, const AffineFn2& f, double n, const StabilityReport& report);
std::string critical_rays_json(const Polytope2& polytope, double n, const std::vector<CriticalRay>& rays);

/// Writes text to path; throws IoError.
void write_text(const std::string& path, const std::string& text);

}  // namespace toric
