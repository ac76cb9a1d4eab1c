#pragma once

// Randomized invariant suites behind `toric-kstab verify`.

#include "toric/polytope.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace toric {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20161010;
  int threads = 1;
};

std::vector<CheckResult> verify_identities(const VerifyOptions& options = {});
std::vector<CheckResult> verify_abreu(const VerifyOptions& options = {});
std::vector<CheckResult> verify_slice(const VerifyOptions& options = {});

/// "identities", "abreu" or "slice"; throws DomainError otherwise.
std::vector<CheckResult> run_suite(const std::string& name, const VerifyOptions& options = {});

/// Random Delzant polygon: Delta_p, a scaled simplex, a Hirzebruch trapezoid or
/// a square with one corner cut, moved by a random unimodular map.
Polytope2 random_delzant_polygon(std::mt19937_64& rng, bool quadrilateral_only = false);
/// Affine function with minimum vertex value in [0.3, 1.5].
AffineFn2 random_positive_function(std::mt19937_64& rng, const Polytope2& polytope);
/// Product of elementary integer shears, possibly with a reflection.
Eigen::Matrix2i random_unimodular(std::mt19937_64& rng);
/// Strictly interior point, at least `margin` (relative) away from the boundary.
Point2 random_interior_point(std::mt19937_64& rng, const Polytope2& polytope, double margin = 0.05);

}  // namespace toric
