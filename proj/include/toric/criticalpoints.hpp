#pragma once

// Critical rays of the normalized Einstein-Hilbert functional over the cone of
// positive affine potentials, the closed-form families on Delta_p and the
// volume-minimization check on the slice {d = const}.

#include "toric/functionals.hpp"
#include "toric/polytope.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace toric {

/// Value, gradient and Hessian of eh with respect to the coefficients (a, b, c)
/// of f = a mu1 + b mu2 + c, together with the moments they were built from.
struct EHJet {
  double value = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
  double vol = 0.0;       ///< int f^-n
  double boundary = 0.0;  ///< int_bd f^(2-n)
  double c = 0.0;         ///< c_const
  double d = 0.0;         ///< d_const
  Eigen::Vector3d futaki = Eigen::Vector3d::Zero();  ///< Fut(1), Fut(mu1), Fut(mu2)
  Eigen::Vector3d vol_gradient = Eigen::Vector3d::Zero();
  Eigen::Vector3d boundary_gradient = Eigen::Vector3d::Zero();
  bool has_hessian = false;

  /// |grad| * |(a,b,c)| / |eh|; invariant under f -> C f.
  double normalized_gradient(const AffineFn2& f) const;
  /// max |Fut| / (|d| * vol).
  double futaki_residual() const;
};

/// Throws DomainError if f is not positive on the polytope. The Hessian costs
/// two extra moment integrals and is skipped when with_hessian is false.
EHJet eh_jet(const Polytope2& polytope, double n, const AffineFn2& f, double tol = kDefaultTol,
             bool with_hessian = true);

struct EHGradient {
  double value = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();  ///< d/da, d/db, d/dc
};

/// eh and its gradient along mu1, mu2 and 1.
EHGradient eh_value_and_gradient(const Polytope2& polytope, double n, const AffineFn2& f, double tol = kDefaultTol);

enum class CriticalKind { Minimum, Saddle, Maximum, Degenerate };
std::string to_string(CriticalKind kind);

enum class FamilyBranch { A, BPlus, BMinus, CPlus, CMinus };
std::string to_string(FamilyBranch branch);
/// Parses "a", "b_plus", "b_minus", "c_plus", "c_minus"; throws DomainError otherwise.
FamilyBranch parse_branch(const std::string& name);

struct FamilyMatch {
  FamilyBranch branch;
  bool sign_flipped = false;  ///< the ray matches the negated printed triple
  double angle = 0.0;
};

struct CriticalRay {
  AffineFn2 f;                  ///< unit Euclidean norm of (a, b, c)
  double eh = 0.0;
  double grad_norm = 0.0;       ///< normalized gradient
  Eigen::Vector3d futaki_residuals = Eigen::Vector3d::Zero();  ///< |Fut(1)|, |Fut(mu1)|, |Fut(mu2)|
  double futaki_scale = 0.0;    ///< |d| * vol
  double cd_gap = 0.0;          ///< |c_const - d_const|
  Eigen::Vector2d tangent_eigenvalues = Eigen::Vector2d::Zero();
  CriticalKind classification = CriticalKind::Degenerate;
  std::optional<FamilyMatch> family;  ///< filled only on Delta_p searches
};

struct SearchConfig {
  int starts = 200;            ///< Fibonacci sphere points before the positivity filter
  int max_iterations = 60;
  double tol = 1e-9;           ///< on the normalized gradient
  double futaki_tol = 1e-6;    ///< on the Futaki residual, relative to |d| vol
  double start_margin = 1e-2;  ///< minimum vertex value of a unit start vector
  int edge_levels = 4;         ///< log-spaced weights per edge function in the extra starts (0: none)
  double edge_depth = 6.0;     ///< log range of those weights
  double quad_tol = kDefaultTol;
  int threads = 1;
};

/// Multistart Newton search on the unit sphere intersected with the positivity
/// cone, from a filtered Fibonacci grid plus positive combinations of the edge
/// functions with log-spaced weights. Rays are deduplicated (angle < 1e-6) and sorted by angle.
std::vector<CriticalRay> find_critical_rays(const Polytope2& polytope, double n, const SearchConfig& config = {});

/// Diagnostics of a single potential, without searching.
CriticalRay analyse_ray(const Polytope2& polytope, double n, const AffineFn2& f, double tol = kDefaultTol);

/// F(x) = x^4 - 4x^3 + 16x^2 - 16x + 4.
double quartic_F(double x);
/// The root of F near 0.386 (the smaller of its two roots in (0, 1)).
double quartic_alpha();

/// Printed coefficient triple with C = 1. Throws DomainError outside the
/// branch range: (a) 0<p<1, (b) 8/9<p<1, (c) 0<p<alpha.
AffineFn2 closed_form_family(double p, FamilyBranch branch);
bool family_defined(double p, FamilyBranch branch);

/// Closest printed family ray on Delta_p, allowing a global sign flip; empty
/// if no branch is within max_angle.
std::optional<FamilyMatch> match_family(double p, const AffineFn2& f, double max_angle = 1e-6);

struct SliceReport {
  double futaki_residual = 0.0;   ///< max |Fut| / (|d| vol)
  double slice_residual = 0.0;    ///< |grad vol - lambda grad d| / |grad vol|
  double lambda = 0.0;            ///< least-squares Lagrange multiplier
  double cd_gap = 0.0;            ///< |c - d| / |d|
  bool futaki_stationary = false;
  bool slice_stationary = false;
  bool consistent() const { return futaki_stationary == slice_stationary; }
  bool pass() const { return futaki_stationary && slice_stationary; }
};

/// Compares stationarity of vol on the slice {d = d(f)} with Fut = 0 at f.
/// Throws UnsupportedError when |d| < 1e-10.
SliceReport verify_slice_principle(const Polytope2& polytope, double n, const AffineFn2& f, double tol,
                                   double quad_tol = kDefaultTol);

}  // namespace toric
