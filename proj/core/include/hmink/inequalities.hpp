#pragma once

// Lower bounds for the total mean curvature M of a convex surface with area S enclosing volume V
// in H^3(a), and the flat double disk that violates the conjectured sphere bound.

#include <numbers>
#include <optional>

#include "hmink/numerics.hpp"
#include "hmink/profiles.hpp"

namespace hmink {

/// Feasibility slack for S >= eta(V) (isoperimetric inequality in H^3(a)).
inline constexpr double kFeasibilityTol = 1e-9;
/// |S - eta(V)| below which (S, V) is treated as a geodesic sphere.
inline constexpr double kSphereTol = 1e-8;

struct SurfaceData {
  double S = 0.0;
  double V = 0.0;
  std::optional<double> M;
  SpaceForm sf{-1.0};
};

/// sqrt(16 pi S).
double bound_euclidean(double S);
/// sqrt(16 pi S - 4 a S^2): M of the geodesic sphere with area S. Not a valid bound in general.
double bound_santalo(double S, SpaceForm sf);
/// sqrt(16 pi S - 2 a S^2).
double bound_ghomi_spruck(double S, SpaceForm sf);
/// sqrt(16 pi S - 2 a S^2 - 2 a eta(V)^2). Sharp: equality on geodesic spheres.
double bound_sharp(double S, double V, SpaceForm sf);
/// sqrt(S) sqrt(S + 4 pi) + 4 pi asinh(sqrt(S / 4 pi)) + 2 V, stated for a = -1 only.
double bound_bgl(double S, double V, SpaceForm sf = SpaceForm{-1.0});
/// xi(V).
double bound_profile(double V, SpaceForm sf);
/// sqrt(-a) S.
double bound_gallego_solanes(double S, SpaceForm sf);
/// First quermassintegral A_1 = M - 2 V of a surface in H^3.
double quermass_a1(double M, double V);
/// Lower bound on A_1 from the bgl inequality: bound_bgl(S, V) - 2 V.
double quermass_a1_rhs(double S);

struct BoundsReport {
  double S = 0.0;
  double V = 0.0;
  double a = 0.0;
  double euclidean       = 0.0;
  double santalo         = 0.0;
  double ghomi_spruck    = 0.0;
  double sharp           = 0.0;
  std::optional<double> bgl;  // only for a = -1
  double profile         = 0.0;
  double gallego_solanes = 0.0;
  std::optional<double> quermass_a1_rhs;  // only for a = -1
  bool feasible          = false;          // S >= eta(V) - kFeasibilityTol
  bool ordering_holds    = false;          // santalo >= sharp >= ghomi_spruck >= euclidean
};

BoundsReport evaluate_bounds(double S, double V, SpaceForm sf);

struct ComparisonResult {
  double f1       = 0.0;  // bound_sharp at a = -1
  double f2       = 0.0;  // bound_bgl
  double gap      = 0.0;  // f1 - f2
  bool equality   = false;
};

/// Sharp bound against the bgl bound in H^3(-1). Throws InvalidArgument when S < eta(V) beyond
/// kFeasibilityTol, since no closed surface has such (S, V).
ComparisonResult compare_sharp_vs_bgl(double S, double V);

/// dF/dS of both bounds at a = -1, closed forms.
double sharp_dS(double S, double V);
double bgl_dS(double S);

/// Doubled geodesic disk of radius rho in a totally geodesic plane of H^3(-1). Area counts both
/// sheets, volume is zero and M is concentrated on the rim: edge_angle times the rim length
/// 2 pi sinh rho.
SurfaceData double_disk(double rho, double edge_angle = std::numbers::pi);

/// M(rho) - bound_santalo(S(rho)) for the double disk; negative means the conjectured bound fails.
double santalo_excess(double rho, double edge_angle = std::numbers::pi);

/// Radius above which the double disk violates the sphere bound, found by bracketed rootfinding
/// on [0.1, 5]. Throws InvalidArgument when the excess does not change sign there.
double santalo_violation_threshold(double edge_angle = std::numbers::pi);

/// cosh of the threshold radius, theta^2 / (16 - theta^2); empty when theta >= 4 (no violation
/// at any radius).
std::optional<double> santalo_threshold_cosh(double edge_angle);

}  // namespace hmink
