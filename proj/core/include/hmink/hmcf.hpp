#pragma once

// Harmonic mean curvature flow of axisymmetric, strictly convex surfaces in H^3(a).
//
// A surface is a radial graph r = rho(u) over the polar angle u in [0, pi] about a fixed center,
// in the metric dr^2 + phi(r)^2 (du^2 + sin^2 u dv^2) with phi = warp(., a). Nodes are equally
// spaced in u and include both poles. Derivatives use fourth-order central stencils with the
// even reflection of rho across each pole, which builds rho'(0) = rho'(pi) = 0 into the scheme.
//
// With v = sqrt(1 + rho'^2 / phi^2) the principal curvatures are
//
//   kappa_1 = (phi phi' + 2 phi' rho'^2 / phi - rho'') / (v (rho'^2 + phi^2))   (meridian)
//   kappa_2 = (phi' / phi - rho' cot u / phi^2) / v                            (rotation orbit)
//
// and at the poles rho' cot u is replaced by its limit rho''. The flow X' = -F nu with
// F = kappa_1 kappa_2 / (kappa_1 + kappa_2) becomes d rho / dt = -F v.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmink/numerics.hpp"
#include "hmink/profiles.hpp"

namespace hmink {

class AxisymmetricSurface {
 public:
  /// Nodes u_k = k pi / (n - 1). Throws InvalidArgument unless n >= 5 and every rho is finite
  /// and positive. Convexity is not checked here; see require_strictly_convex.
  AxisymmetricSurface(SpaceForm sf, std::vector<double> rhos);

  [[nodiscard]] SpaceForm space_form() const noexcept { return sf_; }
  [[nodiscard]] std::span<const double> rhos() const noexcept { return rhos_; }
  [[nodiscard]] std::vector<double> us() const;
  [[nodiscard]] std::size_t size() const noexcept { return rhos_.size(); }
  [[nodiscard]] double spacing() const noexcept;
  [[nodiscard]] double rho_max() const;
  [[nodiscard]] double rho_min() const;

 private:
  SpaceForm sf_;
  std::vector<double> rhos_;
};

/// A principal curvature is not positive at some node.
class ConvexityError : public Error {
 public:
  ConvexityError(const std::string& what, std::size_t node,
                 std::optional<AxisymmetricSurface> last_valid = std::nullopt)
      : Error(what), node_(node), last_valid_(std::move(last_valid)) {}
  [[nodiscard]] std::size_t node() const noexcept { return node_; }
  /// State before the failing step, when the error comes from a time step.
  [[nodiscard]] const std::optional<AxisymmetricSurface>& last_valid() const noexcept {
    return last_valid_;
  }

 private:
  std::size_t node_;
  std::optional<AxisymmetricSurface> last_valid_;
};

/// Requested time step exceeds the explicit stability limit.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double dt_max) : Error(what), dt_max_(dt_max) {}
  [[nodiscard]] double dt_max() const noexcept { return dt_max_; }

 private:
  double dt_max_;
};

struct PrincipalCurvatures {
  std::vector<double> meridian;
  std::vector<double> rotational;
};

struct GeometricMeasures {
  double S    = 0.0;  // area
  double V    = 0.0;  // enclosed volume
  double M    = 0.0;  // total mean curvature, H = kappa_1 + kappa_2
  double totG = 0.0;  // total Gauss-Kronecker curvature, equals 4 pi - a S
};

AxisymmetricSurface make_sphere(double r0, SpaceForm sf, std::size_t n);

/// rho(u) = r0 (1 + eps P_mode(cos u)). Throws ConvexityError naming the first bad node.
AxisymmetricSurface make_perturbed_sphere(double r0, double eps, int mode, SpaceForm sf,
                                          std::size_t n);

PrincipalCurvatures principal_curvatures(const AxisymmetricSurface& surf);

/// Throws ConvexityError unless both curvatures are positive at every node.
void require_strictly_convex(const AxisymmetricSurface& surf);

/// Composite Simpson quadrature over u of the area element 2 pi phi sin u sqrt(rho'^2 + phi^2).
GeometricMeasures measure(const AxisymmetricSurface& surf);

/// kappa_1 kappa_2 / (kappa_1 + kappa_2) per node. Throws ConvexityError where H <= 0.
std::vector<double> hmcf_speed(const AxisymmetricSurface& surf);

/// Integral of F over the surface: -dV/dt under the flow.
double total_speed(const AxisymmetricSurface& surf);

/// Largest dt accepted by hmcf_step. The stiff part of the graph equation is
/// rho_t ~ w rho'' with w = (kappa_2 / H)^2 / (phi v)^2; the fourth-order stencil scales it by at
/// most 16 / (3 h^2), and the estimate is padded by 25% before dividing it into the RK4
/// stability interval 2.78 on the negative real axis.
double stable_time_step(const AxisymmetricSurface& surf);

/// One RK4 step of the graph equation. dt = 0 returns the input. Throws StabilityError when
/// dt > stable_time_step(surf) and ConvexityError (with the input attached) when the result is
/// not strictly convex.
AxisymmetricSurface hmcf_step(const AxisymmetricSurface& surf, double dt);

/// Radius at time t of the flowing geodesic sphere: cosh(k r) = cosh(k r0) exp(a t / 2), k =
/// sqrt(-a); r = sqrt(r0^2 - t) for a = 0. Throws InvalidArgument for t outside [0, T).
double sphere_flow_exact(double r0, SpaceForm sf, double t);
/// T = -(2/a) ln cosh(k r0), or r0^2 for a = 0.
double sphere_collapse_time(double r0, SpaceForm sf);

struct FlowConfig {
  double dt           = 1e-4;
  double t_max        = 0.4;
  double stop_radius  = 1e-2;
  int record_every    = 100;
  std::size_t n_grid  = 256;   // used by callers that build the initial surface
  int phi_grid_points = 801;   // graded grid for the P_1, P_2 tables

  void validate() const;
};

struct FlowTrace {
  SpaceForm sf{-1.0};
  double dt = 0.0;
  double h  = 0.0;
  std::vector<double> times;
  std::vector<GeometricMeasures> measures;
  std::vector<double> phi1;              // M^2 - 16 pi S + 2 a S^2 - P_1(V)
  std::vector<double> phi2;              // same with P_2
  std::vector<double> phiInf;            // M^2 - 16 pi S + 2 a S^2 + 2 a eta(V)^2
  std::vector<double> phiInf_unsquared;  // M^2 - 16 pi S + 2 a S^2 + 2 a eta(V)
  // |dS/dt + totG| and |dV/dt + int F| over the interval ending at each record, with the
  // derivative from consecutive records and the right side averaged over both ends. Entry 0 is 0.
  std::vector<double> dS_residual;
  std::vector<double> dV_residual;
  std::vector<double> kappa_min;
  std::vector<double> total_speed;
  std::vector<double> rho_max;
  std::vector<double> rho_min;
  std::string stop_reason;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
};

/// A step failed during run_flow. Carries everything recorded so far and the last good surface.
class FlowError : public Error {
 public:
  FlowError(const std::string& what, FlowTrace trace, AxisymmetricSurface last)
      : Error(what), trace_(std::move(trace)), last_(std::move(last)) {}
  [[nodiscard]] const FlowTrace& trace() const noexcept { return trace_; }
  [[nodiscard]] const AxisymmetricSurface& last_surface() const noexcept { return last_; }

 private:
  FlowTrace trace_;
  AxisymmetricSurface last_;
};

struct FlowResult {
  FlowTrace trace;
  AxisymmetricSurface final_surface;
};

/// Steps until t_max (last step shortened to land on it) or until rho_max < stop_radius.
/// Records the initial state, every record_every steps, and the final state.
FlowResult run_flow(const AxisymmetricSurface& surf, const FlowConfig& cfg);

struct OffsetResidual {
  double dS_rel = 0.0;  // |dS/deps - M| / M
  double dV_rel = 0.0;  // |dV/deps - S| / S
};

/// Moves the surface by +-eps along the unit outer normal (d rho / d eps = v) and compares
/// centered differences of S and V with M and S.
OffsetResidual normal_offset_check(const AxisymmetricSurface& surf, double eps);

struct AuditTolerances {
  double dS_rel        = 2e-3;
  double dV_rel        = 2e-3;
  double gauss_bonnet  = 1e-6;
  double kleiner_abs   = 1e-6;
  double sharp_rel     = 1e-3;
  double phi_rel       = 1e-3;  // tau = phi_rel |phi(0)| + phi_scheme (dt + h^2) M(0)^2
  double phi_scheme    = 10.0;
};

struct AuditReport {
  double tau_phi1       = 0.0;
  double tau_phi2       = 0.0;
  double tau_phiInf     = 0.0;
  double max_rise_phi1  = 0.0;  // largest phi[k+1] - phi[k], 0 when nonincreasing
  double max_rise_phi2  = 0.0;
  double max_rise_phiInf = 0.0;
  double max_dS_rel     = 0.0;
  double max_dV_rel     = 0.0;
  double max_gb_rel     = 0.0;
  double min_kleiner_slack = 0.0;  // min S - eta(V)
  double min_sharp_slack   = 0.0;  // min (M - bound_sharp) / M
  double min_kappa      = 0.0;
  bool phi_monotone     = false;
  bool evolution_ok     = false;
  bool gauss_bonnet_ok  = false;
  bool kleiner_ok       = false;
  bool sharp_ok         = false;
  bool passed           = false;
};

/// Throws InvalidArgument for traces with fewer than 3 records.
AuditReport monotone_audit(const FlowTrace& trace, const AuditTolerances& tol = {});

}  // namespace hmink
