#include "hmink/inequalities.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "hmink/numerics.hpp"

namespace hmink {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(fmt::format("{} must be finite and >= 0, got {}", name, v));
  }
}

void require_standard(SpaceForm sf) {
  if (sf.curvature() != -1.0) {
    throw InvalidArgument(
        fmt::format("bound stated only for curvature -1, got a = {}", sf.curvature()));
  }
}

double root_nonneg(double v) { return std::sqrt(std::max(0.0, v)); }

}  // namespace

double bound_euclidean(double S) {
  require_nonnegative(S, "S");
  return std::sqrt(16.0 * kPi * S);
}

double bound_santalo(double S, SpaceForm sf) {
  require_nonnegative(S, "S");
  return root_nonneg(16.0 * kPi * S - 4.0 * sf.curvature() * S * S);
}

double bound_ghomi_spruck(double S, SpaceForm sf) {
  require_nonnegative(S, "S");
  return root_nonneg(16.0 * kPi * S - 2.0 * sf.curvature() * S * S);
}

double bound_sharp(double S, double V, SpaceForm sf) {
  require_nonnegative(S, "S");
  require_nonnegative(V, "V");
  const double a = sf.curvature();
  const double e = V == 0.0 ? 0.0 : eta(V, sf);
  return root_nonneg(16.0 * kPi * S - 2.0 * a * S * S - 2.0 * a * e * e);
}

double quermass_a1_rhs(double S) {
  require_nonnegative(S, "S");
  return std::sqrt(S) * std::sqrt(S + 4.0 * kPi) + 4.0 * kPi * std::asinh(std::sqrt(S / (4.0 * kPi)));
}

double bound_bgl(double S, double V, SpaceForm sf) {
  require_standard(sf);
  require_nonnegative(V, "V");
  return quermass_a1_rhs(S) + 2.0 * V;
}

double bound_profile(double V, SpaceForm sf) {
  require_nonnegative(V, "V");
  return xi(V, sf);
}

double bound_gallego_solanes(double S, SpaceForm sf) {
  require_nonnegative(S, "S");
  return sf.rate() * S;
}

double quermass_a1(double M, double V) {
  require_nonnegative(V, "V");
  return M - 2.0 * V;
}

BoundsReport evaluate_bounds(double S, double V, SpaceForm sf) {
  BoundsReport r;
  r.S               = S;
  r.V               = V;
  r.a               = sf.curvature();
  r.euclidean       = bound_euclidean(S);
  r.santalo         = bound_santalo(S, sf);
  r.ghomi_spruck    = bound_ghomi_spruck(S, sf);
  r.sharp           = bound_sharp(S, V, sf);
  r.profile         = bound_profile(V, sf);
  r.gallego_solanes = bound_gallego_solanes(S, sf);
  if (sf.curvature() == -1.0) {
    r.bgl             = bound_bgl(S, V, sf);
    r.quermass_a1_rhs = quermass_a1_rhs(S);
  }
  r.feasible = S >= eta(V, sf) - kFeasibilityTol;
  const double slack = 1e-12 * std::max(1.0, r.santalo);
  r.ordering_holds   = r.santalo + slack >= r.sharp && r.sharp + slack >= r.ghomi_spruck &&
                     r.ghomi_spruck + slack >= r.euclidean;
  return r;
}

ComparisonResult compare_sharp_vs_bgl(double S, double V) {
  const SpaceForm h3{-1.0};
  require_nonnegative(S, "S");
  require_nonnegative(V, "V");
  const double e = eta(V, h3);
  if (S < e - kFeasibilityTol) {
    throw InvalidArgument(
        fmt::format("(S, V) = ({}, {}) is not realizable: S < eta(V) = {}", S, V, e));
  }
  ComparisonResult out;
  out.f1       = bound_sharp(S, V, h3);
  out.f2       = bound_bgl(S, V, h3);
  out.gap      = out.f1 - out.f2;
  out.equality = std::abs(S - e) <= kSphereTol;
  return out;
}

double sharp_dS(double S, double V) {
  const SpaceForm h3{-1.0};
  return (8.0 * kPi + 2.0 * S) / bound_sharp(S, V, h3);
}

double bgl_dS(double S) {
  require_nonnegative(S, "S");
  return (4.0 * kPi + S) / std::sqrt(4.0 * kPi * S + S * S);
}

SurfaceData double_disk(double rho, double edge_angle) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidArgument(fmt::format("double_disk: rho must be > 0, got {}", rho));
  }
  if (!(edge_angle > 0.0)) {
    throw InvalidArgument(fmt::format("double_disk: edge angle must be > 0, got {}", edge_angle));
  }
  // Area of one sheet is 2 pi (cosh rho - 1); written with sinh^2(rho/2) to avoid cancellation.
  const double half = std::sinh(0.5 * rho);
  const double S    = 2.0 * 4.0 * kPi * half * half;
  const double M    = edge_angle * 2.0 * kPi * std::sinh(rho);
  return SurfaceData{.S = S, .V = 0.0, .M = M, .sf = SpaceForm{-1.0}};
}

double santalo_excess(double rho, double edge_angle) {
  const auto disk = double_disk(rho, edge_angle);
  return *disk.M - bound_santalo(disk.S, disk.sf);
}

double santalo_violation_threshold(double edge_angle) {
  return find_root_bracketed([edge_angle](double rho) { return santalo_excess(rho, edge_angle); },
                             0.1, 5.0, Tolerance{.abs_tol = 1e-14, .rel_tol = 1e-14, .max_iter = 200});
}

std::optional<double> santalo_threshold_cosh(double edge_angle) {
  const double t2 = edge_angle * edge_angle;
  if (!(t2 < 16.0)) { return std::nullopt; }
  return t2 / (16.0 - t2);
}

}  // namespace hmink
