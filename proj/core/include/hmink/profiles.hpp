#pragma once

// Geodesic spheres in the constant-curvature model H^3(a), a <= 0, and the isoperimetric
// profile eta(x) / total-mean-curvature profile xi(x) obtained by parametrizing them by the
// enclosed volume x. a = 0 is Euclidean space.

namespace hmink {

/// The constant sectional curvature a <= 0 of the model space H^3(a).
class SpaceForm {
 public:
  /// Throws InvalidArgument when a > 0 or a is not finite.
  explicit SpaceForm(double a);

  [[nodiscard]] double curvature() const noexcept { return a_; }
  /// sqrt(-a); 0 in the Euclidean case.
  [[nodiscard]] double rate() const noexcept { return rate_; }
  [[nodiscard]] bool is_euclidean() const noexcept { return a_ == 0.0; }

  friend bool operator==(const SpaceForm&, const SpaceForm&) = default;

 private:
  double a_;
  double rate_;
};

struct SpherePoint {
  double r      = 0.0;
  double volume = 0.0;
  double area   = 0.0;
  double tmc    = 0.0;  // total mean curvature, H = trace of the second fundamental form
};

/// Below this value of sqrt(-a) r the area, mean-curvature and warp formulas use Taylor series.
inline constexpr double kSeriesThreshold = 1e-4;
/// The volume formula cancels like (sinh z cosh z - z) ~ z^3, so it keeps the series longer.
inline constexpr double kVolumeSeriesThreshold = 0.1;

/// Warping function phi(r) = sinh(sqrt(-a) r) / sqrt(-a); phi(r) = r when a = 0.
double warp(double r, SpaceForm sf);
/// phi'(r) = cosh(sqrt(-a) r).
double warp_derivative(double r, SpaceForm sf);

double sphere_volume(double r, SpaceForm sf);
double sphere_area(double r, SpaceForm sf);
double sphere_tmc(double r, SpaceForm sf);
SpherePoint sphere_at(double r, SpaceForm sf);

/// Radius of the geodesic ball of volume x. Newton on the volume with derivative equal to the
/// area, bracketed by the Euclidean radius (which is an upper bound for a <= 0).
double radius_from_volume(double x, SpaceForm sf);

/// Isoperimetric profile: area of the geodesic sphere enclosing volume x.
double eta(double x, SpaceForm sf);
/// Total mean curvature profile, evaluated as sqrt(16 pi eta - 4 a eta^2).
double xi(double x, SpaceForm sf);
/// eta'(x) = xi(x) / eta(x); throws InvalidArgument at x <= 0 where eta' is unbounded.
double eta_deriv(double x, SpaceForm sf);

namespace detail {
// Both branches are exposed so the switchover can be tested.
double sphere_volume_series(double r, SpaceForm sf);
double sphere_volume_closed(double r, SpaceForm sf);
double sphere_area_series(double r, SpaceForm sf);
double sphere_area_closed(double r, SpaceForm sf);
double sphere_tmc_series(double r, SpaceForm sf);
double sphere_tmc_closed(double r, SpaceForm sf);
double warp_series(double r, SpaceForm sf);
double warp_closed(double r, SpaceForm sf);
}  // namespace detail

}  // namespace hmink
