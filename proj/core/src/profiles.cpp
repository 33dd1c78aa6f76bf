#include "hmink/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

#include "hmink/numerics.hpp"

namespace hmink {

namespace {

constexpr double kPi = std::numbers::pi;

void require_radius(double r, const char* where) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw InvalidArgument(fmt::format("{}: radius must be finite and >= 0, got {}", where, r));
  }
}

// sum_{m} c_m z^(2m), Horner in z^2.
template <std::size_t N>
double even_series(const std::array<double, N>& c, double z) {
  const double z2 = z * z;
  double acc      = 0.0;
  for (std::size_t i = N; i-- > 0;) { acc = acc * z2 + c[i]; }
  return acc;
}

// 1/(2m+1)!, m = 0..4
constexpr std::array<double, 5> kSinhOverZ{1.0, 1.0 / 6.0, 1.0 / 120.0, 1.0 / 5040.0,
                                           1.0 / 362880.0};
// 2^(2m+1)/(2m+1)!, m = 1..5: sinh(2z) - 2z = z^3 * sum
constexpr std::array<double, 5> kVolume{8.0 / 6.0, 32.0 / 120.0, 128.0 / 5040.0, 512.0 / 362880.0,
                                        2048.0 / 39916800.0};
// 2^(2m)/(2m)!, m = 1..5: cosh(2z) - 1 = z^2 * sum
constexpr std::array<double, 5> kArea{4.0 / 2.0, 16.0 / 24.0, 64.0 / 720.0, 256.0 / 40320.0,
                                      1024.0 / 3628800.0};
// 2^(2m+1)/(2m+1)!, m = 0..4: sinh(2z) = z * sum
constexpr std::array<double, 5> kTmc{2.0, 8.0 / 6.0, 32.0 / 120.0, 128.0 / 5040.0,
                                     512.0 / 362880.0};

}  // namespace

SpaceForm::SpaceForm(double a) : a_(a), rate_(0.0) {
  if (!std::isfinite(a) || a > 0.0) {
    throw InvalidArgument(fmt::format("space form curvature must be finite and <= 0, got {}", a));
  }
  rate_ = std::sqrt(-a);
}

namespace detail {

double warp_series(double r, SpaceForm sf) { return r * even_series(kSinhOverZ, sf.rate() * r); }
double warp_closed(double r, SpaceForm sf) {
  return sf.is_euclidean() ? r : std::sinh(sf.rate() * r) / sf.rate();
}

double sphere_volume_series(double r, SpaceForm sf) {
  return kPi * r * r * r * even_series(kVolume, sf.rate() * r);
}
double sphere_volume_closed(double r, SpaceForm sf) {
  if (sf.is_euclidean()) { return 4.0 * kPi / 3.0 * r * r * r; }
  const double k = sf.rate();
  const double z = k * r;
  return 2.0 * kPi * (std::sinh(z) * std::cosh(z) - z) / (k * k * k);
}

double sphere_area_series(double r, SpaceForm sf) {
  return 2.0 * kPi * r * r * even_series(kArea, sf.rate() * r);
}
double sphere_area_closed(double r, SpaceForm sf) {
  if (sf.is_euclidean()) { return 4.0 * kPi * r * r; }
  const double k  = sf.rate();
  const double sh = std::sinh(k * r);
  return 4.0 * kPi * sh * sh / (k * k);
}

double sphere_tmc_series(double r, SpaceForm sf) {
  return 4.0 * kPi * r * even_series(kTmc, sf.rate() * r);
}
double sphere_tmc_closed(double r, SpaceForm sf) {
  if (sf.is_euclidean()) { return 8.0 * kPi * r; }
  const double k = sf.rate();
  const double z = k * r;
  return 8.0 * kPi * std::sinh(z) * std::cosh(z) / k;
}

}  // namespace detail

double warp(double r, SpaceForm sf) {
  require_radius(r, "warp");
  if (sf.is_euclidean()) { return r; }
  return sf.rate() * r < kSeriesThreshold ? detail::warp_series(r, sf) : detail::warp_closed(r, sf);
}

double warp_derivative(double r, SpaceForm sf) {
  require_radius(r, "warp_derivative");
  return sf.is_euclidean() ? 1.0 : std::cosh(sf.rate() * r);
}

double sphere_volume(double r, SpaceForm sf) {
  require_radius(r, "sphere_volume");
  if (sf.is_euclidean()) { return 4.0 * kPi / 3.0 * r * r * r; }
  return sf.rate() * r < kVolumeSeriesThreshold ? detail::sphere_volume_series(r, sf)
                                                : detail::sphere_volume_closed(r, sf);
}

double sphere_area(double r, SpaceForm sf) {
  require_radius(r, "sphere_area");
  if (sf.is_euclidean()) { return 4.0 * kPi * r * r; }
  return sf.rate() * r < kSeriesThreshold ? detail::sphere_area_series(r, sf)
                                          : detail::sphere_area_closed(r, sf);
}

double sphere_tmc(double r, SpaceForm sf) {
  require_radius(r, "sphere_tmc");
  if (sf.is_euclidean()) { return 8.0 * kPi * r; }
  return sf.rate() * r < kSeriesThreshold ? detail::sphere_tmc_series(r, sf)
                                          : detail::sphere_tmc_closed(r, sf);
}

SpherePoint sphere_at(double r, SpaceForm sf) {
  return {.r = r, .volume = sphere_volume(r, sf), .area = sphere_area(r, sf),
          .tmc = sphere_tmc(r, sf)};
}

double radius_from_volume(double x, SpaceForm sf) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw InvalidArgument(fmt::format("radius_from_volume: volume must be >= 0, got {}", x));
  }
  if (x == 0.0) { return 0.0; }
  const double euclidean = std::cbrt(3.0 * x / (4.0 * kPi));
  if (sf.is_euclidean()) { return euclidean; }

  // V_a >= (4 pi / 3) r^3, so the Euclidean radius brackets from above.
  const double hi = std::min(euclidean, 350.0 / sf.rate());
  if (sphere_volume(hi, sf) < x) {
    throw InvalidArgument(fmt::format("radius_from_volume: volume {} not representable", x));
  }
  const Tolerance tol{.abs_tol = std::numeric_limits<double>::min(), .rel_tol = 4e-16,
                      .max_iter = 200};
  return find_root_bracketed([&](double r) { return sphere_volume(r, sf) / x - 1.0; }, 0.0, hi, tol,
                             [&](double r) { return sphere_area(r, sf) / x; });
}

double eta(double x, SpaceForm sf) { return sphere_area(radius_from_volume(x, sf), sf); }

double xi(double x, SpaceForm sf) {
  const double e = eta(x, sf);
  return std::sqrt(std::max(0.0, 16.0 * kPi * e - 4.0 * sf.curvature() * e * e));
}

double eta_deriv(double x, SpaceForm sf) {
  if (!(x > 0.0)) {
    throw InvalidArgument(fmt::format("eta_deriv: profile derivative is unbounded at x = {}", x));
  }
  const double e = eta(x, sf);
  return std::sqrt(16.0 * kPi * e - 4.0 * sf.curvature() * e * e) / e;
}

}  // namespace hmink
