#include <cmath>
#include <numbers>

#include <doctest.h>

#include "hmink/numerics.hpp"
#include "hmink/profiles.hpp"
#include "oracles.hpp"

using namespace hmink;
using oracle::rel;

namespace {
constexpr double kPi = std::numbers::pi;
const SpaceForm kH3{-1.0};
const SpaceForm kR3{0.0};
}  // namespace

TEST_CASE("space form") {
  CHECK_THROWS_AS(SpaceForm{0.5}, InvalidArgument);
  CHECK_THROWS_AS(SpaceForm{std::nan("")}, InvalidArgument);
  CHECK(SpaceForm{-4.0}.rate() == 2.0);
  CHECK(kR3.is_euclidean());
}

TEST_CASE("warp") {
  CHECK(warp(0.0, kH3) == 0.0);
  CHECK(warp(1.0, kR3) == 1.0);
  CHECK(warp(1.0, kH3) == doctest::Approx(1.175201).epsilon(1e-6));
  CHECK(rel(warp(1e-3, SpaceForm{-1e-6}), 1e-3) < 1e-12);
  CHECK_THROWS_AS(warp(-1.0, kH3), InvalidArgument);
}

TEST_CASE("unit sphere values") {
  const auto p = sphere_at(1.0, kH3);
  CHECK(rel(p.volume, static_cast<double>(oracle::volume(1, -1))) < 1e-14);
  CHECK(rel(p.area, static_cast<double>(oracle::area(1, -1))) < 1e-14);
  CHECK(rel(p.tmc, static_cast<double>(oracle::tmc(1, -1))) < 1e-14);
  // Rounded values as usually quoted.
  CHECK(p.volume == doctest::Approx(5.11073).epsilon(1e-4));
  CHECK(p.area == doctest::Approx(17.35529).epsilon(1e-4));
  CHECK(p.tmc == doctest::Approx(45.57519).epsilon(1e-4));

  const auto e = sphere_at(1.0, kR3);
  CHECK(e.volume == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
  CHECK(e.area == doctest::Approx(4.0 * kPi).epsilon(1e-15));
  CHECK(e.tmc == doctest::Approx(8.0 * kPi).epsilon(1e-15));

  const auto z = sphere_at(0.0, kH3);
  CHECK(z.volume == 0.0);
  CHECK(z.area == 0.0);
  CHECK(z.tmc == 0.0);
}

TEST_CASE("sphere quantities agree with long double closed forms") {
  for (double a : {0.0, -0.25, -1.0, -4.0}) {
    const SpaceForm sf{a};
    for (double r = 1e-3; r <= 10.0; r *= 1.37) {
      CHECK(rel(sphere_volume(r, sf), static_cast<double>(oracle::volume(r, a))) < 1e-12);
      CHECK(rel(sphere_area(r, sf), static_cast<double>(oracle::area(r, a))) < 1e-12);
      CHECK(rel(sphere_tmc(r, sf), static_cast<double>(oracle::tmc(r, a))) < 1e-12);
    }
  }
}

TEST_CASE("tmc squared identity on spheres") {
  for (double a : {0.0, -0.25, -1.0, -4.0}) {
    const SpaceForm sf{a};
    for (double r : {0.01, 0.5, 1.0, 3.0, 7.0}) {
      const auto p = sphere_at(r, sf);
      CHECK(rel(p.tmc * p.tmc, 16.0 * kPi * p.area - 4.0 * a * p.area * p.area) < 1e-12);
    }
  }
}

TEST_CASE("derivative identities V' = S and S' = M") {
  for (double a : {0.0, -0.25, -1.0, -4.0}) {
    const SpaceForm sf{a};
    for (int i = 1; i <= 100; ++i) {
      const double r = 0.1 * i;
      const double h = 1e-5 * std::max(r, 0.1);
      const double dV = derivative_fd([&](double x) { return sphere_volume(x, sf); }, r, h);
      const double dS = derivative_fd([&](double x) { return sphere_area(x, sf); }, r, h);
      CHECK(rel(dV, sphere_area(r, sf)) < 1e-6);
      CHECK(rel(dS, sphere_tmc(r, sf)) < 1e-6);
    }
  }
}

TEST_CASE("series and closed branches agree") {
  for (double a : {-0.25, -1.0, -4.0}) {
    const SpaceForm sf{a};
    const double k = sf.rate();
    for (double z = 1e-6; z <= 1e-4; z *= 1.6) {
      const double r = z / k;
      CHECK(rel(detail::warp_series(r, sf), detail::warp_closed(r, sf)) < 1e-12);
      CHECK(rel(detail::sphere_area_series(r, sf), detail::sphere_area_closed(r, sf)) < 1e-12);
      CHECK(rel(detail::sphere_tmc_series(r, sf), detail::sphere_tmc_closed(r, sf)) < 1e-12);
    }
    // The closed volume form loses about eps/z^2 to cancellation, so compare where both hold.
    for (double z = 0.05; z <= 0.1; z += 0.005) {
      const double r = z / k;
      CHECK(rel(detail::sphere_volume_series(r, sf), detail::sphere_volume_closed(r, sf)) < 1e-12);
    }
    for (double z = 1e-6; z <= 1e-1; z *= 1.7) {
      const double r = z / k;
      CHECK(rel(detail::sphere_volume_series(r, sf), static_cast<double>(oracle::volume(r, a))) < 1e-14);
    }
  }
}

TEST_CASE("radius from volume") {
  CHECK(radius_from_volume(0.0, kH3) == 0.0);
  CHECK(radius_from_volume(sphere_volume(1.0, kH3), kH3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(radius_from_volume(5.11073, kH3) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(radius_from_volume(4.0 * kPi / 3.0, kR3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(radius_from_volume(-1.0, kH3), InvalidArgument);
  for (double a : {-0.25, -1.0, -4.0}) {
    for (double x = 1e-9; x < 1e4; x *= 3.1) {
      CHECK(rel(radius_from_volume(x, SpaceForm{a}), static_cast<double>(oracle::radius(x, a))) < 1e-12);
    }
  }
}

TEST_CASE("profiles eta and xi") {
  const double v1 = sphere_volume(1.0, kH3);
  CHECK(eta(0.0, kH3) == 0.0);
  CHECK(xi(0.0, kH3) == 0.0);
  CHECK(rel(eta(v1, kH3), sphere_area(1.0, kH3)) < 1e-13);
  CHECK(rel(xi(v1, kH3), sphere_tmc(1.0, kH3)) < 1e-8);
  CHECK(eta(5.11073, kH3) == doctest::Approx(17.35529).epsilon(1e-4));
  const double ball = 4.0 * kPi / 3.0;
  CHECK(eta(ball, kR3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(eta(ball, kR3) == doctest::Approx(std::cbrt(36.0 * kPi) * std::pow(ball, 2.0 / 3.0)).epsilon(1e-14));
  CHECK(xi(ball, kR3) == doctest::Approx(8.0 * kPi).epsilon(1e-14));
}

TEST_CASE("profile identities on (0, 100]") {
  for (double a : {0.0, -0.25, -1.0, -4.0}) {
    const SpaceForm sf{a};
    for (int i = 1; i <= 200; ++i) {
      const double x = 0.5 * i;
      const double e = eta(x, sf);
      const double q = xi(x, sf);
      CHECK(rel(q * q, 16.0 * kPi * e - 4.0 * a * e * e) < 1e-10);
      CHECK(rel(eta_deriv(x, sf) * e, q) < 1e-10);
      // Second route: M of the sphere with volume x.
      CHECK(rel(q, static_cast<double>(oracle::xi(x, a))) < 1e-10);
    }
  }
}

TEST_CASE("eta derivative") {
  const double v1 = sphere_volume(1.0, kH3);
  CHECK(rel(eta_deriv(v1, kH3), sphere_tmc(1.0, kH3) / sphere_area(1.0, kH3)) < 1e-12);
  CHECK(eta_deriv(5.11073, kH3) == doctest::Approx(45.57519 / 17.35529).epsilon(1e-4));
  CHECK(eta_deriv(4.0 * kPi / 3.0, kR3) == doctest::Approx(2.0).epsilon(1e-14));
  const double fd = derivative_fd([](double x) { return eta(x, kH3); }, 5.11073, 1e-5);
  CHECK(rel(fd, eta_deriv(5.11073, kH3)) < 1e-5);
  CHECK_THROWS_AS(eta_deriv(0.0, kH3), InvalidArgument);
}

TEST_CASE("hyperbolic sphere has more area than the Euclidean one at equal volume") {
  for (double x = 0.01; x <= 100.0; x *= 1.3) { CHECK(eta(x, kH3) >= eta(x, kR3)); }
}

TEST_CASE("small-radius limit is Euclidean") {
  const double r = 1e-6;
  CHECK(rel(sphere_volume(r, kH3), 4.0 * kPi / 3.0 * r * r * r) < 1e-11);
  CHECK(rel(sphere_area(r, kH3), 4.0 * kPi * r * r) < 1e-11);
  CHECK(rel(sphere_tmc(r, kH3), 8.0 * kPi * r) < 1e-11);
}
