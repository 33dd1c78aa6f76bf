#include <algorithm>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "hmink/hmcf.hpp"
#include "hmink/inequalities.hpp"
#include "oracles.hpp"

using namespace hmink;
using oracle::rel;

namespace {
constexpr double kPi = std::numbers::pi;
const SpaceForm kH3{-1.0};
const SpaceForm kR3{0.0};

double max_dev(std::span<const double> xs, double ref) {
  double m = 0.0;
  for (double x : xs) { m = std::max(m, std::abs(x - ref)); }
  return m;
}

double gb_residual(const GeometricMeasures& m, SpaceForm sf) {
  const double g = 4.0 * kPi - sf.curvature() * m.S;
  return std::abs(m.totG - g) / g;
}

FlowTrace reversed(const FlowTrace& t) {
  FlowTrace r = t;
  auto flip = [](auto& v) { std::reverse(v.begin(), v.end()); };
  flip(r.measures);
  flip(r.phi1);
  flip(r.phi2);
  flip(r.phiInf);
  flip(r.kappa_min);
  flip(r.total_speed);
  for (std::size_t k = 1; k < r.size(); ++k) {
    const auto& a = r.measures[k - 1];
    const auto& b = r.measures[k];
    const double dt = r.times[k] - r.times[k - 1];
    r.dS_residual[k] = std::abs((b.S - a.S) / dt + 0.5 * (a.totG + b.totG));
    r.dV_residual[k] = std::abs((b.V - a.V) / dt + 0.5 * (r.total_speed[k] + r.total_speed[k - 1]));
  }
  return r;
}
}  // namespace

TEST_CASE("surface construction") {
  CHECK_THROWS_AS(AxisymmetricSurface(kH3, {1.0, 1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(AxisymmetricSurface(kH3, {1.0, 1.0, -1.0, 1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(make_sphere(1.0, kH3, 63), InvalidArgument);
  CHECK_THROWS_AS(make_sphere(0.0, kH3, 64), InvalidArgument);
  const auto s = make_sphere(1.0, kH3, 256);
  CHECK(s.size() == 256);
  CHECK(s.us().front() == 0.0);
  CHECK(s.us().back() == kPi);
  CHECK(max_dev(s.rhos(), 1.0) == 0.0);
}

TEST_CASE("sphere curvatures") {
  for (double r0 : {0.3, 1.0, 2.5}) {
    const auto c = principal_curvatures(make_sphere(r0, kH3, 256));
    const double k = 1.0 / std::tanh(r0);
    CHECK(max_dev(c.meridian, k) <= 1e-8);
    CHECK(max_dev(c.rotational, k) <= 1e-8);
    const auto e = principal_curvatures(make_sphere(r0, kR3, 128));
    CHECK(max_dev(e.meridian, 1.0 / r0) <= 1e-12);
    CHECK(max_dev(e.rotational, 1.0 / r0) <= 1e-12);
  }
  CHECK(1.0 / std::tanh(1.0) == doctest::Approx(1.31304).epsilon(1e-5));
}

TEST_CASE("sphere measures") {
  const auto m = measure(make_sphere(1.0, kH3, 256));
  CHECK(rel(m.S, static_cast<double>(oracle::area(1, -1))) <= 1e-6);
  CHECK(rel(m.V, static_cast<double>(oracle::volume(1, -1))) <= 1e-6);
  CHECK(rel(m.M, static_cast<double>(oracle::tmc(1, -1))) <= 1e-6);
  CHECK(rel(m.totG, 4.0 * kPi * std::cosh(1.0) * std::cosh(1.0)) <= 1e-6);
  CHECK(rel(m.M, m.S * 2.0 / std::tanh(1.0)) <= 1e-9);
  CHECK(m.S == doctest::Approx(17.35529).epsilon(1e-4));
  CHECK(m.V == doctest::Approx(5.11073).epsilon(1e-4));
  CHECK(m.M == doctest::Approx(45.57519).epsilon(1e-4));
  CHECK(m.totG == doctest::Approx(29.9223).epsilon(1e-4));

  const auto e = measure(make_sphere(1.0, kR3, 256));
  CHECK(rel(e.S, 4.0 * kPi) <= 1e-9);
  CHECK(rel(e.V, 4.0 * kPi / 3.0) <= 1e-9);
  CHECK(rel(e.M, 8.0 * kPi) <= 1e-9);
  CHECK(rel(e.totG, 4.0 * kPi) <= 1e-9);

  const double r = 1e-6;
  const auto tiny = measure(make_sphere(r, kH3, 256));
  CHECK(rel(tiny.S, 4.0 * kPi * r * r) <= 1e-4);
  CHECK(rel(tiny.V, 4.0 * kPi / 3.0 * r * r * r) <= 1e-4);
  CHECK(rel(tiny.M, 8.0 * kPi * r) <= 1e-4);
}

TEST_CASE("perturbed sphere") {
  const auto same = make_perturbed_sphere(1.0, 0.0, 2, kH3, 256);
  CHECK(max_dev(same.rhos(), 1.0) == 0.0);
  const auto p = make_perturbed_sphere(1.0, 0.05, 2, kH3, 256);
  CHECK(rel(measure(p).S, sphere_area(1.0, kH3)) < 0.01);
  CHECK(p.rhos()[0] == doctest::Approx(1.05));
  try {
    make_perturbed_sphere(1.0, 0.9, 2, kH3, 256);
    FAIL("expected a convexity error");
  } catch (const ConvexityError& e) {
    CHECK(std::string(e.what()).find("node") != std::string::npos);
    CHECK(e.node() < 256);
  }
  CHECK_THROWS_AS(make_perturbed_sphere(1.0, 0.05, 1, kH3, 256), InvalidArgument);
}

TEST_CASE("Gauss-Bonnet on many surfaces") {
  for (double a : {0.0, -0.25, -1.0, -4.0}) {
    const SpaceForm sf{a};
    for (int mode : {2, 3, 4}) {
      for (double eps : {-0.04, 0.03, 0.06}) {
        const auto s = make_perturbed_sphere(0.8, eps, mode, sf, 512);
        CHECK(gb_residual(measure(s), sf) <= 1e-6);
      }
    }
  }
}

TEST_CASE("flow speed") {
  const auto f = hmcf_speed(make_sphere(1.0, kH3, 256));
  CHECK(max_dev(f, 0.5 / std::tanh(1.0)) <= 1e-8);
  CHECK(f[17] == doctest::Approx(0.65652).epsilon(1e-5));
  CHECK(max_dev(hmcf_speed(make_sphere(2.0, kR3, 128)), 0.25) <= 1e-12);

  const auto p = make_perturbed_sphere(1.0, 0.08, 4, kH3, 256);
  const auto c = principal_curvatures(p);
  const auto g = hmcf_speed(p);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(g[k] > 0.0);
    CHECK(g[k] <= std::min(c.meridian[k], c.rotational[k]));
  }
  CHECK(rel(total_speed(make_sphere(1.0, kH3, 256)), 0.5 / std::tanh(1.0) * sphere_area(1.0, kH3)) < 1e-8);
}

TEST_CASE("time step") {
  const auto s = make_sphere(1.0, kH3, 256);
  CHECK(max_dev(hmcf_step(s, 0.0).rhos(), 1.0) == 0.0);
  const auto n = hmcf_step(s, 1e-4);
  const double first_order = 1.0 - 1e-4 * 0.5 / std::tanh(1.0);
  CHECK(max_dev(n.rhos(), n.rhos()[0]) <= 1e-10);
  CHECK(std::abs(n.rhos()[0] - first_order) <= 1e-7);
  CHECK(std::abs(n.rhos()[0] - static_cast<double>(oracle::sphere_flow_radius(1, -1, 1e-4, 100))) <= 1e-14);

  CHECK_THROWS_AS(hmcf_step(s, 10.0 * stable_time_step(s)), StabilityError);
  CHECK_THROWS_AS(hmcf_step(s, -1.0), InvalidArgument);

  // Ghost reflection keeps the grid symmetric about each pole.
  auto p = make_perturbed_sphere(1.0, 0.05, 2, kH3, 256);
  const double h = p.spacing();
  for (int i = 0; i < 50; ++i) { p = hmcf_step(p, 1e-4); }
  const auto r = p.rhos();
  CHECK(std::abs(r[1] - r[0]) / h <= 0.2 * h);
  CHECK(std::abs(r[r.size() - 1] - r[r.size() - 2]) / h <= 0.2 * h);
}

TEST_CASE("stability limit behaves like h^2") {
  const double a = stable_time_step(make_sphere(1.0, kH3, 129));
  const double b = stable_time_step(make_sphere(1.0, kH3, 257));
  CHECK(a / b == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("sphere flow closed form") {
  CHECK(sphere_flow_exact(1.0, kH3, 0.5) == doctest::Approx(std::acosh(std::cosh(1.0) * std::exp(-0.25))).epsilon(1e-14));
  CHECK(sphere_flow_exact(1.0, kH3, 0.5) == doctest::Approx(0.625).epsilon(1e-4));
  CHECK(sphere_collapse_time(1.0, kH3) == doctest::Approx(2.0 * std::log(std::cosh(1.0))).epsilon(1e-15));
  CHECK(sphere_collapse_time(1.0, kH3) == doctest::Approx(0.867562).epsilon(1e-6));
  CHECK(sphere_flow_exact(1.0, kR3, 0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(sphere_flow_exact(1.0, kH3, 0.9), InvalidArgument);
  CHECK_THROWS_AS(sphere_flow_exact(1.0, kR3, 1.0), InvalidArgument);
  for (double a : {-0.25, -1.0, -4.0}) {
    for (double t : {0.05, 0.2}) {
      CHECK(rel(sphere_flow_exact(1.0, SpaceForm{a}, t), static_cast<double>(oracle::sphere_flow_radius(1, a, t))) < 1e-12);
    }
  }
}

TEST_CASE("sphere flow run") {
  FlowConfig cfg;
  const auto res = run_flow(make_sphere(1.0, kH3, 256), cfg);
  const auto& tr = res.trace;
  CHECK(tr.stop_reason == "t_max");
  CHECK(tr.times.back() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(max_dev(res.final_surface.rhos(), sphere_flow_exact(1.0, kH3, 0.4)) <= 1e-4);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double M = tr.measures[k].M;
    CHECK(std::abs(tr.phiInf[k]) <= 1e-6 * M * M);
    CHECK(gb_residual(tr.measures[k], kH3) <= 1e-6);
  }
  const auto audit = monotone_audit(tr);
  CHECK(audit.passed);
  CHECK(audit.max_rise_phiInf <= 1e-6 * tr.measures.front().M * tr.measures.front().M);

  const auto back = monotone_audit(reversed(tr));
  CHECK_FALSE(back.passed);
  CHECK_FALSE(back.phi_monotone);
}

TEST_CASE("stop radius") {
  FlowConfig cfg;
  cfg.dt          = 2e-4;
  cfg.t_max       = 0.8;
  cfg.stop_radius = 0.6;
  const auto res = run_flow(make_sphere(1.0, kH3, 128), cfg);
  CHECK(res.trace.stop_reason == "stop_radius");
  CHECK(res.final_surface.rho_max() < 0.6);
  CHECK(res.trace.times.back() < 0.8);
}

TEST_CASE("flow failure carries the partial trace") {
  FlowConfig cfg;
  cfg.dt = 1e-2;  // far above the stability limit on 256 nodes
  try {
    run_flow(make_sphere(1.0, kH3, 256), cfg);
    FAIL("expected FlowError");
  } catch (const FlowError& e) {
    CHECK(e.trace().size() >= 1);
    CHECK(e.last_surface().size() == 256);
  }
}

TEST_CASE("flow config validation") {
  FlowConfig c;
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c        = {};
  c.n_grid = 32;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c              = {};
  c.record_every = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("normal offset") {
  const auto s = normal_offset_check(make_sphere(1.0, kH3, 256), 1e-4);
  CHECK(s.dS_rel <= 1e-3);
  const auto e = normal_offset_check(make_sphere(1.0, kR3, 256), 1e-4);
  CHECK(e.dV_rel <= 1e-3);
  // Direct comparison with the closed form at radius 1 + eps.
  const double eps = 1e-4;
  CHECK(rel((sphere_area(1.0 + eps, kH3) - sphere_area(1.0 - eps, kH3)) / (2 * eps), sphere_tmc(1.0, kH3)) < 1e-7);
  const auto p = normal_offset_check(make_perturbed_sphere(1.0, 0.05, 2, kH3, 512), 1e-4);
  CHECK(p.dS_rel <= 5e-3);
  CHECK(p.dV_rel <= 5e-3);
  CHECK_THROWS_AS(normal_offset_check(make_sphere(1.0, kH3, 256), 0.1), InvalidArgument);
}

TEST_CASE("audit needs three records") {
  FlowConfig cfg;
  cfg.t_max        = 2e-4;
  cfg.record_every = 10;
  const auto res = run_flow(make_sphere(1.0, kH3, 128), cfg);
  CHECK(res.trace.size() == 2);
  CHECK_THROWS_AS(monotone_audit(res.trace), InvalidArgument);
}
