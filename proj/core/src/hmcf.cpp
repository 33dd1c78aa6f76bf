#include "hmink/hmcf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

#include "hmink/inequalities.hpp"
#include "hmink/q_iteration.hpp"

namespace hmink {

namespace {

constexpr double kPi = std::numbers::pi;
// |lambda| h^2 of the fourth-order second-difference stencil is at most 16/3.
constexpr double kStencilBound = 16.0 / 3.0;
constexpr double kStiffnessPad = 1.25;
// Real-axis stability interval of classical RK4.
constexpr double kRk4Limit = 2.78;

struct Derivs {
  std::vector<double> d1;
  std::vector<double> d2;
};

// Fourth-order central differences; ghost values mirror rho across u = 0 and u = pi.
Derivs derivatives(std::span<const double> rho, double h) {
  const auto n  = static_cast<std::ptrdiff_t>(rho.size());
  auto at = [&](std::ptrdiff_t i) {
    if (i < 0) { i = -i; }
    if (i > n - 1) { i = 2 * (n - 1) - i; }
    return rho[static_cast<std::size_t>(i)];
  };
  Derivs d{std::vector<double>(rho.size()), std::vector<double>(rho.size())};
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double p1 = at(i + 1), m1 = at(i - 1), p2 = at(i + 2), m2 = at(i - 2);
    const auto k    = static_cast<std::size_t>(i);
    d.d1[k]         = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
    d.d2[k]         = (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * rho[k]) / (12.0 * h * h);
  }
  d.d1.front() = 0.0;
  d.d1.back()  = 0.0;
  return d;
}

// Everything pointwise that the flow and the measures need.
struct Pointwise {
  std::vector<double> k1, k2, v, dmu, phi;
};

Pointwise pointwise(std::span<const double> rho, SpaceForm sf, double h) {
  const std::size_t n = rho.size();
  const auto d        = derivatives(rho, h);
  Pointwise p{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
              std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const double u   = static_cast<double>(k) * h;
    const double f   = warp(rho[k], sf);
    const double fp  = warp_derivative(rho[k], sf);
    const double r1  = d.d1[k];
    const double r2  = d.d2[k];
    const double v   = std::sqrt(1.0 + r1 * r1 / (f * f));
    const double cot = (k == 0 || k + 1 == n) ? r2 : r1 / std::tan(u);
    p.k1[k]  = (f * fp + 2.0 * fp * r1 * r1 / f - r2) / (v * (r1 * r1 + f * f));
    p.k2[k]  = (fp / f - cot / (f * f)) / v;
    // sin(pi) is not exactly zero in floating point; the pole weight is.
    const double s = (k == 0 || k + 1 == n) ? 0.0 : std::sin(u);
    p.dmu[k] = 2.0 * kPi * f * s * std::sqrt(r1 * r1 + f * f);
    p.v[k]   = v;
    p.phi[k] = f;
    if (!std::isfinite(p.k1[k]) || !std::isfinite(p.k2[k])) {
      throw NonFiniteValue(fmt::format("non-finite curvature at node {} (rho = {})", k, rho[k]));
    }
  }
  return p;
}

void check_convex(const Pointwise& p, std::span<const double> rho, double h,
                  std::optional<AxisymmetricSurface> last_valid = std::nullopt) {
  for (std::size_t k = 0; k < p.k1.size(); ++k) {
    if (!(p.k1[k] > 0.0) || !(p.k2[k] > 0.0)) {
      throw ConvexityError(
          fmt::format("surface not strictly convex at node {} (u = {:.6g}, rho = {:.6g}, "
                      "kappa_1 = {:.6g}, kappa_2 = {:.6g})",
                      k, static_cast<double>(k) * h, rho[k], p.k1[k], p.k2[k]),
          k, std::move(last_valid));
    }
  }
}

std::vector<double> speed_from(const Pointwise& p, std::span<const double> rho) {
  std::vector<double> f(p.k1.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double H = p.k1[k] + p.k2[k];
    if (!(H > 0.0)) {
      throw ConvexityError(
          fmt::format("mean curvature {} <= 0 at node {} (rho = {})", H, k, rho[k]), k);
    }
    f[k] = p.k1[k] * p.k2[k] / H;
  }
  return f;
}

double stiffness(const Pointwise& p, double h) {
  double w = 0.0;
  for (std::size_t k = 0; k < p.k1.size(); ++k) {
    const double H   = p.k1[k] + p.k2[k];
    const double c   = p.k2[k] / H;
    const double pv  = p.phi[k] * p.v[k];
    w = std::max(w, c * c / (pv * pv));
  }
  return kStiffnessPad * kStencilBound / (h * h) * w;
}

GeometricMeasures measure_from(const Pointwise& p, std::span<const double> rho, SpaceForm sf,
                               double h) {
  const std::size_t n = rho.size();
  std::vector<double> m(n), g(n), vol(n);
  for (std::size_t k = 0; k < n; ++k) {
    m[k] = p.dmu[k] * (p.k1[k] + p.k2[k]);
    g[k] = p.dmu[k] * p.k1[k] * p.k2[k];
    const double s = (k == 0 || k + 1 == n) ? 0.0 : std::sin(static_cast<double>(k) * h);
    vol[k] = s * sphere_volume(rho[k], sf);
  }
  return {.S = simpson_uniform(p.dmu, h), .V = 0.5 * simpson_uniform(vol, h),
          .M = simpson_uniform(m, h), .totG = simpson_uniform(g, h)};
}

}  // namespace

// ---------------------------------------------------------------------------------------------

AxisymmetricSurface::AxisymmetricSurface(SpaceForm sf, std::vector<double> rhos)
    : sf_(sf), rhos_(std::move(rhos)) {
  if (rhos_.size() < 5) {
    throw InvalidArgument(fmt::format("surface needs at least 5 nodes, got {}", rhos_.size()));
  }
  for (std::size_t k = 0; k < rhos_.size(); ++k) {
    if (!(rhos_[k] > 0.0) || !std::isfinite(rhos_[k])) {
      throw InvalidArgument(fmt::format("rho must be finite and > 0, node {} has {}", k, rhos_[k]));
    }
  }
}

std::vector<double> AxisymmetricSurface::us() const {
  std::vector<double> u(size());
  for (std::size_t k = 0; k < u.size(); ++k) { u[k] = static_cast<double>(k) * spacing(); }
  u.back() = kPi;
  return u;
}

double AxisymmetricSurface::spacing() const noexcept {
  return kPi / static_cast<double>(rhos_.size() - 1);
}

double AxisymmetricSurface::rho_max() const { return *std::ranges::max_element(rhos_); }
double AxisymmetricSurface::rho_min() const { return *std::ranges::min_element(rhos_); }

AxisymmetricSurface make_sphere(double r0, SpaceForm sf, std::size_t n) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) {
    throw InvalidArgument(fmt::format("sphere radius must be > 0, got {}", r0));
  }
  if (n < 64) { throw InvalidArgument(fmt::format("need n >= 64 grid nodes, got {}", n)); }
  return {sf, std::vector<double>(n, r0)};
}

AxisymmetricSurface make_perturbed_sphere(double r0, double eps, int mode, SpaceForm sf,
                                          std::size_t n) {
  if (mode < 2) { throw InvalidArgument(fmt::format("mode must be >= 2, got {}", mode)); }
  if (!std::isfinite(eps)) { throw InvalidArgument("eps must be finite"); }
  auto base = make_sphere(r0, sf, n);
  const double h = base.spacing();
  std::vector<double> rho(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double c = k + 1 == n ? -1.0 : std::cos(static_cast<double>(k) * h);
    rho[k] = r0 * (1.0 + eps * std::legendre(static_cast<unsigned>(mode), c));
    if (!(rho[k] > 0.0)) {
      throw ConvexityError(fmt::format("perturbation makes rho = {} <= 0 at node {}", rho[k], k),
                           k);
    }
  }
  AxisymmetricSurface surf(sf, std::move(rho));
  require_strictly_convex(surf);
  return surf;
}

PrincipalCurvatures principal_curvatures(const AxisymmetricSurface& surf) {
  auto p = pointwise(surf.rhos(), surf.space_form(), surf.spacing());
  return {std::move(p.k1), std::move(p.k2)};
}

void require_strictly_convex(const AxisymmetricSurface& surf) {
  check_convex(pointwise(surf.rhos(), surf.space_form(), surf.spacing()), surf.rhos(),
               surf.spacing());
}

GeometricMeasures measure(const AxisymmetricSurface& surf) {
  const double h = surf.spacing();
  return measure_from(pointwise(surf.rhos(), surf.space_form(), h), surf.rhos(),
                      surf.space_form(), h);
}

std::vector<double> hmcf_speed(const AxisymmetricSurface& surf) {
  return speed_from(pointwise(surf.rhos(), surf.space_form(), surf.spacing()), surf.rhos());
}

double total_speed(const AxisymmetricSurface& surf) {
  const double h = surf.spacing();
  const auto p   = pointwise(surf.rhos(), surf.space_form(), h);
  auto f         = speed_from(p, surf.rhos());
  for (std::size_t k = 0; k < f.size(); ++k) { f[k] *= p.dmu[k]; }
  return simpson_uniform(f, h);
}

double stable_time_step(const AxisymmetricSurface& surf) {
  const double h = surf.spacing();
  const auto p   = pointwise(surf.rhos(), surf.space_form(), h);
  return kRk4Limit / stiffness(p, h);
}

AxisymmetricSurface hmcf_step(const AxisymmetricSurface& surf, double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw InvalidArgument(fmt::format("time step must be finite and >= 0, got {}", dt));
  }
  if (dt == 0.0) { return surf; }
  const double dt_max = stable_time_step(surf);
  if (dt > dt_max) {
    throw StabilityError(
        fmt::format("dt = {:.3g} exceeds the stability limit {:.3g} on {} nodes; reduce dt", dt,
                    dt_max, surf.size()),
        dt_max);
  }
  const SpaceForm sf = surf.space_form();
  const double h     = surf.spacing();
  const OdeRhs rhs   = [&](double, std::span<const double> rho) {
    for (std::size_t k = 0; k < rho.size(); ++k) {
      if (!(rho[k] > 0.0)) {
        throw ConvexityError(fmt::format("rho reached {} at node {} inside a step", rho[k], k), k);
      }
    }
    const auto p = pointwise(rho, sf, h);
    auto f       = speed_from(p, rho);
    for (std::size_t k = 0; k < f.size(); ++k) { f[k] = -f[k] * p.v[k]; }
    return f;
  };
  std::vector<double> next;
  try {
    next = ode_advance(rhs, surf.rhos(), 0.0, dt);
  } catch (const ConvexityError& e) {
    throw ConvexityError(e.what(), e.node(), surf);
  }
  for (std::size_t k = 0; k < next.size(); ++k) {
    if (!(next[k] > 0.0)) {
      throw ConvexityError(fmt::format("rho reached {} at node {}", next[k], k), k, surf);
    }
  }
  AxisymmetricSurface out(sf, std::move(next));
  check_convex(pointwise(out.rhos(), sf, h), out.rhos(), h, surf);
  return out;
}

double sphere_collapse_time(double r0, SpaceForm sf) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) {
    throw InvalidArgument(fmt::format("sphere radius must be > 0, got {}", r0));
  }
  if (sf.is_euclidean()) { return r0 * r0; }
  return -(2.0 / sf.curvature()) * std::log(std::cosh(sf.rate() * r0));
}

double sphere_flow_exact(double r0, SpaceForm sf, double t) {
  const double T = sphere_collapse_time(r0, sf);
  if (!(t >= 0.0) || !(t < T)) {
    throw InvalidArgument(
        fmt::format("t = {} outside [0, T) with collapse time T = {}; the sphere has shrunk to a "
                    "point",
                    t, T));
  }
  if (sf.is_euclidean()) { return std::sqrt(r0 * r0 - t); }
  const double k = sf.rate();
  return std::acosh(std::cosh(k * r0) * std::exp(sf.curvature() * t / 2.0)) / k;
}

// ---------------------------------------------------------------------------------------------

void FlowConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) { throw InvalidArgument(fmt::format("dt must be > 0, got {}", dt)); }
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw InvalidArgument(fmt::format("t_max must be > 0, got {}", t_max));
  }
  if (!(stop_radius > 0.0)) {
    throw InvalidArgument(fmt::format("stop_radius must be > 0, got {}", stop_radius));
  }
  if (record_every < 1) {
    throw InvalidArgument(fmt::format("record_every must be >= 1, got {}", record_every));
  }
  if (n_grid < 64) { throw InvalidArgument(fmt::format("n_grid must be >= 64, got {}", n_grid)); }
  if (phi_grid_points < 16) {
    throw InvalidArgument(fmt::format("phi_grid_points must be >= 16, got {}", phi_grid_points));
  }
}

namespace {

// P_1 and P_2 sampled on a graded volume grid covering the initial volume.
struct PTables {
  GridFunction p1;
  GridFunction p2;
};

PTables make_p_tables(SpaceForm sf, double v0, int points) {
  IterationConfig cfg;
  cfg.sf       = sf;
  cfg.x_max    = 1.05 * v0;
  cfg.n_points = static_cast<std::size_t>(points);
  const auto profile = make_profile_grid(cfg);
  const auto q1g     = q1(profile);
  const auto q2g     = next_q(q1g, profile);
  return {p_from_q(q1g, sf), p_from_q(q2g, sf)};
}

void record(FlowTrace& tr, double t, const AxisymmetricSurface& s, const PTables& pt) {
  const SpaceForm sf = s.space_form();
  const double a     = sf.curvature();
  const double h     = s.spacing();
  const auto p       = pointwise(s.rhos(), sf, h);
  const auto m       = measure_from(p, s.rhos(), sf, h);
  auto f             = speed_from(p, s.rhos());
  for (std::size_t k = 0; k < f.size(); ++k) { f[k] *= p.dmu[k]; }
  const double fint = simpson_uniform(f, h);
  if (m.V > pt.p1.x_max()) {
    throw Error(fmt::format("volume {} left the P table range [0, {}]", m.V, pt.p1.x_max()));
  }
  const double base = m.M * m.M - 16.0 * kPi * m.S + 2.0 * a * m.S * m.S;
  const double e    = eta(m.V, sf);
  double kmin       = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.k1.size(); ++k) { kmin = std::min({kmin, p.k1[k], p.k2[k]}); }

  if (tr.times.empty()) {
    tr.dS_residual.push_back(0.0);
    tr.dV_residual.push_back(0.0);
  } else {
    const double dt   = t - tr.times.back();
    const auto& prev  = tr.measures.back();
    const double dSdt = (m.S - prev.S) / dt;
    const double dVdt = (m.V - prev.V) / dt;
    tr.dS_residual.push_back(std::abs(dSdt + 0.5 * (m.totG + prev.totG)));
    tr.dV_residual.push_back(std::abs(dVdt + 0.5 * (fint + tr.total_speed.back())));
  }
  tr.times.push_back(t);
  tr.measures.push_back(m);
  tr.phi1.push_back(base - pt.p1.interpolate(m.V, 3));
  tr.phi2.push_back(base - pt.p2.interpolate(m.V, 3));
  tr.phiInf.push_back(base + 2.0 * a * e * e);
  tr.phiInf_unsquared.push_back(base + 2.0 * a * e);
  tr.kappa_min.push_back(kmin);
  tr.total_speed.push_back(fint);
  tr.rho_max.push_back(s.rho_max());
  tr.rho_min.push_back(s.rho_min());
}

}  // namespace

FlowResult run_flow(const AxisymmetricSurface& surf, const FlowConfig& cfg) {
  cfg.validate();
  if (surf.size() < 64) {
    throw InvalidArgument(fmt::format("flow needs at least 64 nodes, got {}", surf.size()));
  }
  require_strictly_convex(surf);

  const SpaceForm sf = surf.space_form();
  const auto tables  = make_p_tables(sf, measure(surf).V, cfg.phi_grid_points);

  FlowTrace tr;
  tr.sf = sf;
  tr.dt = cfg.dt;
  tr.h  = surf.spacing();
  record(tr, 0.0, surf, tables);

  AxisymmetricSurface cur = surf;
  double t                = 0.0;
  long step               = 0;
  bool recorded           = true;
  while (true) {
    if (t >= cfg.t_max * (1.0 - 1e-12)) {
      tr.stop_reason = "t_max";
      break;
    }
    if (cur.rho_max() < cfg.stop_radius) {
      tr.stop_reason = "stop_radius";
      break;
    }
    const double t_next = std::min(static_cast<double>(step + 1) * cfg.dt, cfg.t_max);
    try {
      cur = hmcf_step(cur, t_next - t);
    } catch (const Error& e) {
      if (!recorded) { record(tr, t, cur, tables); }
      tr.stop_reason = "failure";
      throw FlowError(fmt::format("flow failed at t = {}: {}", t, e.what()), std::move(tr), cur);
    }
    ++step;
    t        = t_next;
    recorded = false;
    if (step % cfg.record_every == 0) {
      record(tr, t, cur, tables);
      recorded = true;
    }
  }
  if (!recorded) { record(tr, t, cur, tables); }
  return {std::move(tr), std::move(cur)};
}

OffsetResidual normal_offset_check(const AxisymmetricSurface& surf, double eps) {
  if (!(eps > 0.0) || eps > 1e-3) {
    throw InvalidArgument(fmt::format("offset eps must lie in (0, 1e-3], got {}", eps));
  }
  const SpaceForm sf = surf.space_form();
  const double h     = surf.spacing();
  const auto p       = pointwise(surf.rhos(), sf, h);
  std::vector<double> out(surf.size()), in(surf.size());
  for (std::size_t k = 0; k < surf.size(); ++k) {
    out[k] = surf.rhos()[k] + eps * p.v[k];
    in[k]  = surf.rhos()[k] - eps * p.v[k];
  }
  const auto m0 = measure_from(p, surf.rhos(), sf, h);
  const auto mp = measure(AxisymmetricSurface(sf, std::move(out)));
  const auto mm = measure(AxisymmetricSurface(sf, std::move(in)));
  return {.dS_rel = std::abs((mp.S - mm.S) / (2.0 * eps) - m0.M) / m0.M,
          .dV_rel = std::abs((mp.V - mm.V) / (2.0 * eps) - m0.S) / m0.S};
}

AuditReport monotone_audit(const FlowTrace& tr, const AuditTolerances& tol) {
  if (tr.size() < 3) {
    throw InvalidArgument(fmt::format("audit needs at least 3 records, got {}", tr.size()));
  }
  AuditReport r;
  const double m0     = tr.measures.front().M;
  const double scheme = tol.phi_scheme * (tr.dt + tr.h * tr.h) * m0 * m0;
  auto max_rise = [](const std::vector<double>& phi) {
    double rise = 0.0;
    for (std::size_t k = 1; k < phi.size(); ++k) { rise = std::max(rise, phi[k] - phi[k - 1]); }
    return rise;
  };
  r.tau_phi1        = tol.phi_rel * std::abs(tr.phi1.front()) + scheme;
  r.tau_phi2        = tol.phi_rel * std::abs(tr.phi2.front()) + scheme;
  r.tau_phiInf      = tol.phi_rel * std::abs(tr.phiInf.front()) + scheme;
  r.max_rise_phi1   = max_rise(tr.phi1);
  r.max_rise_phi2   = max_rise(tr.phi2);
  r.max_rise_phiInf = max_rise(tr.phiInf);

  const double a      = tr.sf.curvature();
  r.min_kleiner_slack = std::numeric_limits<double>::infinity();
  r.min_sharp_slack   = std::numeric_limits<double>::infinity();
  r.min_kappa         = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto& m   = tr.measures[k];
    const double gb = 4.0 * kPi - a * m.S;
    r.max_gb_rel    = std::max(r.max_gb_rel, std::abs(m.totG - gb) / gb);
    r.min_kleiner_slack = std::min(r.min_kleiner_slack, m.S - eta(m.V, tr.sf));
    r.min_sharp_slack =
        std::min(r.min_sharp_slack, (m.M - bound_sharp(m.S, m.V, tr.sf)) / m.M);
    r.min_kappa = std::min(r.min_kappa, tr.kappa_min[k]);
    if (k > 0) {
      const auto& prev = tr.measures[k - 1];
      const double g   = 0.5 * (m.totG + prev.totG);
      const double f   = 0.5 * (tr.total_speed[k] + tr.total_speed[k - 1]);
      r.max_dS_rel     = std::max(r.max_dS_rel, tr.dS_residual[k] / g);
      r.max_dV_rel     = std::max(r.max_dV_rel, tr.dV_residual[k] / f);
    }
  }
  r.phi_monotone = r.max_rise_phi1 <= r.tau_phi1 && r.max_rise_phi2 <= r.tau_phi2 &&
                   r.max_rise_phiInf <= r.tau_phiInf;
  r.evolution_ok    = r.max_dS_rel <= tol.dS_rel && r.max_dV_rel <= tol.dV_rel;
  r.gauss_bonnet_ok = r.max_gb_rel <= tol.gauss_bonnet;
  r.kleiner_ok      = r.min_kleiner_slack >= -tol.kleiner_abs;
  r.sharp_ok        = r.min_sharp_slack >= -tol.sharp_rel;
  r.passed = r.phi_monotone && r.evolution_ok && r.gauss_bonnet_ok && r.kleiner_ok && r.sharp_ok &&
             r.min_kappa > 0.0;
  return r;
}

}  // namespace hmink
