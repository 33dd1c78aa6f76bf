#include "hmink/q_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

namespace hmink {

namespace {

constexpr double kPi = std::numbers::pi;

double base_term(double e, SpaceForm sf) { return 16.0 * kPi * e - 2.0 * sf.curvature() * e * e; }

void require_same_grid(const GridFunction& q, const ProfileGrid& profile) {
  const auto a = q.xs();
  const auto b = profile.xs();
  if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
    throw InvalidArgument("Q and the profile grid have different abscissae");
  }
}

ProfileGrid profile_for(const GridFunction& q, SpaceForm sf) {
  const auto xs = q.xs();
  return make_profile_grid(sf, std::vector<double>(xs.begin(), xs.end()), 1);
}

}  // namespace

void IterationConfig::validate() const {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) {
    throw InvalidArgument(fmt::format("x_max must be > 0, got {}", x_max));
  }
  if (n_points < 16) { throw InvalidArgument(fmt::format("n_points must be >= 16, got {}", n_points)); }
  if (!(sup_tol > 0.0)) { throw InvalidArgument(fmt::format("sup_tol must be > 0, got {}", sup_tol)); }
  if (max_n < 1) { throw InvalidArgument(fmt::format("max_n must be >= 1, got {}", max_n)); }
  if (grid_power < 1) { throw InvalidArgument("grid_power must be >= 1"); }
}

ProfileGrid make_profile_grid(SpaceForm sf, std::vector<double> xs, int grid_power,
                              unsigned threads) {
  const auto n = xs.size();
  std::vector<double> e(n), x(n), b(n);
  parallel_for(
      n,
      [&](std::size_t k) {
        e[k] = eta(xs[k], sf);
        x[k] = std::sqrt(std::max(0.0, 16.0 * kPi * e[k] - 4.0 * sf.curvature() * e[k] * e[k]));
        b[k] = base_term(e[k], sf);
      },
      threads);
  GridFunction eta_grid(std::move(xs), std::move(e));
  auto xi_grid   = eta_grid.with_values(std::move(x));
  auto base_grid = eta_grid.with_values(std::move(b));
  return {sf, grid_power, std::move(eta_grid), std::move(xi_grid), std::move(base_grid)};
}

ProfileGrid make_profile_grid(const IterationConfig& cfg) {
  cfg.validate();
  return make_profile_grid(cfg.sf, graded_grid(cfg.x_max, cfg.n_points, cfg.grid_power),
                           cfg.grid_power, cfg.threads);
}

double q1(double x, SpaceForm sf) { return std::sqrt(std::max(0.0, base_term(eta(x, sf), sf))); }

GridFunction q1(const ProfileGrid& profile) {
  std::vector<double> ys(profile.base.size());
  for (std::size_t k = 0; k < ys.size(); ++k) { ys[k] = std::sqrt(std::max(0.0, profile.base.y(k))); }
  return profile.base.with_values(std::move(ys));
}

GridFunction next_q(const GridFunction& q, const ProfileGrid& profile) {
  require_same_grid(q, profile);
  if (q.y(0) != 0.0) { throw InvalidArgument(fmt::format("Q(0) must be 0, got {}", q.y(0))); }
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q.y(k) < 0.0) { throw InvalidArgument(fmt::format("Q negative at node {}", k)); }
  }
  const auto integral = cumulative_integral(q);
  const double a      = profile.sf.curvature();
  std::vector<double> ys(q.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double base     = profile.base.y(k);
    const double radicand = base - 4.0 * a * integral.y(k);
    if (radicand < -1e-12 * std::max(1.0, base)) {
      throw Error(fmt::format("next_q: negative radicand {} at x = {}", radicand, q.x(k)));
    }
    ys[k] = std::sqrt(std::max(0.0, radicand));
  }
  return q.with_values(std::move(ys));
}

GridFunction next_q(const GridFunction& q, SpaceForm sf) { return next_q(q, profile_for(q, sf)); }

GridFunction p_from_q(const GridFunction& q, SpaceForm sf) {
  const auto integral = cumulative_integral(q);
  std::vector<double> ys(q.size());
  for (std::size_t k = 0; k < ys.size(); ++k) { ys[k] = -4.0 * sf.curvature() * integral.y(k); }
  return q.with_values(std::move(ys));
}

GridFunction fixed_point_residual(const GridFunction& q, const ProfileGrid& profile) {
  require_same_grid(q, profile);
  const auto integral = cumulative_integral(q);
  const double a      = profile.sf.curvature();
  std::vector<double> ys(q.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    ys[k] = q.y(k) * q.y(k) + 4.0 * a * integral.y(k) - profile.base.y(k);
  }
  return q.with_values(std::move(ys));
}

GridFunction fixed_point_residual(const GridFunction& q, SpaceForm sf) {
  return fixed_point_residual(q, profile_for(q, sf));
}

double sup_norm(std::span<const double> values) {
  double m = 0.0;
  for (const double v : values) { m = std::max(m, std::abs(v)); }
  return m;
}

IterationReport run_iteration(const IterationConfig& cfg) {
  const auto profile = make_profile_grid(cfg);
  IterationReport report{.config = cfg, .iterates = {}, .gaps = {}, .residuals = {}, .xi = profile.xi};

  auto record = [&](GridFunction q) {
    std::vector<double> gap(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) { gap[k] = profile.xi.y(k) - q.y(k); }
    report.gaps.push_back(sup_norm(gap));
    report.residuals.push_back(sup_norm(fixed_point_residual(q, profile).ys()));
    report.iterates.push_back(std::move(q));
    report.n_final   = static_cast<int>(report.iterates.size());
    report.converged = report.gaps.back() <= cfg.sup_tol;
  };

  record(q1(profile));
  while (!report.converged && report.n_final < cfg.max_n) {
    record(next_q(report.iterates.back(), profile));
  }
  return report;
}

DerivativeIdentityCheck derivative_identity_check(const GridFunction& q,
                                                  const ProfileGrid& profile, std::size_t first) {
  require_same_grid(q, profile);
  const auto dq   = grid_derivative(q, profile.grid_power);
  const double a  = profile.sf.curvature();
  DerivativeIdentityCheck out{.max_rel_diff = 0.0, .min_value = std::numeric_limits<double>::max()};
  first = std::max<std::size_t>(first, 1);
  for (std::size_t k = first; k + 1 < q.size(); ++k) {
    const double e     = profile.eta.y(k);
    const double x     = profile.xi.y(k);
    const double exact = x * (8.0 * kPi - 2.0 * a * e) / e;
    const double value = q.y(k) * (dq[k] + 2.0 * a);
    out.max_rel_diff   = std::max(out.max_rel_diff, std::abs(value - exact) / std::abs(exact));
    out.min_value      = std::min(out.min_value, value);
  }
  return out;
}

}  // namespace hmink
