#pragma once

// The monotone iteration
//
//   Q_1(x)     = sqrt(16 pi eta(x) - 2 a eta(x)^2)
//   Q_{n+1}(x) = sqrt(16 pi eta(x) - 2 a eta(x)^2 - 4 a \int_0^x Q_n)
//
// whose limit is the total mean curvature profile xi. Everything lives on one grid over
// [0, x_max]; the default grid is graded (equally spaced in x^(1/3)) because eta and xi behave
// like x^(2/3) and x^(1/3) at the origin.

#include <cstddef>
#include <vector>

#include "hmink/numerics.hpp"
#include "hmink/profiles.hpp"

namespace hmink {

struct IterationConfig {
  SpaceForm sf{-1.0};
  double x_max         = 50.0;
  std::size_t n_points = 2001;
  double sup_tol       = 1e-4;
  int max_n            = 200;
  int grid_power       = 3;  // 1 = uniform grid
  unsigned threads     = 1;

  void validate() const;
};

/// eta, xi and the common base term 16 pi eta - 2 a eta^2 sampled once on a grid.
struct ProfileGrid {
  SpaceForm sf;
  int grid_power;
  GridFunction eta;
  GridFunction xi;
  GridFunction base;

  [[nodiscard]] std::span<const double> xs() const noexcept { return eta.xs(); }
};

ProfileGrid make_profile_grid(SpaceForm sf, std::vector<double> xs, int grid_power = 3,
                              unsigned threads = 1);
ProfileGrid make_profile_grid(const IterationConfig& cfg);

struct IterationReport {
  IterationConfig config;
  std::vector<GridFunction> iterates;  // Q_1 ... Q_N
  std::vector<double> gaps;            // sup_x |xi - Q_n|
  std::vector<double> residuals;       // sup_x |fixed_point_residual(Q_n)|
  bool converged = false;
  int n_final    = 0;
  GridFunction xi;
};

double q1(double x, SpaceForm sf);
GridFunction q1(const ProfileGrid& profile);

/// One application of the recursion. The grid of Q must be the profile grid.
GridFunction next_q(const GridFunction& q, const ProfileGrid& profile);
/// Convenience overload that samples eta on Q's grid first.
GridFunction next_q(const GridFunction& q, SpaceForm sf);

/// x -> -4 a \int_0^x Q.
GridFunction p_from_q(const GridFunction& q, SpaceForm sf);

/// x -> Q(x)^2 + 4 a \int_0^x Q - (16 pi eta(x) - 2 a eta(x)^2). Vanishes exactly at Q = xi.
GridFunction fixed_point_residual(const GridFunction& q, const ProfileGrid& profile);
GridFunction fixed_point_residual(const GridFunction& q, SpaceForm sf);

IterationReport run_iteration(const IterationConfig& cfg);

struct DerivativeIdentityCheck {
  double max_rel_diff = 0.0;  // over interior nodes, of Q(Q'+2a) against xi(xi'+2a)
  double min_value    = 0.0;  // smallest Q(Q'+2a) seen
};

/// Compares Q(Q'+2a), with Q' from grid differences, against the exact xi(xi'+2a) =
/// xi (8 pi - 2 a eta) / eta on nodes first..last-1.
DerivativeIdentityCheck derivative_identity_check(const GridFunction& q,
                                                  const ProfileGrid& profile,
                                                  std::size_t first = 1);

double sup_norm(std::span<const double> values);

}  // namespace hmink
