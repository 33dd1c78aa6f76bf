#pragma once

// Reference values computed without the library: long double closed forms, plain bisection,
// Gauss-Legendre quadrature and a Halton sequence. Tests compare library output against these.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>

namespace oracle {

using ld = long double;
inline constexpr ld kPi = std::numbers::pi_v<long double>;

inline ld volume(ld r, ld a) {
  if (a == 0) { return 4 * kPi / 3 * r * r * r; }
  const ld k = std::sqrt(-a);
  const ld z = k * r;
  if (z < 1e-2L) {
    // sinh z cosh z - z = (sinh 2z - 2z) / 2, summed until the terms vanish
    ld term = 8 * z * z * z / 6, sum = 0;
    for (int m = 1; m < 30; ++m) {
      sum += term;
      term *= 4 * z * z / ((2 * m + 2) * (2 * m + 3));
    }
    return kPi * sum / (k * k * k);
  }
  return 2 * kPi * (std::sinh(z) * std::cosh(z) - z) / (k * k * k);
}

inline ld area(ld r, ld a) {
  if (a == 0) { return 4 * kPi * r * r; }
  const ld k  = std::sqrt(-a);
  const ld sh = std::sinh(k * r);
  return 4 * kPi * sh * sh / (k * k);
}

inline ld tmc(ld r, ld a) {
  if (a == 0) { return 8 * kPi * r; }
  const ld k = std::sqrt(-a);
  return 8 * kPi * std::sinh(k * r) * std::cosh(k * r) / k;
}

/// Plain bisection for the radius of the ball with volume x.
inline ld radius(ld x, ld a) {
  if (x == 0) { return 0; }
  ld lo = 0, hi = 1;
  while (volume(hi, a) < x) { hi *= 2; }
  for (int i = 0; i < 200; ++i) {
    const ld mid = 0.5L * (lo + hi);
    (volume(mid, a) < x ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

/// Area and total mean curvature of the sphere with volume x, both through the radius.
inline ld eta(ld x, ld a) { return area(radius(x, a), a); }
inline ld xi(ld x, ld a) { return tmc(radius(x, a), a); }

/// Composite 10-point Gauss-Legendre.
inline ld integrate(const std::function<ld(ld)>& f, ld lo, ld hi, int panels = 200) {
  static constexpr std::array<ld, 5> nodes{0.1488743389816312108848260L, 0.4333953941292471907992659L,
                                           0.6794095682990244062343274L, 0.8650633666889845107320967L,
                                           0.9739065285171717200779640L};
  static constexpr std::array<ld, 5> weights{0.2955242247147528701738930L, 0.2692667193099963550912269L,
                                             0.2190863625159820439955349L, 0.1494513491505805931457763L,
                                             0.0666713443086881375935688L};
  const ld w = (hi - lo) / panels;
  ld sum     = 0;
  for (int p = 0; p < panels; ++p) {
    const ld c = lo + (p + 0.5L) * w;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const ld d = 0.5L * w * nodes[i];
      sum += weights[i] * (f(c - d) + f(c + d));
    }
  }
  return 0.5L * w * sum;
}

/// Radical inverse in the given prime base.
inline double halton(std::size_t index, std::size_t base) {
  double f = 1.0, r = 0.0;
  for (std::size_t i = index; i > 0; i /= base) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
  }
  return r;
}

/// Radius of the flowing sphere by RK4 on dr/dt = -(k/2) coth(k r) with small steps.
inline ld sphere_flow_radius(ld r0, ld a, ld t, int steps = 20000) {
  auto rate = [a](ld r) {
    if (a == 0) { return -1 / (2 * r); }
    const ld k = std::sqrt(-a);
    return -k / (2 * std::tanh(k * r));
  };
  const ld h = t / steps;
  ld r       = r0;
  for (int i = 0; i < steps; ++i) {
    const ld k1 = rate(r), k2 = rate(r + h / 2 * k1), k3 = rate(r + h / 2 * k2), k4 = rate(r + h * k3);
    r += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return r;
}

inline double rel(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

}  // namespace oracle
