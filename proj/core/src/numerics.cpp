#include "hmink/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include <fmt/core.h>

namespace hmink {

namespace {

void require_finite(double v, const char* where) {
  if (!std::isfinite(v)) { throw NonFiniteValue(fmt::format("{}: non-finite value", where)); }
}

// Integral over [lo, hi] of the cubic through (nodes[i], vals[i]); 2-point Gauss is exact.
double cubic_panel(std::span<const double, 4> nodes, std::span<const double, 4> vals, double lo,
                   double hi) {
  const double mid   = 0.5 * (lo + hi);
  const double half  = 0.5 * (hi - lo);
  const double g     = 1.0 / std::sqrt(3.0);
  const std::array<double, 2> ts{mid - half * g, mid + half * g};
  double sum = 0.0;
  for (const double t : ts) {
    for (std::size_t i = 0; i < 4; ++i) {
      double basis = 1.0;
      for (std::size_t j = 0; j < 4; ++j) {
        if (j != i) { basis *= (t - nodes[j]) / (nodes[i] - nodes[j]); }
      }
      sum += vals[i] * basis;
    }
  }
  return sum * half;
}

double stretch(double x, int power) {
  if (power == 1) { return x; }
  if (power == 3) { return std::cbrt(x); }
  return std::pow(x, 1.0 / power);
}

struct SimpsonState {
  const ScalarFunction& f;
  bool depth_exceeded = false;
};

double eval_checked(const ScalarFunction& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw NonFiniteValue(fmt::format("integrate_adaptive: non-finite integrand at x = {}", x));
  }
  return v;
}

double simpson_recurse(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                       double whole, double eps, int depth) {
  const double m   = 0.5 * (a + b);
  const double lm  = 0.5 * (a + m);
  const double rm  = 0.5 * (m + b);
  const double flm = eval_checked(st.f, lm);
  const double frm = eval_checked(st.f, rm);
  const double left  = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double both  = left + right;
  const double delta = both - whole;
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(both);
  if (std::abs(delta) <= std::max(15.0 * eps, floor)) { return both + delta / 15.0; }
  if (depth >= 40) {
    st.depth_exceeded = true;
    return both + delta / 15.0;
  }
  return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
         simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
}

}  // namespace

// = Types =========================================================================================

void Tolerance::validate() const {
  if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0) || !(abs_tol + rel_tol > 0.0) || max_iter <= 0) {
    throw InvalidArgument(
        fmt::format("invalid tolerance: abs_tol={}, rel_tol={}, max_iter={}", abs_tol, rel_tol,
                    max_iter));
  }
}

GridFunction::GridFunction(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() < 2 || xs_.size() != ys_.size()) {
    throw InvalidArgument(fmt::format("GridFunction needs >= 2 matching samples, got {} and {}",
                                      xs_.size(), ys_.size()));
  }
  if (xs_.front() != 0.0) { throw InvalidArgument("GridFunction abscissae must start at 0"); }
  for (std::size_t k = 0; k < xs_.size(); ++k) {
    if (!std::isfinite(xs_[k]) || !std::isfinite(ys_[k])) {
      throw NonFiniteValue(fmt::format("GridFunction: non-finite sample at index {}", k));
    }
    if (k > 0 && !(xs_[k] > xs_[k - 1])) {
      throw InvalidArgument(fmt::format("GridFunction abscissae not increasing at index {}", k));
    }
  }
}

GridFunction GridFunction::with_values(std::vector<double> ys) const {
  return GridFunction(xs_, std::move(ys));
}

double GridFunction::interpolate(double x, int power) const {
  const double span = xs_.back();
  if (!(x >= 0.0) || x > span * (1.0 + 1e-12)) {
    throw InvalidArgument(fmt::format("interpolate: x = {} outside [0, {}]", x, span));
  }
  x              = std::min(x, span);
  const auto n   = xs_.size();
  const auto it  = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t k  = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
  k              = std::min(k, n - 2);
  if (n < 4) {
    const double w = (x - xs_[k]) / (xs_[k + 1] - xs_[k]);
    return (1.0 - w) * ys_[k] + w * ys_[k + 1];
  }
  const std::size_t j0 = std::min(k == 0 ? std::size_t{0} : k - 1, n - 4);
  const double s       = stretch(x, power);
  double value         = 0.0;
  for (std::size_t i = j0; i < j0 + 4; ++i) {
    double basis     = 1.0;
    const double s_i = stretch(xs_[i], power);
    for (std::size_t j = j0; j < j0 + 4; ++j) {
      if (j != i) { basis *= (s - stretch(xs_[j], power)) / (s_i - stretch(xs_[j], power)); }
    }
    value += ys_[i] * basis;
  }
  return value;
}

std::vector<double> uniform_grid(double x_max, std::size_t n) { return graded_grid(x_max, n, 1); }

std::vector<double> graded_grid(double x_max, std::size_t n, int power) {
  if (!(x_max > 0.0) || !std::isfinite(x_max) || n < 2 || power < 1) {
    throw InvalidArgument(
        fmt::format("graded_grid: need x_max > 0, n >= 2, power >= 1 (got {}, {}, {})", x_max, n,
                    power));
  }
  std::vector<double> xs(n);
  const auto last = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / last;
    xs[k]          = x_max * std::pow(t, power);
  }
  xs.back() = x_max;
  return xs;
}

// = Rootfinding ===================================================================================

double find_root_bracketed(const ScalarFunction& f, double lo, double hi, const Tolerance& tol,
                           const ScalarFunction& df) {
  tol.validate();
  if (!(lo <= hi)) { throw InvalidArgument(fmt::format("bracket [{}, {}] is reversed", lo, hi)); }
  double flo = f(lo);
  double fhi = f(hi);
  require_finite(flo, "find_root_bracketed f(lo)");
  require_finite(fhi, "find_root_bracketed f(hi)");
  if (flo == 0.0) { return lo; }
  if (fhi == 0.0) { return hi; }
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw InvalidArgument(
        fmt::format("no sign change on [{}, {}]: f = {}, {}", lo, hi, flo, fhi));
  }

  double x         = 0.5 * (lo + hi);
  double step      = hi - lo;
  double step_prev = step;
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    const double fx = f(x);
    require_finite(fx, "find_root_bracketed f(x)");
    if (fx == 0.0 || std::abs(fx) <= tol.abs_tol) { return x; }
    if (std::signbit(fx) == std::signbit(flo)) {
      lo  = x;
      flo = fx;
    } else {
      hi  = x;
      fhi = fx;
    }

    double candidate = std::numeric_limits<double>::quiet_NaN();
    if (df) {
      const double d = df(x);
      if (std::isfinite(d) && d != 0.0) { candidate = x - fx / d; }
    } else if (fhi != flo) {
      candidate = lo - flo * (hi - lo) / (fhi - flo);
    }
    const bool inside  = std::isfinite(candidate) && candidate > lo && candidate < hi;
    const bool shrinks = std::abs(candidate - x) <= 0.5 * std::abs(step_prev);
    step_prev          = step;
    double next        = 0.0;
    if (inside && shrinks) {
      next = candidate;
    } else {
      next = 0.5 * (lo + hi);
    }
    step = next - x;
    x    = next;
    const double scale = tol.abs_tol + tol.rel_tol * std::abs(x);
    if (std::abs(step) <= scale || (hi - lo) <= scale) { return std::clamp(x, lo, hi); }
  }
  throw ConvergenceError("find_root_bracketed: iteration limit reached", x);
}

// = Quadrature ====================================================================================

double integrate_adaptive(const ScalarFunction& f, double a, double b, const Tolerance& tol) {
  tol.validate();
  if (!(a <= b)) { throw InvalidArgument(fmt::format("integrate_adaptive: a = {} > b = {}", a, b)); }
  if (a == b) { return 0.0; }
  const double fa    = eval_checked(f, a);
  const double fb    = eval_checked(f, b);
  const double fm    = eval_checked(f, 0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Coarse pass fixes the relative scale.
  SimpsonState probe{f};
  const double rough = simpson_recurse(probe, a, b, fa, fm, fb, whole,
                                       std::max(tol.abs_tol, 1e-3 * std::abs(whole)), 30);
  const double eps   = std::max(tol.abs_tol, tol.rel_tol * std::abs(rough));
  SimpsonState st{f};
  const double result = simpson_recurse(st, a, b, fa, fm, fb, whole, eps, 0);
  if (st.depth_exceeded) {
    throw ConvergenceError("integrate_adaptive: subdivision limit reached", result);
  }
  return result;
}

GridFunction cumulative_integral(const GridFunction& g, CumulativeRule rule) {
  const auto xs = g.xs();
  const auto ys = g.ys();
  const auto n  = xs.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double trap = 0.5 * (xs[k + 1] - xs[k]) * (ys[k] + ys[k + 1]);
    double panel      = trap;
    if (rule == CumulativeRule::cubic && n >= 4) {
      const std::size_t j0 = std::min(k == 0 ? std::size_t{0} : k - 1, n - 4);
      panel = cubic_panel(std::span<const double, 4>(xs.data() + j0, 4),
                          std::span<const double, 4>(ys.data() + j0, 4), xs[k], xs[k + 1]);
      if (panel < 0.0 && ys[k] >= 0.0 && ys[k + 1] >= 0.0) { panel = trap; }
    }
    out[k + 1] = out[k] + panel;
  }
  return g.with_values(std::move(out));
}

double simpson_uniform(std::span<const double> y, double h) {
  const auto n = y.size();
  if (n < 2) { throw InvalidArgument("simpson_uniform needs at least 2 samples"); }
  const std::size_t intervals = n - 1;
  if (intervals == 1) { return 0.5 * h * (y[0] + y[1]); }
  auto simpson = [&](std::size_t first, std::size_t last) {
    double acc = y[first] + y[last];
    for (std::size_t k = first + 1; k < last; ++k) { acc += ((k - first) % 2 == 1 ? 4.0 : 2.0) * y[k]; }
    return acc * h / 3.0;
  };
  if (intervals % 2 == 0) { return simpson(0, intervals); }
  const std::size_t m = intervals - 3;
  const double head   = m > 0 ? simpson(0, m) : 0.0;
  return head + 3.0 * h / 8.0 * (y[m] + 3.0 * y[m + 1] + 3.0 * y[m + 2] + y[m + 3]);
}

// = ODE stepping ==================================================================================

std::vector<double> ode_advance(const OdeRhs& rhs, std::span<const double> state, double t,
                                double dt) {
  if (!(dt > 0.0)) { throw InvalidArgument(fmt::format("ode_advance: dt = {} must be > 0", dt)); }
  const auto n = state.size();
  auto checked = [&](double tt, std::span<const double> y) {
    auto rate = rhs(tt, y);
    if (rate.size() != n) { throw InvalidArgument("ode_advance: rate has wrong dimension"); }
    for (const double r : rate) { require_finite(r, "ode_advance rate"); }
    return rate;
  };
  auto axpy = [&](const std::vector<double>& k, double c) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) { y[i] = state[i] + c * k[i]; }
    return y;
  };
  const auto k1 = checked(t, state);
  const auto k2 = checked(t + 0.5 * dt, axpy(k1, 0.5 * dt));
  const auto k3 = checked(t + 0.5 * dt, axpy(k2, 0.5 * dt));
  const auto k4 = checked(t + dt, axpy(k3, dt));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

// = Differentiation ===============================================================================

double derivative_fd(const ScalarFunction& f, double x, double h) {
  if (!(h > 0.0)) { throw InvalidArgument(fmt::format("derivative_fd: h = {} must be > 0", h)); }
  const double fp = f(x + h);
  const double fm = f(x - h);
  require_finite(fp, "derivative_fd f(x+h)");
  require_finite(fm, "derivative_fd f(x-h)");
  return (fp - fm) / (2.0 * h);
}

std::vector<double> grid_derivative(const GridFunction& g, int power) {
  const auto n = g.size();
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) { s[k] = stretch(g.x(k), power); }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double dyds = 0.0;
    if (k == 0) {
      dyds = (g.y(1) - g.y(0)) / (s[1] - s[0]);
    } else if (k + 1 == n) {
      dyds = (g.y(k) - g.y(k - 1)) / (s[k] - s[k - 1]);
    } else {
      const double hl = s[k] - s[k - 1];
      const double hr = s[k + 1] - s[k];
      dyds = (hl * hl * g.y(k + 1) - hr * hr * g.y(k - 1) + (hr * hr - hl * hl) * g.y(k)) /
             (hl * hr * (hl + hr));
    }
    const double dxds = power == 1 ? 1.0 : power * std::pow(s[k], power - 1);
    out[k]            = dxds > 0.0 ? dyds / dxds : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

// = Threading =====================================================================================

unsigned thread_count_from_env() {
  const char* raw = std::getenv("HMINK_THREADS");
  if (raw == nullptr) { return 1; }
  char* end       = nullptr;
  const long v    = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1) { return 1; }
  return static_cast<unsigned>(std::min<long>(v, 256));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2 * threads) {
    for (std::size_t i = 0; i < n; ++i) { body(i); }
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  pool.reserve(threads);
  const std::size_t block = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) { break; }
    pool.emplace_back([lo, hi, &body, &err = errors[w]] {
      try {
        for (std::size_t i = lo; i < hi; ++i) { body(i); }
      } catch (...) {
        err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) { t.join(); }
  for (const auto& e : errors) {
    if (e) { std::rethrow_exception(e); }
  }
}

}  // namespace hmink
