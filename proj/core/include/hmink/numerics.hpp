#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmink {

// = Errors ========================================================================================

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition was violated by the caller (bad bracket, negative volume, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A sampled function returned NaN or infinity.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// An iterative routine hit its work limit. Carries the best available estimate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}
  [[nodiscard]] double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

// = Types =========================================================================================

struct Tolerance {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_iter   = 200;

  /// Throws InvalidArgument unless abs_tol, rel_tol >= 0, abs_tol + rel_tol > 0, max_iter > 0.
  void validate() const;
};

/// Sampled real function on a grid xs[0] = 0 < xs[1] < ... with finite ordinates.
class GridFunction {
 public:
  GridFunction(std::vector<double> xs, std::vector<double> ys);

  [[nodiscard]] std::span<const double> xs() const noexcept { return xs_; }
  [[nodiscard]] std::span<const double> ys() const noexcept { return ys_; }
  [[nodiscard]] std::size_t size() const noexcept { return xs_.size(); }
  [[nodiscard]] double x(std::size_t k) const { return xs_[k]; }
  [[nodiscard]] double y(std::size_t k) const { return ys_[k]; }
  [[nodiscard]] double x_max() const noexcept { return xs_.back(); }

  /// Same abscissae, new ordinates (validated).
  [[nodiscard]] GridFunction with_values(std::vector<double> ys) const;

  /// Piecewise-cubic Lagrange interpolation in the coordinate s = x^(1/power). Power 1 is plain
  /// interpolation in x; power 3 suits profile functions that behave like x^(1/3) near zero.
  [[nodiscard]] double interpolate(double x, int power = 1) const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// n points on [0, x_max], equally spaced.
std::vector<double> uniform_grid(double x_max, std::size_t n);

/// n points x_k = x_max * (k/(n-1))^power. Equally spaced in s = x^(1/power).
std::vector<double> graded_grid(double x_max, std::size_t n, int power);

// = Rootfinding ===================================================================================

using ScalarFunction = std::function<double(double)>;

/// Root of f in [lo, hi] given f(lo) * f(hi) <= 0. When df is supplied Newton steps are taken,
/// otherwise secant steps; any step leaving the current bracket is replaced by bisection, so the
/// iteration converges on every valid bracket. The result always lies in [lo, hi].
double find_root_bracketed(const ScalarFunction& f,
                           double lo,
                           double hi,
                           const Tolerance& tol           = {},
                           const ScalarFunction& df       = nullptr);

// = Quadrature ====================================================================================

/// Adaptive Simpson quadrature with a recursion depth cap of 40.
/// Throws NonFiniteValue on a non-finite sample, ConvergenceError when the depth cap is hit.
double integrate_adaptive(const ScalarFunction& f, double a, double b, const Tolerance& tol = {});

enum class CumulativeRule {
  trapezoid,  // composite trapezoid, order 2, positivity preserving
  cubic,      // 4-point Lagrange panels, order 4; trapezoid fallback on panels that would go
              // negative for nonnegative data
};

/// Running integral x -> \int_0^x g on g's own abscissae. First ordinate is 0; nondecreasing
/// whenever g >= 0.
GridFunction cumulative_integral(const GridFunction& g,
                                 CumulativeRule rule = CumulativeRule::cubic);

/// Composite Simpson over equally spaced samples (trailing 3/8 panel when the interval count is
/// odd). Requires at least 2 samples; 2 samples fall back to the trapezoid.
double simpson_uniform(std::span<const double> samples, double h);

// = ODE stepping ==================================================================================

using OdeRhs = std::function<std::vector<double>(double, std::span<const double>)>;

/// One classical fourth-order Runge-Kutta step.
std::vector<double> ode_advance(const OdeRhs& rhs, std::span<const double> state, double t,
                                double dt);

// = Differentiation ===============================================================================

/// Central difference (f(x+h) - f(x-h)) / 2h.
double derivative_fd(const ScalarFunction& f, double x, double h);

/// Nodal derivative dy/dx of a grid function, by centered differences in s = x^(1/power) mapped
/// back with dx/ds. Interior nodes use the 3-point formula, ends are one-sided. Entry 0 is NaN
/// when power > 1 (dx/ds vanishes at the origin).
std::vector<double> grid_derivative(const GridFunction& g, int power = 1);

// = Threading =====================================================================================

/// Worker count from HMINK_THREADS; 1 when unset or invalid.
unsigned thread_count_from_env();

/// Calls body(i) for i in [0, n) split into contiguous blocks across `threads` workers.
/// body must only write to disjoint outputs. The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 1);

}  // namespace hmink
