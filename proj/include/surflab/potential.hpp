#pragma once
#include <functional>
#include <string>

namespace surflab {

/// Monotonicity classes for symmetric potentials, stated through lower bounds
/// on U' for x > 0:
///   EpsMonotone:      U'(x) >= min(eps x, (1+eps)/x)
///   AlphaEpsMonotone: U'(x) >= min(eps x, (alpha+1)/x)
///   PolyMonotone:     U'(x) >= eps min(x, x^(beta-1))
enum class MonotoneClass { EpsMonotone, AlphaEpsMonotone, PolyMonotone };

/// Symmetric potential with U(0) = 0. `deriv` may be null; d() then uses a
/// central difference with h = 1e-6 max(1, |x|).
struct Potential {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> deriv;

  double operator()(double x) const { return value(x); }
  double d(double x) const;

  static Potential quadratic(double c);
  /// U' = min(eps x, (alpha+1)/x): quadratic core, logarithmic tail. Sits
  /// exactly on the (alpha,eps)-monotone boundary.
  static Potential splice(double alpha, double eps);
  /// (eps/beta) |x|^beta, beta in (0,2]; on the (beta,eps)-poly boundary.
  static Potential poly(double beta, double eps);
  /// (1 + (x/K)^2)^(beta/2) - 1: quadratic near zero, |x/K|^beta at infinity.
  static Potential power_interp(double beta, double K);
  /// Identically zero; negative control for class checks.
  static Potential constant();
};

struct ClassReport {
  bool passes = false;
  double worst_margin = 0;  // min over the grid of U'(x) - bound(x)
  double worst_x = 0;
};

/// Grid check of the class lower bound on log-spaced x in [x_lo, x_hi];
/// a point fails when U'(x) < bound(x) - 1e-6 (1 + |bound(x)|).
ClassReport check_class(const Potential& U, MonotoneClass cls, double param,
                        double eps, double x_lo = 1e-3, double x_hi = 1e3,
                        int points = 400);

}  // namespace surflab
