#include "surflab/potential.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace surflab {

double Potential::d(double x) const {
  if (deriv) return deriv(x);
  double h = 1e-6 * std::max(1.0, std::fabs(x));
  return (value(x + h) - value(x - h)) / (2 * h);
}

static std::string fmt_params(const char* base, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s(%g,%g)", base, a, b);
  return buf;
}

Potential Potential::quadratic(double c) {
  if (c <= 0) throw std::invalid_argument("quadratic: c > 0");
  char buf[64];
  std::snprintf(buf, sizeof buf, "quadratic(%g)", c);
  return {buf, [c](double x) { return 0.5 * c * x * x; },
          [c](double x) { return c * x; }};
}

Potential Potential::splice(double alpha, double eps) {
  if (alpha <= 0 || eps <= 0) throw std::invalid_argument("splice: alpha, eps > 0");
  double xs = std::sqrt((alpha + 1) / eps);  // crossover of eps x and (alpha+1)/x
  double us = 0.5 * eps * xs * xs;
  return {fmt_params("splice", alpha, eps),
          [=](double x) {
            x = std::fabs(x);
            return x <= xs ? 0.5 * eps * x * x : us + (alpha + 1) * std::log(x / xs);
          },
          [=](double x) {
            double ax = std::fabs(x), s = x < 0 ? -1.0 : 1.0;
            return s * (ax <= xs ? eps * ax : (alpha + 1) / ax);
          }};
}

Potential Potential::poly(double beta, double eps) {
  if (beta <= 0 || beta > 2 || eps <= 0) throw std::invalid_argument("poly: beta in (0,2], eps > 0");
  return {fmt_params("poly", beta, eps),
          [=](double x) { return eps / beta * std::pow(std::fabs(x), beta); },
          [=](double x) {
            double ax = std::fabs(x), s = x < 0 ? -1.0 : 1.0;
            return ax == 0 ? 0.0 : s * eps * std::pow(ax, beta - 1);
          }};
}

Potential Potential::power_interp(double beta, double K) {
  if (beta <= 0 || beta >= 2 || K <= 0) throw std::invalid_argument("power_interp: beta in (0,2), K > 0");
  return {fmt_params("power-interp", beta, K),
          [=](double x) { return std::pow(1 + x * x / (K * K), beta / 2) - 1; },
          [=](double x) {
            return beta * x / (K * K) * std::pow(1 + x * x / (K * K), beta / 2 - 1);
          }};
}

Potential Potential::constant() {
  return {"constant", [](double) { return 0.0; }, [](double) { return 0.0; }};
}

ClassReport check_class(const Potential& U, MonotoneClass cls, double param,
                        double eps, double x_lo, double x_hi, int points) {
  if (x_lo <= 0 || x_hi <= x_lo || points < 2) throw std::invalid_argument("check_class: bad grid");
  auto bound = [&](double x) {
    switch (cls) {
      case MonotoneClass::EpsMonotone:
        return std::min(eps * x, (1 + eps) / x);
      case MonotoneClass::AlphaEpsMonotone:
        return std::min(eps * x, (param + 1) / x);
      case MonotoneClass::PolyMonotone:
        return eps * std::min(x, std::pow(x, param - 1));
    }
    return 0.0;
  };
  ClassReport rep;
  rep.passes = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  double step = std::log(x_hi / x_lo) / (points - 1);
  for (int k = 0; k < points; k++) {
    double x = x_lo * std::exp(k * step);
    double b = bound(x);
    double margin = U.d(x) - b;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_x = x;
    }
    if (margin < -1e-6 * (1 + std::fabs(b))) rep.passes = false;
  }
  return rep;
}

}  // namespace surflab
