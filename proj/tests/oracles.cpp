#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace oracles {

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  double n = (double)samples.size(), d = 0;
  for (size_t i = 0; i < samples.size(); i++) {
    double F = cdf(samples[i]);
    d = std::max(d, std::max(std::fabs(F - i / n), std::fabs(F - (i + 1) / n)));
  }
  return d;
}

double NumericCdf::operator()(double v) const {
  if (v <= x.front()) return 0;
  if (v >= x.back()) return 1;
  size_t hi = std::upper_bound(x.begin(), x.end(), v) - x.begin();
  double t = (v - x[hi - 1]) / (x[hi] - x[hi - 1]);
  return c[hi - 1] + t * (c[hi] - c[hi - 1]);
}

NumericCdf cdf_from_energy(const std::function<double(double)>& energy, double R,
                           int n) {
  NumericCdf out;
  out.x.resize(n);
  std::vector<double> dens(n);
  for (int i = 0; i < n; i++) {
    out.x[i] = -R + 2 * R * i / (n - 1.0);
    dens[i] = std::exp(-energy(out.x[i]));
  }
  out.c.assign(n, 0.0);
  for (int i = 1; i < n; i++)
    out.c[i] = out.c[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * (out.x[i] - out.x[i - 1]);
  double z = out.c.back();
  if (!(z > 0)) throw std::runtime_error("cdf_from_energy: zero mass");
  for (double& v : out.c) v /= z;
  return out;
}

double pareto_mixture_emv(double alpha, double eps, double x) {
  double A = 1 + 1 / std::sqrt(eps);
  double s = (alpha + 1) / 2;
  x = std::fabs(x);
  if (x == 0)  // integral of kappa^-1 against the scale law, over sqrt(2 pi)
    return alpha / ((alpha + 1) * A) / std::sqrt(2 * std::numbers::pi);
  double t0 = x * x / (2 * A * A);
  double lower_gamma = boost::math::tgamma(s) * boost::math::gamma_p(s, t0);
  return alpha * std::pow(A, alpha) / (2 * std::sqrt(2 * std::numbers::pi)) *
         lower_gamma / std::pow(x * x / 2, s);
}

double half_normal_sf(double t) { return std::erfc(t / std::numbers::sqrt2); }

}  // namespace oracles
