#include "surflab/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace surflab {

static constexpr double kInf = std::numeric_limits<double>::infinity();
static const double kLogSqrt2Pi = 0.5 * std::log(2 * std::numbers::pi);

MixtureMeasure MixtureMeasure::shifted_pareto(double alpha, double eps) {
  if (alpha <= 0 || eps <= 0) throw std::invalid_argument("shifted_pareto: alpha, eps > 0");
  MixtureMeasure m;
  m.kind_ = MixtureKind::ShiftedPareto;
  m.alpha_ = alpha;
  m.A_ = 1 + 1 / std::sqrt(eps);
  return m;
}

MixtureMeasure MixtureMeasure::two_point(double kappa1, double kappa2, double w) {
  if (kappa1 <= 0 || kappa2 <= 0 || w < 0 || w > 1)
    throw std::invalid_argument("two_point: kappas > 0, w in [0,1]");
  MixtureMeasure m;
  m.kind_ = MixtureKind::TwoPoint;
  m.k1_ = kappa1;
  m.k2_ = kappa2;
  m.w_ = w;
  return m;
}

MixtureMeasure MixtureMeasure::tilted_stable(double beta, double K, int cache_size,
                                             uint64_t cache_seed) {
  if (beta <= 0 || beta >= 2 || K <= 0)
    throw std::invalid_argument("tilted_stable: beta in (0,2), K > 0");
  if (cache_size < 100) throw std::invalid_argument("tilted_stable: cache_size >= 100");
  MixtureMeasure m;
  m.kind_ = MixtureKind::TiltedStable;
  m.beta_ = beta;
  m.K_ = K;
  Rng rng = make_rng(cache_seed);
  m.atoms_ = tilted_stable_chain(beta, K, cache_size, rng);
  m.sorted_atoms_ = m.atoms_;
  std::sort(m.sorted_atoms_.begin(), m.sorted_atoms_.end());
  return m;
}

MixtureMeasure MixtureMeasure::empirical(std::vector<double> atoms) {
  if (atoms.empty()) throw std::invalid_argument("empirical: no atoms");
  for (double a : atoms)
    if (!(a > 0)) throw std::invalid_argument("empirical: atoms must be positive");
  MixtureMeasure m;
  m.kind_ = MixtureKind::Empirical;
  m.atoms_ = std::move(atoms);
  m.sorted_atoms_ = m.atoms_;
  std::sort(m.sorted_atoms_.begin(), m.sorted_atoms_.end());
  return m;
}

std::string MixtureMeasure::name() const {
  char buf[96];
  switch (kind_) {
    case MixtureKind::ShiftedPareto:
      std::snprintf(buf, sizeof buf, "shifted-pareto(alpha=%g,A=%g)", alpha_, A_);
      break;
    case MixtureKind::TiltedStable:
      std::snprintf(buf, sizeof buf, "tilted-stable(beta=%g,K=%g)", beta_, K_);
      break;
    case MixtureKind::TwoPoint:
      std::snprintf(buf, sizeof buf, "two-point(%g,%g;w=%g)", k1_, k2_, w_);
      break;
    case MixtureKind::Empirical:
      std::snprintf(buf, sizeof buf, "empirical(n=%zu)", atoms_.size());
      break;
  }
  return buf;
}

double MixtureMeasure::sample(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  switch (kind_) {
    case MixtureKind::ShiftedPareto:
      return A_ * std::pow(1 - unif(rng), -1 / alpha_);
    case MixtureKind::TwoPoint:
      return unif(rng) < w_ ? k1_ : k2_;
    case MixtureKind::TiltedStable:
    case MixtureKind::Empirical: {
      std::uniform_int_distribution<size_t> pick(0, atoms_.size() - 1);
      return atoms_[pick(rng)];
    }
  }
  return 0;
}

double MixtureMeasure::quantile(double u) const {
  u = std::min(std::max(u, 0.0), 1.0 - 1e-16);
  switch (kind_) {
    case MixtureKind::ShiftedPareto:
      return A_ * std::pow(1 - u, -1 / alpha_);
    case MixtureKind::TwoPoint: {
      double lo = std::min(k1_, k2_), hi = std::max(k1_, k2_);
      double wlo = k1_ <= k2_ ? w_ : 1 - w_;
      return u < wlo || hi == lo ? lo : hi;
    }
    case MixtureKind::TiltedStable:
    case MixtureKind::Empirical: {
      size_t idx = std::min(sorted_atoms_.size() - 1,
                            static_cast<size_t>(u * sorted_atoms_.size()));
      return sorted_atoms_[idx];
    }
  }
  return 0;
}

double MixtureMeasure::cdf(double k) const {
  switch (kind_) {
    case MixtureKind::ShiftedPareto:
      return k < A_ ? 0.0 : 1 - std::pow(A_ / k, alpha_);
    case MixtureKind::TwoPoint:
      return (k1_ <= k ? w_ : 0.0) + (k2_ <= k ? 1 - w_ : 0.0);
    case MixtureKind::TiltedStable:
    case MixtureKind::Empirical: {
      auto it = std::upper_bound(sorted_atoms_.begin(), sorted_atoms_.end(), k);
      return double(it - sorted_atoms_.begin()) / sorted_atoms_.size();
    }
  }
  return 0;
}

double MixtureMeasure::inv_first_moment() const {
  switch (kind_) {
    case MixtureKind::ShiftedPareto:
      return alpha_ / ((alpha_ + 1) * A_);
    case MixtureKind::TwoPoint:
      return w_ / k1_ + (1 - w_) / k2_;
    case MixtureKind::TiltedStable:
    case MixtureKind::Empirical: {
      double s = 0;
      for (double a : atoms_) s += 1 / a;
      return s / atoms_.size();
    }
  }
  return 0;
}

VValue MixtureMeasure::eval_V(double x) const {
  x = std::fabs(x);
  VValue out;
  switch (kind_) {
    case MixtureKind::TwoPoint: {
      // exact log-sum-exp over the two atoms
      double l1 = w_ > 0 ? std::log(w_) - std::log(k1_) - x * x / (2 * k1_ * k1_) : -kInf;
      double l2 = w_ < 1 ? std::log(1 - w_) - std::log(k2_) - x * x / (2 * k2_ * k2_) : -kInf;
      double m = std::max(l1, l2);
      out.value = kLogSqrt2Pi - (m + std::log(std::exp(l1 - m) + std::exp(l2 - m)));
      return out;
    }
    case MixtureKind::ShiftedPareto: {
      // in t = 1/kappa the integrand c t^alpha e^{-x^2 t^2 / 2} lives on the
      // compact interval (0, 1/A], smooth with no tail to bracket
      double c = alpha_ * std::pow(A_, alpha_);
      auto f = [&](double t) {
        return c * std::pow(t, alpha_) * std::exp(-x * x * t * t / 2);
      };
      double qerr = 0;
      double total = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          f, 0.0, 1 / A_, 25, 1e-11, &qerr);
      if (total <= 0) {
        out.value = kInf;
        out.underflow = true;
        return out;
      }
      out.value = kLogSqrt2Pi - std::log(total);
      out.err = qerr / total;
      return out;
    }
    case MixtureKind::TiltedStable: {
      // the tilt is chosen so the scale average of centered Gaussians comes out
      // exactly C exp(-(1+(x/K)^2)^(beta/2)); a finite atom cache would bend the
      // far tail quadratic, so only the constant C = f(0) is estimated from it
      double s = 0, s2 = 0;
      size_t n = atoms_.size();
      for (double k : atoms_) {
        double t = 1 / k;
        s += t;
        s2 += t * t;
      }
      double mean = s / n;
      double var = std::max(0.0, s2 / n - mean * mean);
      out.value = kLogSqrt2Pi - std::log(mean) +
                  (std::pow(1 + x * x / (K_ * K_), beta_ / 2) - 1);
      out.err = std::sqrt(var / n) / mean;
      return out;
    }
    case MixtureKind::Empirical: {
      // Monte Carlo average over the atom list
      double s = 0, s2 = 0;
      size_t n = atoms_.size();
      for (double k : atoms_) {
        double t = std::exp(-x * x / (2 * k * k)) / k;
        s += t;
        s2 += t * t;
      }
      double mean = s / n;
      if (mean <= 0) {
        out.value = kInf;
        out.underflow = true;
        return out;
      }
      double var = std::max(0.0, s2 / n - mean * mean);
      out.value = kLogSqrt2Pi - std::log(mean);
      out.err = std::sqrt(var / n) / mean;
      return out;
    }
  }
  return out;
}

double MixtureMeasure::sample_posterior(double delta, Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double d2 = delta * delta;
  switch (kind_) {
    case MixtureKind::ShiftedPareto: {
      // in t = kappa^-2 the posterior is Gamma((alpha+1)/2, delta^2/2)
      // truncated to (0, A^-2]
      double s = (alpha_ + 1) / 2;
      double rate = d2 / 2;
      double qmax = rate > 0 ? boost::math::gamma_p(s, rate / (A_ * A_)) : 0.0;
      if (qmax < 1e-290) {
        // degenerate tilt: plain Pareto(alpha+1) on [A, inf)
        return A_ * std::pow(1 - unif(rng), -1 / (alpha_ + 1));
      }
      double t = boost::math::gamma_p_inv(s, unif(rng) * qmax) / rate;
      t = std::min(t, 1 / (A_ * A_));
      if (!(t > 0)) return A_ * std::pow(1 - unif(rng), -1 / (alpha_ + 1));
      return 1 / std::sqrt(t);
    }
    case MixtureKind::TwoPoint: {
      double l1 = w_ > 0 ? std::log(w_) - std::log(k1_) - d2 / (2 * k1_ * k1_) : -kInf;
      double l2 = w_ < 1 ? std::log(1 - w_) - std::log(k2_) - d2 / (2 * k2_ * k2_) : -kInf;
      double p1 = 1 / (1 + std::exp(l2 - l1));
      return unif(rng) < p1 ? k1_ : k2_;
    }
    case MixtureKind::Empirical: {
      size_t n = atoms_.size();
      std::vector<double> lw(n);
      double m = -kInf;
      for (size_t i = 0; i < n; i++) {
        lw[i] = -std::log(atoms_[i]) - d2 / (2 * atoms_[i] * atoms_[i]);
        m = std::max(m, lw[i]);
      }
      double tot = 0;
      for (size_t i = 0; i < n; i++) {
        lw[i] = std::exp(lw[i] - m);
        tot += lw[i];
      }
      double u = unif(rng) * tot;
      for (size_t i = 0; i < n; i++) {
        u -= lw[i];
        if (u <= 0) return atoms_[i];
      }
      return atoms_[n - 1];
    }
    case MixtureKind::TiltedStable:
      throw std::logic_error("sample_posterior: no closed-form tilted-stable density");
  }
  return 0;
}

double sample_stable_positive(double a, Rng& rng) {
  if (a <= 0 || a >= 1) throw std::invalid_argument("sample_stable_positive: a in (0,1)");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double theta = std::numbers::pi * unif(rng);
  while (theta == 0) theta = std::numbers::pi * unif(rng);
  double w = -std::log(1 - unif(rng));  // Exp(1)
  // Kanter: S = (A(theta)/W)^((1-a)/a) with
  // A(theta) = sin(a theta)^(a/(1-a)) sin((1-a) theta) / sin(theta)^(1/(1-a))
  double la = std::log(std::sin(a * theta)) * (a / (1 - a)) +
              std::log(std::sin((1 - a) * theta)) -
              std::log(std::sin(theta)) / (1 - a);
  return std::exp((la - std::log(w)) * (1 - a) / a);
}

std::vector<double> tilted_stable_chain(double beta, double K, int n, Rng& rng,
                                        int burnin, int thin) {
  if (beta <= 0 || beta >= 2 || K <= 0 || n <= 0)
    throw std::invalid_argument("tilted_stable_chain: beta in (0,2), K > 0, n > 0");
  double a = beta / 2;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // independence Metropolis in s against the raw stable proposal; the target
  // adds the tilt e^-s s^-1/2
  auto logw = [](double s) { return -s - 0.5 * std::log(s); };
  double s = sample_stable_positive(a, rng);
  double lw = logw(s);
  std::vector<double> out;
  out.reserve(n);
  long steps = long(burnin) + long(n) * thin;
  for (long i = 0; i < steps; i++) {
    double sp = sample_stable_positive(a, rng);
    double lwp = logw(sp);
    if (lwp >= lw || unif(rng) < std::exp(lwp - lw)) {
      s = sp;
      lw = lwp;
    }
    if (i >= burnin && (i - burnin) % thin == thin - 1)
      out.push_back(K / std::sqrt(2 * s));
  }
  return out;
}

Decomposition decompose(const Potential& U, const MixtureMeasure& rho,
                        double x_lo, double x_hi, int points, double tol) {
  if (x_lo <= 0 || x_hi <= x_lo || points < 2) throw std::invalid_argument("decompose: bad grid");
  VValue v0 = rho.eval_V(0);
  if (v0.underflow) throw DecompositionFails("decompose: V(0) underflowed");

  Decomposition dec;
  dec.V0 = v0.value;
  double V0 = v0.value;
  dec.V = {"V[" + rho.name() + "]",
           [rho, V0](double x) { return rho.eval_V(x).value - V0; }, nullptr};
  dec.W = {"W[" + U.name + " - " + rho.name() + "]",
           [U, rho, V0](double x) { return U(x) - (rho.eval_V(x).value - V0); },
           nullptr};

  dec.grid.push_back(0.0);
  double step = std::log(x_hi / x_lo) / (points - 1);
  for (int k = 0; k < points; k++) dec.grid.push_back(x_lo * std::exp(k * step));

  double w_prev = 0.0;  // W(0) = 0 by construction
  double e_prev = v0.err;
  dec.worst_drop = kInf;
  for (size_t k = 1; k < dec.grid.size(); k++) {
    double x = dec.grid[k];
    VValue v = rho.eval_V(x);
    if (v.underflow)
      throw DecompositionFails("decompose: V underflowed at x = " + std::to_string(x) +
                               " for " + rho.name());
    double w = U(x) - (v.value - V0);
    double adj = (w - w_prev) + tol + v.err + e_prev;
    dec.worst_drop = std::min(dec.worst_drop, adj);
    if (adj < 0)
      throw DecompositionFails("decompose: W decreases by " + std::to_string(w_prev - w) +
                               " at x = " + std::to_string(x) + " for " + U.name + " / " +
                               rho.name());
    w_prev = w;
    e_prev = v.err;
  }
  return dec;
}

}  // namespace surflab
