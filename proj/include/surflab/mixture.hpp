#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "surflab/potential.hpp"
#include "surflab/rng.hpp"

namespace surflab {

enum class MixtureKind { ShiftedPareto, TiltedStable, TwoPoint, Empirical };

/// Result of evaluating V(x) = -log integral e^{-x^2/2k^2}/(k sqrt(2 pi)) drho(k).
/// err is the quadrature tolerance (closed-form kinds) or one Monte Carlo
/// standard error of the mixture value, propagated through the log.
struct VValue {
  double value = 0;
  double err = 0;
  bool underflow = false;  // integral underflowed to zero; value is +inf
};

/// Scale measure on (0, infinity). Immutable; sampling takes the caller's RNG.
/// Tilted-stable instances carry a construction-time sample cache (independence
/// Metropolis against the raw stable proposal, burn-in 1000, thinning 10);
/// sample() and eval_V() on that kind resample / average this cache.
class MixtureMeasure {
 public:
  /// Density proportional to k^(-alpha-1) on [A, inf), A = 1 + eps^(-1/2).
  static MixtureMeasure shifted_pareto(double alpha, double eps);
  /// kappa = kappa1 with probability w, else kappa2.
  static MixtureMeasure two_point(double kappa1, double kappa2, double w);
  /// Mixture with exp(-V) proportional to exp(-(1+(x/K)^2)^(beta/2)):
  /// over s = 1/(2 kappa^2), density proportional to e^-s s^-1/2 p_{beta/2}(s)
  /// with p the one-sided stable density. beta in (0, 2).
  static MixtureMeasure tilted_stable(double beta, double K,
                                      int cache_size = 30000,
                                      uint64_t cache_seed = 0x5eedcafeULL);
  static MixtureMeasure empirical(std::vector<double> atoms);

  MixtureKind kind() const { return kind_; }
  std::string name() const;
  double alpha() const { return alpha_; }
  double A() const { return A_; }
  double beta() const { return beta_; }
  double K() const { return K_; }
  double kappa1() const { return k1_; }
  double kappa2() const { return k2_; }
  double weight1() const { return w_; }
  const std::vector<double>& atoms() const { return atoms_; }

  double sample(Rng& rng) const;
  /// Inverse CDF. Exact for shifted-pareto/two-point, order statistics of the
  /// atom list otherwise.
  double quantile(double u) const;
  double cdf(double k) const;
  double median() const { return quantile(0.5); }
  /// integral k^-1 drho; closed form alpha/((alpha+1) A) for shifted-pareto.
  double inv_first_moment() const;

  VValue eval_V(double x) const;

  /// Draw kappa | delta with density proportional to k^-1 e^{-delta^2/2k^2} rho(dk).
  /// Shifted-pareto reduces to a truncated Gamma in t = k^-2 (Pareto(alpha+1)
  /// at delta = 0); two-point/empirical reweight atoms. Unsupported for
  /// tilted-stable (no closed-form density).
  double sample_posterior(double delta, Rng& rng) const;

 private:
  MixtureKind kind_ = MixtureKind::TwoPoint;
  double alpha_ = 0, A_ = 0;
  double beta_ = 0, K_ = 1;
  double k1_ = 1, k2_ = 1, w_ = 1;
  std::vector<double> atoms_;         // tilted-stable cache or empirical support
  std::vector<double> sorted_atoms_;  // for quantiles/CDF
};

/// One-sided positive stable S_a, Laplace transform exp(-lambda^a), a in (0,1).
double sample_stable_positive(double a, Rng& rng);

/// Fresh tilted-stable kappa chain (not the cache): independence Metropolis
/// with weight e^-s s^-1/2 against the stable proposal.
std::vector<double> tilted_stable_chain(double beta, double K, int n, Rng& rng,
                                        int burnin = 1000, int thin = 10);

struct DecompositionFails : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// U = V + W with V the mixture potential shifted so V(0) = 0 and W(0) = 0.
struct Decomposition {
  Potential V;  // x -> eval_V(x) - V(0)
  Potential W;  // U - V
  double V0 = 0;
  double worst_drop = 0;  // most negative allowed-slack-adjusted increment of W
  std::vector<double> grid;
};

/// Verify W = U - V is nondecreasing on [0, infinity) along a log grid
/// (0 prepended); per-step slack is tol + eval errors at both ends.
/// Throws DecompositionFails on a violation.
Decomposition decompose(const Potential& U, const MixtureMeasure& rho,
                        double x_lo = 1e-3, double x_hi = 1e3,
                        int points = 200, double tol = 1e-8);

}  // namespace surflab
