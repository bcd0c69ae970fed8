#pragma once
#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "surflab/field.hpp"
#include "surflab/mixture.hpp"
#include "surflab/model.hpp"
#include "surflab/rng.hpp"

namespace surflab {

/// Fully enumerated finite-support resistance mixture over a tiny model.
/// Atom weights: nu(xi) proportional to det(F(xi))^(det_exponent) times
/// prod_f xi_f^-1 times prod_f rho_f(xi_f), normalized over the product grid.
/// det_exponent is -1/2 for the true measure; flipping it to +1/2 is the
/// standard corrupted-weights negative control.
struct SmallMixture {
  std::string name;
  std::string claim;  // plain-language statement the instance exercises
  FunctionalModel model;
  std::vector<std::vector<double>> grids;   // per-row support, ascending
  std::vector<std::vector<double>> grid_w;  // per-row prior weights, sum 1
  double det_exponent = -0.5;
  std::vector<double> nu;  // normalized atom weights

  int num_atoms() const;
  std::vector<int> atom_digits(int a) const;  // row 0 least significant
  std::vector<double> atom_xi(int a) const;
  SmallMixture with_det_exponent(double e) const;
};

/// Builds the mixture and its normalized weights; uniform priors when grid_w
/// is empty. Checks F(xi) is positive definite at every atom.
SmallMixture make_small_mixture(std::string name, std::string claim, FunctionalModel m,
                                std::vector<std::vector<double>> grids,
                                std::vector<std::vector<double>> grid_w = {});

struct CheckReport {
  std::string check;
  long trials = 0;
  long violations = 0;
  double worst_margin = 0;  // most negative slack observed (>= 0 when clean)
  double tolerance = 0;
};

/// det(A+B+C) det(A) <= det(A+B) det(A+C) on random draws, A positive
/// definite and B, C positive semidefinite; relative tolerance 1e-9.
CheckReport check_det_inequality(int n, int trials, Rng& rng);
/// Same statement with symmetric indefinite B, C — expected to report
/// violations (negative control for the checker).
CheckReport check_det_inequality_indefinite(int n, int trials, Rng& rng);

/// nu(a) nu(b) <= nu(a ^ b) nu(a v b) over all atom pairs, relative tol 1e-10.
CheckReport check_log_supermodular(const SmallMixture& sm);

/// E_nu[f] <= E_prior[f] for upper-set indicators: every corner set
/// {xi >= atom a}, plus `random_upper_sets` random unions of corners.
CheckReport check_stoc_domination(const SmallMixture& sm, int random_upper_sets = 100,
                                  uint64_t seed = 7);

/// Positive association under nu: E[fg] >= E[f] E[g] for monotone pairs —
/// corner indicators and random separable increasing functions.
CheckReport check_fkg(const SmallMixture& sm, int random_pairs = 100, uint64_t seed = 11);

/// P(|X_i| <= h_i for all i) for X ~ N(0, Sigma), by nested conditional
/// quadrature; h_i = +inf marginalizes coordinate i out. Sigma up to 3x3.
double gauss_box_prob(const Eigen::MatrixXd& Sigma, const std::vector<double>& h);

/// Mixture Gaussian correlation check on explicit covariances:
/// sum_i w_i P_i(K1 and K2) >= [sum w_i P_i(K1)][sum w_i P_i(K2)] - tol.
/// K given as half-widths per coordinate (inf = unconstrained), tol 1e-8.
CheckReport check_gci_mixture(const std::vector<Eigen::MatrixXd>& covs,
                              const std::vector<double>& w, const std::vector<double>& K1,
                              const std::vector<double>& K2);

/// Same with covariances F(xi)^-1 over the SmallMixture atoms.
CheckReport check_fkg_gci(const SmallMixture& sm, const std::vector<double>& K1,
                          const std::vector<double>& K2);

/// Exact enumeration of E_nu[Phi(Q_xi(y))] <= max_f E_nu[Phi(xi_f^2 Q_1(y))],
/// Q_xi(y) = y^T F(xi)^-1 y. Phi should be convex increasing; a decreasing Phi
/// is the natural negative control.
CheckReport check_convex_comparison(const SmallMixture& sm,
                                    const std::function<double(double)>& Phi,
                                    const Vec& y);

/// Monte Carlo version on a full model with iid product resistances: LHS by
/// `trials` draws of xi (one solve each), RHS by `kappa_draws` scale draws.
struct ConvexCompareMC {
  double lhs = 0, lhs_se = 0;
  double rhs = 0, rhs_se = 0;
  double q1 = 0;
};
ConvexCompareMC convex_comparison_mc(const FunctionalModel& m, const MixtureMeasure& rho,
                                     const std::function<double(double)>& Phi, const Vec& y,
                                     int trials, Rng& rng, int kappa_draws = 200000);

}  // namespace surflab
