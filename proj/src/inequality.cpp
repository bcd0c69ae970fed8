#include "surflab/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "surflab/percolation.hpp"

namespace surflab {

static constexpr double kInf = std::numeric_limits<double>::infinity();

int SmallMixture::num_atoms() const {
  int n = 1;
  for (const auto& g : grids) n *= (int)g.size();
  return n;
}

std::vector<int> SmallMixture::atom_digits(int a) const {
  std::vector<int> d(grids.size());
  for (size_t r = 0; r < grids.size(); r++) {
    d[r] = a % (int)grids[r].size();
    a /= (int)grids[r].size();
  }
  return d;
}

std::vector<double> SmallMixture::atom_xi(int a) const {
  std::vector<int> d = atom_digits(a);
  std::vector<double> xi(grids.size());
  for (size_t r = 0; r < grids.size(); r++) xi[r] = grids[r][d[r]];
  return xi;
}

namespace {

void compute_nu(SmallMixture& sm) {
  int N = sm.num_atoms();
  std::vector<double> logw(N);
  double mx = -kInf;
  for (int a = 0; a < N; a++) {
    std::vector<double> xi = sm.atom_xi(a);
    SpMat F = assemble_precision(sm.model, xi);
    Eigen::MatrixXd Fd(F);
    Eigen::LLT<Eigen::MatrixXd> llt(Fd);
    if (llt.info() != Eigen::Success)
      throw SingularPrecision("small mixture: F(xi) not positive definite at an atom");
    double logdet = 0;
    for (int i = 0; i < Fd.rows(); i++) logdet += 2 * std::log(llt.matrixL()(i, i));
    double lw = sm.det_exponent * logdet;
    std::vector<int> dig = sm.atom_digits(a);
    for (size_t r = 0; r < xi.size(); r++)
      lw += -std::log(xi[r]) + std::log(sm.grid_w[r][dig[r]]);
    logw[a] = lw;
    mx = std::max(mx, lw);
  }
  double tot = 0;
  sm.nu.assign(N, 0.0);
  for (int a = 0; a < N; a++) tot += (sm.nu[a] = std::exp(logw[a] - mx));
  for (double& w : sm.nu) w /= tot;
}

}  // namespace

SmallMixture SmallMixture::with_det_exponent(double e) const {
  SmallMixture out = *this;
  out.det_exponent = e;
  compute_nu(out);
  return out;
}

SmallMixture make_small_mixture(std::string name, std::string claim, FunctionalModel m,
                                std::vector<std::vector<double>> grids,
                                std::vector<std::vector<double>> grid_w) {
  if ((int)grids.size() != m.num_functionals())
    throw std::invalid_argument("small mixture: one grid per row required");
  for (auto& g : grids) {
    if (g.empty() || !std::is_sorted(g.begin(), g.end()))
      throw std::invalid_argument("small mixture: grids must be ascending");
    for (double v : g)
      if (!(v > 0)) throw std::invalid_argument("small mixture: grid values must be > 0");
  }
  if (grid_w.empty()) {
    for (const auto& g : grids) grid_w.push_back(std::vector<double>(g.size(), 1.0 / g.size()));
  }
  if (grid_w.size() != grids.size())
    throw std::invalid_argument("small mixture: grid_w shape mismatch");
  for (size_t r = 0; r < grids.size(); r++) {
    if (grid_w[r].size() != grids[r].size())
      throw std::invalid_argument("small mixture: grid_w shape mismatch");
    double s = std::accumulate(grid_w[r].begin(), grid_w[r].end(), 0.0);
    if (std::fabs(s - 1) > 1e-12)
      throw std::invalid_argument("small mixture: prior weights must sum to 1");
  }
  SmallMixture sm;
  sm.name = std::move(name);
  sm.claim = std::move(claim);
  sm.model = std::move(m);
  sm.grids = std::move(grids);
  sm.grid_w = std::move(grid_w);
  compute_nu(sm);
  return sm;
}

CheckReport check_det_inequality(int n, int trials, Rng& rng) {
  CheckReport rep{"det-abc", 0, 0, kInf, 1e-9};
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> rank(1, n);
  auto gauss_mat = [&](int rows, int cols) {
    Eigen::MatrixXd G(rows, cols);
    for (int i = 0; i < rows; i++)
      for (int j = 0; j < cols; j++) G(i, j) = normal(rng);
    return G;
  };
  for (int t = 0; t < trials; t++) {
    Eigen::MatrixXd G = gauss_mat(n, n);
    Eigen::MatrixXd A = G * G.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd H1 = gauss_mat(n, rank(rng)), H2 = gauss_mat(n, rank(rng));
    Eigen::MatrixXd B = H1 * H1.transpose(), C = H2 * H2.transpose();
    double lhs = (A + B + C).determinant() * A.determinant();
    double rhs = (A + B).determinant() * (A + C).determinant();
    double margin = (rhs - lhs) / std::max({std::fabs(rhs), std::fabs(lhs), 1e-300});
    rep.trials++;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -rep.tolerance) rep.violations++;
  }
  return rep;
}

CheckReport check_det_inequality_indefinite(int n, int trials, Rng& rng) {
  CheckReport rep{"det-abc-indefinite-control", 0, 0, kInf, 1e-9};
  std::normal_distribution<double> normal(0.0, 1.0);
  auto sym_mat = [&]() {
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++) G(i, j) = normal(rng);
    return Eigen::MatrixXd(0.5 * (G + G.transpose()));
  };
  for (int t = 0; t < trials; t++) {
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++) G(i, j) = normal(rng);
    Eigen::MatrixXd A = G * G.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd B = sym_mat(), C = sym_mat();
    double lhs = (A + B + C).determinant() * A.determinant();
    double rhs = (A + B).determinant() * (A + C).determinant();
    double margin = (rhs - lhs) / std::max({std::fabs(rhs), std::fabs(lhs), 1e-300});
    rep.trials++;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -rep.tolerance) rep.violations++;
  }
  return rep;
}

CheckReport check_log_supermodular(const SmallMixture& sm) {
  CheckReport rep{"log-supermodular", 0, 0, kInf, 1e-10};
  int N = sm.num_atoms();
  int R = (int)sm.grids.size();
  std::vector<std::vector<int>> dig(N);
  for (int a = 0; a < N; a++) dig[a] = sm.atom_digits(a);
  std::vector<int> radix(R);
  for (int r = 0; r < R; r++) radix[r] = (int)sm.grids[r].size();
  auto index_of = [&](const std::vector<int>& d) {
    int a = 0;
    for (int r = R - 1; r >= 0; r--) a = a * radix[r] + d[r];
    return a;
  };
  std::vector<int> lo(R), hi(R);
  for (int a = 0; a < N; a++)
    for (int b = a; b < N; b++) {
      for (int r = 0; r < R; r++) {
        lo[r] = std::min(dig[a][r], dig[b][r]);
        hi[r] = std::max(dig[a][r], dig[b][r]);
      }
      double lhs = sm.nu[a] * sm.nu[b];
      double rhs = sm.nu[index_of(lo)] * sm.nu[index_of(hi)];
      double margin = (rhs - lhs) / std::max({lhs, rhs, 1e-300});
      rep.trials++;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      if (margin < -rep.tolerance) rep.violations++;
    }
  return rep;
}

namespace {

// expectation of an upper-set indicator under atom weights
double upper_mass(const SmallMixture& sm, const std::vector<std::vector<int>>& dig,
                  const std::vector<double>& w,
                  const std::vector<std::vector<int>>& corners) {
  double s = 0;
  for (size_t a = 0; a < dig.size(); a++) {
    bool inside = false;
    for (const auto& c : corners) {
      bool ge = true;
      for (size_t r = 0; r < c.size() && ge; r++) ge = dig[a][r] >= c[r];
      if (ge) {
        inside = true;
        break;
      }
    }
    if (inside) s += w[a];
  }
  return s;
}

}  // namespace

CheckReport check_stoc_domination(const SmallMixture& sm, int random_upper_sets,
                                  uint64_t seed) {
  CheckReport rep{"stoc-domination", 0, 0, kInf, 1e-10};
  int N = sm.num_atoms();
  int R = (int)sm.grids.size();
  std::vector<std::vector<int>> dig(N);
  std::vector<double> prior(N);
  for (int a = 0; a < N; a++) {
    dig[a] = sm.atom_digits(a);
    double p = 1;
    for (int r = 0; r < R; r++) p *= sm.grid_w[r][dig[a][r]];
    prior[a] = p;
  }
  auto run = [&](const std::vector<std::vector<int>>& corners) {
    double under_nu = upper_mass(sm, dig, sm.nu, corners);
    double under_prior = upper_mass(sm, dig, prior, corners);
    double margin = under_prior - under_nu;
    rep.trials++;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -rep.tolerance) rep.violations++;
  };
  for (int a = 0; a < N; a++) run({dig[a]});
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> pick(0, N - 1), count(1, 3);
  for (int t = 0; t < random_upper_sets; t++) {
    std::vector<std::vector<int>> corners;
    int k = count(rng);
    for (int i = 0; i < k; i++) corners.push_back(dig[pick(rng)]);
    run(corners);
  }
  return rep;
}

CheckReport check_fkg(const SmallMixture& sm, int random_pairs, uint64_t seed) {
  CheckReport rep{"fkg", 0, 0, kInf, 1e-10};
  int N = sm.num_atoms();
  int R = (int)sm.grids.size();
  std::vector<std::vector<int>> dig(N);
  for (int a = 0; a < N; a++) dig[a] = sm.atom_digits(a);

  auto test_pair = [&](const std::vector<double>& f, const std::vector<double>& g) {
    double ef = 0, eg = 0, efg = 0, vf = 0, vg = 0, mf = 0, mg = 0;
    for (int a = 0; a < N; a++) {
      ef += sm.nu[a] * f[a];
      eg += sm.nu[a] * g[a];
      efg += sm.nu[a] * f[a] * g[a];
      mf = std::max(mf, std::fabs(f[a]));
      mg = std::max(mg, std::fabs(g[a]));
    }
    for (int a = 0; a < N; a++) {
      vf += sm.nu[a] * (f[a] - ef) * (f[a] - ef);
      vg += sm.nu[a] * (g[a] - eg) * (g[a] - eg);
    }
    // a covariance below the accumulation roundoff of the three sums is zero;
    // without this floor a constant corner function (variance ~ ulp^2) turns
    // rounding noise into an arbitrarily large normalized "violation"
    double cov = efg - ef * eg;
    if (std::fabs(cov) < 64 * N * std::numeric_limits<double>::epsilon() * mf * mg)
      cov = 0;
    double margin = cov / (std::sqrt(vf * vg) + 1e-30);
    rep.trials++;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -rep.tolerance) rep.violations++;
  };

  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> pick(0, N - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto corner_fn = [&](const std::vector<int>& c) {
    std::vector<double> f(N, 0.0);
    for (int a = 0; a < N; a++) {
      bool ge = true;
      for (int r = 0; r < R && ge; r++) ge = dig[a][r] >= c[r];
      f[a] = ge ? 1.0 : 0.0;
    }
    return f;
  };
  auto separable_fn = [&]() {
    // sum over rows of a random nondecreasing step function of the digit
    std::vector<std::vector<double>> steps(R);
    for (int r = 0; r < R; r++) {
      double acc = 0;
      for (size_t k = 0; k < sm.grids[r].size(); k++) steps[r].push_back(acc += unif(rng));
    }
    std::vector<double> f(N, 0.0);
    for (int a = 0; a < N; a++)
      for (int r = 0; r < R; r++) f[a] += steps[r][dig[a][r]];
    return f;
  };
  for (int t = 0; t < random_pairs / 2; t++)
    test_pair(corner_fn(dig[pick(rng)]), corner_fn(dig[pick(rng)]));
  for (int t = 0; t < random_pairs - random_pairs / 2; t++)
    test_pair(separable_fn(), separable_fn());
  return rep;
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x, double var) {
  return std::exp(-x * x / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

// P(X in [lo, hi]) for X ~ N(mu, Sigma), nested conditional quadrature
double box_prob_rec(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& mu,
                    const std::vector<double>& lo, const std::vector<double>& hi) {
  int n = (int)lo.size();
  double s11 = Sigma(0, 0);
  if (n == 1) {
    if (s11 <= 1e-300) return (mu[0] >= lo[0] && mu[0] <= hi[0]) ? 1.0 : 0.0;
    double sd = std::sqrt(s11);
    return normal_cdf((hi[0] - mu[0]) / sd) - normal_cdf((lo[0] - mu[0]) / sd);
  }
  Eigen::VectorXd s1r = Sigma.block(1, 0, n - 1, 1);
  Eigen::MatrixXd cond = Sigma.block(1, 1, n - 1, n - 1) - s1r * s1r.transpose() / s11;
  std::vector<double> lor(lo.begin() + 1, lo.end()), hir(hi.begin() + 1, hi.end());
  auto f = [&](double x1) {
    Eigen::VectorXd cmu = mu.tail(n - 1) + s1r * ((x1 - mu[0]) / s11);
    return normal_pdf(x1 - mu[0], s11) * box_prob_rec(cond, cmu, lor, hir);
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo[0], hi[0], 10,
                                                                       1e-9);
}

}  // namespace

double gauss_box_prob(const Eigen::MatrixXd& Sigma, const std::vector<double>& h) {
  if ((int)h.size() != Sigma.rows())
    throw std::invalid_argument("gauss_box_prob: dimension mismatch");
  std::vector<int> keep;
  for (size_t i = 0; i < h.size(); i++) {
    if (h[i] < 0) throw std::invalid_argument("gauss_box_prob: negative half-width");
    if (std::isfinite(h[i])) keep.push_back((int)i);
  }
  if (keep.empty()) return 1.0;
  int n = (int)keep.size();
  if (n > 3) throw std::invalid_argument("gauss_box_prob: more than 3 finite coordinates");
  Eigen::MatrixXd S(n, n);
  std::vector<double> lo(n), hi(n);
  for (int i = 0; i < n; i++) {
    for (int j = 0; j < n; j++) S(i, j) = Sigma(keep[i], keep[j]);
    hi[i] = h[keep[i]];
    lo[i] = -hi[i];
  }
  return box_prob_rec(S, Eigen::VectorXd::Zero(n), lo, hi);
}

CheckReport check_gci_mixture(const std::vector<Eigen::MatrixXd>& covs,
                              const std::vector<double>& w, const std::vector<double>& K1,
                              const std::vector<double>& K2) {
  if (covs.size() != w.size() || covs.empty())
    throw std::invalid_argument("check_gci_mixture: weights/covariances mismatch");
  CheckReport rep{"fkg-gci", 1, 0, 0, 1e-8};
  std::vector<double> K12(K1.size());
  for (size_t i = 0; i < K1.size(); i++) K12[i] = std::min(K1[i], K2[i]);
  double g12 = 0, g1 = 0, g2 = 0;
  for (size_t i = 0; i < covs.size(); i++) {
    g12 += w[i] * gauss_box_prob(covs[i], K12);
    g1 += w[i] * gauss_box_prob(covs[i], K1);
    g2 += w[i] * gauss_box_prob(covs[i], K2);
  }
  rep.worst_margin = g12 - g1 * g2;
  if (rep.worst_margin < -rep.tolerance) rep.violations = 1;
  return rep;
}

CheckReport check_fkg_gci(const SmallMixture& sm, const std::vector<double>& K1,
                          const std::vector<double>& K2) {
  int N = sm.num_atoms();
  std::vector<Eigen::MatrixXd> covs;
  covs.reserve(N);
  for (int a = 0; a < N; a++) {
    SpMat F = assemble_precision(sm.model, sm.atom_xi(a));
    covs.push_back(Eigen::MatrixXd(F).inverse());
  }
  return check_gci_mixture(covs, sm.nu, K1, K2);
}

CheckReport check_convex_comparison(const SmallMixture& sm,
                                    const std::function<double(double)>& Phi,
                                    const Vec& y) {
  CheckReport rep{"convex-comparison", 1, 0, 0, 0};
  int N = sm.num_atoms();
  int R = (int)sm.grids.size();
  Eigen::MatrixXd F1(assemble_precision(sm.model, std::vector<double>(R, 1.0)));
  double q1 = y.dot(F1.llt().solve(y));
  double lhs = 0;
  std::vector<double> rhs(R, 0.0);
  for (int a = 0; a < N; a++) {
    std::vector<double> xi = sm.atom_xi(a);
    Eigen::MatrixXd F(assemble_precision(sm.model, xi));
    lhs += sm.nu[a] * Phi(y.dot(F.llt().solve(y)));
    for (int r = 0; r < R; r++) rhs[r] += sm.nu[a] * Phi(xi[r] * xi[r] * q1);
  }
  double best = *std::max_element(rhs.begin(), rhs.end());
  rep.tolerance = 1e-10 * std::max(1.0, std::fabs(best));
  rep.worst_margin = best - lhs;
  if (rep.worst_margin < -rep.tolerance) rep.violations = 1;
  return rep;
}

ConvexCompareMC convex_comparison_mc(const FunctionalModel& m, const MixtureMeasure& rho,
                                     const std::function<double(double)>& Phi, const Vec& y,
                                     int trials, Rng& rng, int kappa_draws) {
  if (trials < 2 || kappa_draws < 2)
    throw std::invalid_argument("convex_comparison_mc: need at least 2 draws");
  ConvexCompareMC out;
  GaussianField unit(m, std::vector<double>(m.num_functionals(), 1.0));
  out.q1 = y.dot(unit.solve(y));
  double s = 0, s2 = 0;
  for (int t = 0; t < trials; t++) {
    std::vector<double> xi = iid_xi(m, rho, rng);
    GaussianField gf(m, xi);
    double v = Phi(y.dot(gf.solve(y)));
    s += v;
    s2 += v * v;
  }
  out.lhs = s / trials;
  out.lhs_se = std::sqrt(std::max(0.0, s2 / trials - out.lhs * out.lhs) / trials);
  s = s2 = 0;
  for (int t = 0; t < kappa_draws; t++) {
    double k = rho.sample(rng);
    double v = Phi(k * k * out.q1);
    s += v;
    s2 += v * v;
  }
  out.rhs = s / kappa_draws;
  out.rhs_se = std::sqrt(std::max(0.0, s2 / kappa_draws - out.rhs * out.rhs) / kappa_draws);
  return out;
}

}  // namespace surflab
