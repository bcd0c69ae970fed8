#include "surflab/field.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <random>

#ifdef SURFLAB_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

namespace surflab {

double functional_value(const Functional& f, const Vec& phi) {
  double s = 0;
  for (auto [v, c] : f.entries) s += c * phi[v];
  return s;
}

SpMat assemble_precision(const FunctionalModel& m, const std::vector<double>& xi) {
  if ((int)xi.size() != m.num_functionals())
    throw std::invalid_argument("assemble_precision: xi size mismatch");
  std::vector<Eigen::Triplet<double>> trip;
  for (int f = 0; f < m.num_functionals(); f++) {
    const Functional& fn = m.functionals[f];
    if (fn.inf_resistance) continue;
    if (!(xi[f] > 0) || !std::isfinite(xi[f]))
      throw std::invalid_argument("assemble_precision: xi must be finite positive");
    double c = 1 / (xi[f] * xi[f]);
    for (auto [u, cu] : fn.entries)
      for (auto [v, cv] : fn.entries) trip.emplace_back(u, v, c * cu * cv);
  }
  SpMat F(m.n, m.n);
  F.setFromTriplets(trip.begin(), trip.end());
  return F;
}

struct GaussianField::Impl {
  int n = 0;
  SolverBackend chosen = SolverBackend::Direct;
  SpMat F;
  // live rows and their noise scale 1/xi, for perturbation draws
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> sd;
  Eigen::SimplicialLLT<SpMat> llt;
#ifdef SURFLAB_HAVE_CHOLMOD
  Eigen::CholmodSupernodalLLT<SpMat> chol;
#endif
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
};

GaussianField::GaussianField(const FunctionalModel& m, const std::vector<double>& xi,
                             SolverBackend backend)
    : impl_(new Impl) {
  impl_->n = m.n;
  impl_->F = assemble_precision(m, xi);
  for (int f = 0; f < m.num_functionals(); f++) {
    if (m.functionals[f].inf_resistance) continue;
    impl_->rows.push_back(m.functionals[f].entries);
    impl_->sd.push_back(1 / xi[f]);
  }

  SolverBackend b = backend;
  if (b == SolverBackend::Auto) {
#ifdef SURFLAB_HAVE_CHOLMOD
    b = m.n <= 2000 ? SolverBackend::Direct
        : m.n <= 100000 ? SolverBackend::Cholmod
                        : SolverBackend::CG;
#else
    b = m.n <= 2000 ? SolverBackend::Direct : SolverBackend::CG;
#endif
  }
#ifndef SURFLAB_HAVE_CHOLMOD
  if (b == SolverBackend::Cholmod)
    throw std::invalid_argument("GaussianField: built without CHOLMOD");
#endif
  impl_->chosen = b;

  switch (b) {
    case SolverBackend::Direct:
      impl_->llt.compute(impl_->F);
      if (impl_->llt.info() != Eigen::Success)
        throw SingularPrecision("GaussianField: Cholesky factorization failed");
      break;
#ifdef SURFLAB_HAVE_CHOLMOD
    case SolverBackend::Cholmod:
      impl_->chol.compute(impl_->F);
      if (impl_->chol.info() != Eigen::Success)
        throw SingularPrecision("GaussianField: CHOLMOD factorization failed");
      break;
#endif
    default:
      impl_->cg.setTolerance(1e-12);
      impl_->cg.compute(impl_->F);
      if (impl_->cg.info() != Eigen::Success)
        throw SingularPrecision("GaussianField: CG setup failed");
      break;
  }
}

GaussianField::~GaussianField() = default;
GaussianField::GaussianField(GaussianField&&) noexcept = default;
GaussianField& GaussianField::operator=(GaussianField&&) noexcept = default;

int GaussianField::n() const { return impl_->n; }
SolverBackend GaussianField::backend() const { return impl_->chosen; }
const SpMat& GaussianField::precision() const { return impl_->F; }

Vec GaussianField::solve(const Vec& b) const {
  switch (impl_->chosen) {
    case SolverBackend::Direct:
      return impl_->llt.solve(b);
#ifdef SURFLAB_HAVE_CHOLMOD
    case SolverBackend::Cholmod:
      return impl_->chol.solve(b);
#endif
    default: {
      Vec x = impl_->cg.solve(b);
      if (impl_->cg.info() != Eigen::Success)
        throw SingularPrecision("GaussianField: CG did not converge");
      return x;
    }
  }
}

double GaussianField::variance(int v) const { return covariance(v, v); }

double GaussianField::covariance(int u, int v) const {
  Vec e = Vec::Zero(impl_->n);
  e[v] = 1;
  return solve(e)[u];
}

Vec GaussianField::sample(Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  if (impl_->chosen == SolverBackend::Direct) {
    Vec z(impl_->n);
    for (int i = 0; i < impl_->n; i++) z[i] = normal(rng);
    // F = P^T L L^T P, so x = P^T L^-T z has covariance F^-1
    Vec y = impl_->llt.matrixU().solve(z);
    return impl_->llt.permutationPinv() * y;
  }
  Vec b = Vec::Zero(impl_->n);
  for (size_t f = 0; f < impl_->rows.size(); f++) {
    double z = impl_->sd[f] * normal(rng);
    for (auto [v, c] : impl_->rows[f]) b[v] += c * z;
  }
  return solve(b);
}

double effective_resistance(const FunctionalModel& m, const std::vector<double>& xi,
                            int v, int w) {
  if ((int)xi.size() != m.num_functionals())
    throw std::invalid_argument("effective_resistance: xi size mismatch");
  if (v < 0 || v >= m.n) throw std::invalid_argument("effective_resistance: bad vertex");
  if (w >= m.n || w < -1) throw std::invalid_argument("effective_resistance: bad target");
  if (w == v) throw std::invalid_argument("effective_resistance: v == w");

  // nodes 0..n-1 plus ground node n; the target is pinned to potential 0
  int ground = m.n;
  std::vector<std::pair<std::pair<int, int>, double>> links;  // ((a,b), conductance)
  bool has_ground = false;
  for (int f = 0; f < m.num_functionals(); f++) {
    const Functional& fn = m.functionals[f];
    if (fn.inf_resistance) continue;
    double c = 1 / (xi[f] * xi[f]);
    if (fn.entries.size() == 1 && std::fabs(fn.entries[0].second) == 1) {
      links.push_back({{fn.entries[0].first, ground}, c});
      has_ground = true;
    } else if (fn.entries.size() == 2 && std::fabs(fn.entries[0].second) == 1 &&
               fn.entries[0].second == -fn.entries[1].second) {
      links.push_back({{fn.entries[0].first, fn.entries[1].first}, c});
    } else {
      throw std::invalid_argument("effective_resistance: row is not an edge");
    }
  }
  int target = w >= 0 ? w : ground;
  if (w < 0 && !has_ground)
    throw Disconnected("effective_resistance: model has no boundary rows");

  std::vector<std::vector<int>> adj(m.n + 1);
  for (const auto& l : links) {
    adj[l.first.first].push_back(l.first.second);
    adj[l.first.second].push_back(l.first.first);
  }
  std::vector<char> reach(m.n + 1, 0);
  std::deque<int> queue{v};
  reach[v] = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int z : adj[u])
      if (!reach[z]) {
        reach[z] = 1;
        queue.push_back(z);
      }
  }
  if (!reach[target])
    throw Disconnected("effective_resistance: endpoints in different components");

  // Laplacian over the component with the target's row and column removed
  std::vector<int> id(m.n + 1, -1);
  int nr = 0;
  for (int u = 0; u <= m.n; u++)
    if (reach[u] && u != target) id[u] = nr++;
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& l : links) {
    auto [a, b] = l.first;
    if (!reach[a]) continue;
    int ia = id[a], ib = id[b];
    if (ia >= 0) trip.emplace_back(ia, ia, l.second);
    if (ib >= 0) trip.emplace_back(ib, ib, l.second);
    if (ia >= 0 && ib >= 0) {
      trip.emplace_back(ia, ib, -l.second);
      trip.emplace_back(ib, ia, -l.second);
    }
  }
  SpMat L(nr, nr);
  L.setFromTriplets(trip.begin(), trip.end());
  Vec e = Vec::Zero(nr);
  e[id[v]] = 1;

  if (nr <= 2000) {
    Eigen::SimplicialLLT<SpMat> llt(L);
    if (llt.info() != Eigen::Success)
      throw SingularPrecision("effective_resistance: factorization failed");
    return llt.solve(e)[id[v]];
  }
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-12);
  cg.compute(L);
  Vec x = cg.solve(e);
  if (cg.info() != Eigen::Success)
    throw SingularPrecision("effective_resistance: CG did not converge");
  return x[id[v]];
}

void write_matrix_market(const SpMat& A, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  char buf[64];
  for (int k = 0; k < A.outerSize(); k++)
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", long(it.row() + 1),
                    long(it.col() + 1), it.value());
      out << buf;
    }
}

}  // namespace surflab
