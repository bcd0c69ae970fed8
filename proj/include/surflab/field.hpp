#pragma once
#include <Eigen/Sparse>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

#include "surflab/model.hpp"
#include "surflab/rng.hpp"

namespace surflab {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct SingularPrecision : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Disconnected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SolverBackend { Auto, Direct, Cholmod, CG };

/// y^T phi for one functional row.
double functional_value(const Functional& f, const Vec& phi);

/// F(xi) = sum_f xi_f^-2 y_f y_f^T over live functionals (infinite-resistance
/// rows contribute nothing). xi.size() must equal m.num_functionals().
SpMat assemble_precision(const FunctionalModel& m, const std::vector<double>& xi);

/// The centered Gaussian field with precision F(xi), plus solves against F.
/// Auto backend: sparse Cholesky up to n = 2000, CHOLMOD (when built in) up to
/// n = 1e5, conjugate gradient with Jacobi preconditioning (tol 1e-12) beyond.
class GaussianField {
 public:
  GaussianField(const FunctionalModel& m, const std::vector<double>& xi,
                SolverBackend backend = SolverBackend::Auto);
  ~GaussianField();
  GaussianField(GaussianField&&) noexcept;
  GaussianField& operator=(GaussianField&&) noexcept;

  int n() const;
  SolverBackend backend() const;  // backend actually in use
  const SpMat& precision() const;

  Vec solve(const Vec& b) const;
  double variance(int v) const;           // (F^-1)_vv
  double covariance(int u, int v) const;  // (F^-1)_uv

  /// Exact draw from N(0, F^-1): backward substitution through the Cholesky
  /// factor on the direct path; otherwise the perturbation identity
  /// b = sum_f y_f z_f, z_f ~ N(0, xi_f^-2), phi = F^-1 b.
  Vec sample(Rng& rng) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Effective resistance in the resistor network read off the functionals: a
/// two-entry (+1/-1) row is an edge of resistance xi^2, a single-entry row ties
/// its vertex to the ground node. Measures v against w, or against ground when
/// w = -1. Assembled as a graph Laplacian with the target pinned, independently
/// of assemble_precision. Throws Disconnected when v and the target are in
/// different components after infinite-resistance pruning, invalid_argument
/// when a live row has another shape.
double effective_resistance(const FunctionalModel& m, const std::vector<double>& xi,
                            int v, int w = -1);

/// Coordinate-format matrix-market text dump, for debugging.
void write_matrix_market(const SpMat& A, std::ostream& out);

}  // namespace surflab
