#include "surflab/corpus.hpp"

#include "surflab/mixture.hpp"
#include "surflab/model.hpp"

namespace surflab {

namespace {

using Grid = std::vector<double>;
using Grids = std::vector<Grid>;
using Weights = std::vector<std::vector<double>>;

Grids repeat(const Grid& g, int rows) { return Grids((size_t)rows, g); }

// triangle on three vertices with one edge to ground at vertex 0
FunctionalModel triangle_grounded() {
  return from_functionals(3, {{{0, 1.0}, {1, -1.0}},
                              {{1, 1.0}, {2, -1.0}},
                              {{0, 1.0}, {2, -1.0}},
                              {{0, 1.0}}});
}

}  // namespace

std::vector<SmallMixture> standard_corpus() {
  const Grid two{1.0, 2.0};
  const Grid four{0.5, 1.0, 2.0, 4.0};
  MixtureMeasure pareto = MixtureMeasure::shifted_pareto(3.0, 1.0);
  Grid pq4;  // four-point discretization of the shifted-Pareto scale law
  for (double u : {0.125, 0.375, 0.625, 0.875}) pq4.push_back(pareto.quantile(u));
  const Grid pq2{pareto.quantile(0.25), pareto.quantile(0.75)};

  std::vector<SmallMixture> c;
  c.push_back(make_small_mixture(
      "site1-2pt", "two scales on a single grounded edge: measures on a chain are always log-supermodular; domination and association reduce to one coordinate",
      make_single_site(1), {two}));
  c.push_back(make_small_mixture(
      "site1-4pt", "four scales on a single grounded edge, uniform prior",
      make_single_site(1), {four}));
  c.push_back(make_small_mixture(
      "site1-skew", "two scales on a single grounded edge with a 9:1 prior",
      make_single_site(1), {two}, {{0.9, 0.1}}));
  c.push_back(make_small_mixture(
      "site2-2pt", "one vertex held by two parallel ground edges; the determinant weight couples the coordinates",
      make_single_site(2), repeat(two, 2)));
  c.push_back(make_small_mixture(
      "site2-wide", "parallel ground edges with a decade of scale spread and a skewed prior",
      make_single_site(2), repeat({1.0, 10.0}, 2),
      {{0.7, 0.3}, {0.7, 0.3}}));
  c.push_back(make_small_mixture(
      "site3-2pt", "one vertex on three parallel ground edges, scales half and five",
      make_single_site(3), repeat({0.5, 5.0}, 3)));
  c.push_back(make_small_mixture(
      "site4-pareto", "four parallel ground edges with a four-point discretized Pareto scale law",
      make_single_site(4), repeat(pq4, 4)));
  c.push_back(make_small_mixture(
      "path1-4pt", "interior vertex wired on both sides, Pareto-quantile grid per edge",
      make_wired_path(1), repeat(pq4, 2)));
  c.push_back(make_small_mixture(
      "path2-2pt", "two-vertex wired path over a two-point grid: all 64 atom pairs enumerable",
      make_wired_path(2), repeat(two, 3)));
  c.push_back(make_small_mixture(
      "path2-4pt", "two-vertex wired path over a four-point grid per edge",
      make_wired_path(2), repeat(four, 3)));
  c.push_back(make_small_mixture(
      "path2-mixed", "two-vertex wired path with unequal per-edge grids",
      make_wired_path(2), {two, four, two}));
  c.push_back(make_small_mixture(
      "path2-pareto", "two-vertex wired path with Pareto quartile scales",
      make_wired_path(2), repeat(pq2, 3)));
  c.push_back(make_small_mixture(
      "path3-2pt", "three-vertex wired path over a two-point grid",
      make_wired_path(3), repeat(two, 4)));
  c.push_back(make_small_mixture(
      "path3-skew", "three-vertex wired path, small scales favored 3:1",
      make_wired_path(3), repeat({0.2, 1.0}, 4),
      Weights(4, {0.25, 0.75})));
  c.push_back(make_small_mixture(
      "triangle-2pt", "grounded triangle: a cycle makes the determinant weight non-factorizable",
      triangle_grounded(), repeat(two, 4)));
  c.push_back(make_small_mixture(
      "triangle-mixed", "grounded triangle, four-point grids on the cycle and a two-point ground edge",
      triangle_grounded(), {four, four, four, two}));
  c.push_back(make_small_mixture(
      "tree22-2pt", "depth-two binary tree wired at the leaves",
      build_tree(2, 2), repeat({1.0, 3.0}, 4)));
  c.push_back(make_small_mixture(
      "freepin3-2pt", "free three-point path pinned at the middle vertex; edge rows with the pinned entry dropped",
      build_lattice_box(1, 1, BoundaryKind::FreePinned), repeat(two, 2)));
  c.push_back(make_small_mixture(
      "bilap3-2pt", "second-order rows (discrete bilaplacian) on a three-point box",
      build_lattice_box(1, 1, BoundaryKind::Wired, 2), repeat(two, 5)));
  c.push_back(make_small_mixture(
      "box1d-4pt", "one-dimensional wired box with interior and boundary edges on a four-point grid",
      build_lattice_box(1, 1, BoundaryKind::Wired, 1), repeat(four, 4)));
  return c;
}

std::vector<RegistryEntry> registry() {
  std::vector<RegistryEntry> r{
      {"potential", "quadratic(c)", "pure quadratic interaction c x^2 / 2; the exactly Gaussian reference case"},
      {"potential", "splice(α,ε)",
       "quadratic core ε x^2/2 spliced at x = sqrt((α+1)/ε) to (α+1) log growth; derivative at least min(εx, (α+1)/x), the borderline slow-growth class"},
      {"potential", "poly(β,ε)",
       "(ε/β)|x|^β for 0 < β <= 2; derivative at least ε min(x, x^(β-1)), giving stretched-exponential level tails"},
      {"potential", "power-interp(β,K)",
       "(1+(x/K)^2)^(β/2) - 1: quadratic near zero, |x/K|^β at infinity; the potential reproduced exactly by the tilted-stable scale mixture"},
      {"mixture", "pareto-mixture(α,ε)",
       "scale density α A^α κ^(-α-1) on [A,∞), A = 1+ε^(-1/2); mixing centered Gaussians over it yields a potential whose level tails decay like κ^(-α)"},
      {"mixture", "two-point(κ1,κ2,w)",
       "two Gaussian scales with weights w and 1-w; the smallest mixture with a nontrivial scale posterior"},
      {"mixture", "tilted-stable(β,K)",
       "density over s = 1/(2κ^2) proportional to e^(-s) s^(-1/2) times the positive β/2-stable density; mixes Gaussians exactly into (1+(x/K)^2)^(β/2) - 1"},
      {"mixture", "empirical(data)",
       "finite atom list with equal weights; the plug-in scale law recovered from chain output"},
  };
  for (const SmallMixture& sm : standard_corpus())
    r.push_back({"small-mixture", sm.name, sm.claim});
  return r;
}

}  // namespace surflab
