#include "surflab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "surflab/field.hpp"

namespace surflab {

double lattice_pc(int d) {
  switch (d) {
    case 2: return 0.5;
    case 3: return 0.2488;
    case 4: return 0.1601;
    case 5: return 0.1182;
  }
  throw std::invalid_argument("lattice_pc: no threshold on record for this d");
}

double tree_pc(int degree) {
  if (degree < 3) throw std::invalid_argument("tree_pc: degree >= 3");
  return 1.0 / (degree - 1);
}

namespace {

struct UnionFind {
  std::vector<int> parent, rank_;
  explicit UnionFind(int n) : parent(n), rank_(n, 0) {
    for (int i = 0; i < n; i++) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) rank_[a]++;
  }
};

PercolationSample from_open(const Graph& g, double p, std::vector<char> open) {
  PercolationSample s;
  s.p = p;
  s.open = std::move(open);
  UnionFind uf(g.n);
  for (int e = 0; e < g.num_edges(); e++) {
    if (!s.open[e]) continue;
    s.num_open++;
    uf.unite(g.edges[e].first, g.edges[e].second);
  }
  s.component.assign(g.n, -1);
  for (int v = 0; v < g.n; v++) {
    int r = uf.find(v);
    if (s.component[r] < 0) {
      s.component[r] = s.num_clusters++;
      s.cluster_size.push_back(0);
    }
    s.component[v] = s.component[r];
    s.cluster_size[s.component[v]]++;
  }
  for (int c : s.cluster_size) s.largest_cluster = std::max(s.largest_cluster, c);
  return s;
}

}  // namespace

PercolationSample percolate(const Graph& g, double p, Rng& rng) {
  if (p < 0 || p > 1) throw std::invalid_argument("percolate: p in [0,1]");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<char> open(g.num_edges());
  for (int e = 0; e < g.num_edges(); e++) open[e] = unif(rng) < p;
  return from_open(g, p, std::move(open));
}

PercolationSample percolate_keyed(const Graph& g, double p, uint64_t seed) {
  if (p < 0 || p > 1) throw std::invalid_argument("percolate: p in [0,1]");
  std::vector<char> open(g.num_edges());
  for (int e = 0; e < g.num_edges(); e++)
    open[e] = key_uniform(seed, {int64_t(e)}) < p;
  return from_open(g, p, std::move(open));
}

std::vector<int> threshold_subgraph(const std::vector<double>& xi, double cutoff) {
  std::vector<int> open;
  for (size_t f = 0; f < xi.size(); f++)
    if (xi[f] <= cutoff) open.push_back((int)f);
  return open;
}

double default_cutoff(const MixtureMeasure& rho, double pc) {
  if (pc < 0 || pc >= 1) throw std::invalid_argument("default_cutoff: pc in [0,1)");
  double target = (1 + pc) / 2;
  for (int i = 0; i <= 12000; i++) {
    double c = std::pow(10.0, -3.0 + i / 1000.0);
    if (rho.cdf(c) >= target) return c;
  }
  throw std::runtime_error("default_cutoff: CDF below target over the whole grid");
}

std::vector<double> coupled_xi(const FunctionalModel& m, const MixtureMeasure& rho,
                               uint64_t seed) {
  std::vector<double> xi(m.num_functionals(), 1.0);
  for (int f = 0; f < m.num_functionals(); f++) {
    const Functional& fn = m.functionals[f];
    if (fn.inf_resistance) continue;
    if (fn.edge_key.empty())
      throw std::invalid_argument("coupled_xi: row without an edge key");
    xi[f] = rho.quantile(key_uniform(seed, fn.edge_key));
  }
  return xi;
}

std::vector<double> iid_xi(const FunctionalModel& m, const MixtureMeasure& rho, Rng& rng) {
  std::vector<double> xi(m.num_functionals(), 1.0);
  for (int f = 0; f < m.num_functionals(); f++)
    if (!m.functionals[f].inf_resistance) xi[f] = rho.sample(rng);
  return xi;
}

ResistanceProfile cluster_resistance_profile(int d, const std::vector<int>& Ls,
                                             const MixtureMeasure* rho, double cutoff,
                                             int num_seeds, uint64_t seed0,
                                             const std::vector<int>* probe) {
  if (Ls.empty() || num_seeds <= 0)
    throw std::invalid_argument("cluster_resistance_profile: empty plan");
  ResistanceProfile prof;
  prof.L = Ls;
  prof.samples.assign(num_seeds, std::vector<double>(Ls.size(), 0.0));

  std::vector<FunctionalModel> models;
  for (int L : Ls) models.push_back(build_lattice_box(d, L, BoundaryKind::Wired));

  for (int s = 0; s < num_seeds; s++) {
    for (size_t li = 0; li < Ls.size(); li++) {
      FunctionalModel m = models[li];  // copy; cutoff pruning mutates flags
      int v = probe ? m.vertex_at(*probe) : m.origin_vertex();
      std::vector<double> xi =
          rho ? coupled_xi(m, *rho, seed0 + s) : std::vector<double>(m.num_functionals(), 1.0);
      if (std::isfinite(cutoff))
        for (int f = 0; f < m.num_functionals(); f++)
          if (xi[f] > cutoff) m.functionals[f].inf_resistance = true;
      try {
        prof.samples[s][li] = effective_resistance(m, xi, v);
      } catch (const Disconnected&) {
        prof.samples[s][li] = std::numeric_limits<double>::infinity();
      }
    }
  }
  return prof;
}

}  // namespace surflab
