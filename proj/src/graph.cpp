#include "surflab/graph.hpp"

#include <stdexcept>

namespace surflab {

Graph lattice_graph(int d, int side, bool torus) {
  if (d < 1 || side < 1) throw std::invalid_argument("lattice_graph: d and side must be positive");
  if (torus && side < 3) throw std::invalid_argument("lattice_graph: torus needs side >= 3");
  Graph g;
  long long n = 1;
  for (int i = 0; i < d; i++) n *= side;
  g.n = static_cast<int>(n);
  g.coords.resize(g.n, std::vector<int>(d));
  std::vector<int> c(d, 0);
  for (int v = 0; v < g.n; v++) {
    g.coords[v] = c;
    for (int i = d - 1; i >= 0; i--) {
      if (++c[i] < side) break;
      c[i] = 0;
    }
  }
  auto index_of = [&](const std::vector<int>& q) {
    int idx = 0;
    for (int i = 0; i < d; i++) idx = idx * side + q[i];
    return idx;
  };
  for (int v = 0; v < g.n; v++) {
    for (int a = 0; a < d; a++) {
      std::vector<int> q = g.coords[v];
      q[a] += 1;
      if (q[a] == side) {
        if (!torus) continue;
        q[a] = 0;  // wrap; forward pass visits each wrap edge once
      }
      g.edges.emplace_back(v, index_of(q));
    }
  }
  return g;
}

}  // namespace surflab
