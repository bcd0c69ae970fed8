#pragma once
#include <utility>
#include <vector>

namespace surflab {

/// Undirected multigraph; vertices 0..n-1, edges listed with stable ids equal
/// to their position. `coords` carries integer lattice coordinates when the
/// graph was built from a lattice (used to key coupled randomness to physical
/// edges), empty otherwise.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> coords;

  int num_edges() const { return static_cast<int>(edges.size()); }
};

/// Hypercubic lattice [0..side-1]^d, nearest-neighbour edges, row-major vertex
/// order. With torus=true opposite faces are identified (side >= 3).
Graph lattice_graph(int d, int side, bool torus = false);

}  // namespace surflab
