#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace surflab {

enum class FunctionalLabel : uint8_t { Edge, BoundaryEdge, LaplacianRow };
enum class BoundaryKind : uint8_t { Wired, FreePinned, Torus };

/// One linear functional y_e. Entries hold (coordinate, coefficient) in
/// [0, n); entries at pinned vertices are dropped at construction, so rows act
/// directly on the free coordinates and index phi/F without translation.
/// `edge_key` is [axis, coords of the endpoint with the smaller coordinate on
/// that axis] for lattice edge functionals; it names the physical edge
/// independently of the box radius. Empty otherwise.
struct Functional {
  int id = 0;
  FunctionalLabel label = FunctionalLabel::Edge;
  int origin = 0;  // edge id for edge labels, enlarged-box row index for rows
  std::vector<std::pair<int, double>> entries;
  std::vector<int64_t> edge_key;
  bool inf_resistance = false;  // frozen at xi = infinity; skipped in assembly
};

/// Gaussian-field index set: which linear functionals of the surface carry a
/// potential, plus the vertex/coordinate bookkeeping. Coordinates are the
/// degrees of freedom; for free-pinned and torus boundaries one vertex is
/// pinned to zero and owns no coordinate.
struct FunctionalModel {
  int num_vertices = 0;
  int n = 0;  // coordinate count
  BoundaryKind boundary = BoundaryKind::Wired;
  int j = 1;
  int dim = 0;     // lattice dimension; 0 for trees and hand-built models
  int radius = 0;  // box radius L, or tree height
  std::vector<Functional> functionals;
  std::vector<int> coord_of_vertex;      // -1 at the pinned vertex
  std::vector<std::vector<int>> coords;  // lattice coords per vertex, if any

  int num_functionals() const { return static_cast<int>(functionals.size()); }
  int coord(int v) const { return coord_of_vertex[v]; }

  /// Vertex index for lattice coordinates, -1 if outside the model.
  int vertex_at(const std::vector<int>& c) const;
  /// Lattice origin for boxes, root for trees.
  int origin_vertex() const;
};

struct SpanLost : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Box [-L..L]^d. Wired: exterior contracted to a ground vertex, one boundary
/// functional per crossing edge (multi-edges kept separate). Free-pinned: the
/// induced box graph with v0 (default origin) pinned to zero. Torus: opposite
/// faces identified and the origin pinned. j is the interaction order: j=1
/// gives gradient functionals; even j gives rows of Delta^(j/2) (exterior
/// pinned to zero for wired boxes, induced-box Laplacian for free-pinned);
/// odd j >= 3 gives gradients of Delta^((j-1)/2). Torus supports j=1 only.
FunctionalModel build_lattice_box(int d, int L, BoundaryKind boundary,
                                  int j = 1,
                                  const std::vector<int>* v0 = nullptr);

/// Rooted regular tree: the root has `degree` children, every other internal
/// vertex degree-1 children; depth-`height` vertices are wired to ground.
FunctionalModel build_tree(int degree, int height);

/// Single vertex attached to ground by `boundary_edges` parallel edges.
FunctionalModel make_single_site(int boundary_edges = 1);

/// Path of n interior vertices, both ends wired to ground.
FunctionalModel make_wired_path(int n_interior);

/// Hand-built model from coefficient rows over n coordinates (vertex==coord).
FunctionalModel from_functionals(
    int n, const std::vector<std::vector<std::pair<int, double>>>& rows);

enum class DropMode { Delete, InfiniteResistance };

/// Keep functionals with keep[id] true; drop the rest either by deletion or by
/// freezing them at infinite resistance. Throws SpanLost when the survivors no
/// longer span (F(1) singular).
FunctionalModel restrict_model(const FunctionalModel& m,
                               const std::vector<char>& keep, DropMode mode);

/// One part of the transient edge-partition of Z^d (d >= 3): a length-d path
/// from the origin into the strict orthant with sign vector `orthant`, plus
/// that orthant's induced edges. The 2d parts are pairwise edge-disjoint and
/// all contain the origin.
struct PartitionPart {
  int axis = 1;  // 1..d
  int sign = 1;  // +1 or -1
  std::vector<std::vector<int>> path;  // d+1 vertices, path[0] = origin
  std::vector<int> orthant;            // w in {+-1}^d
};

std::vector<PartitionPart> strong_transience_partition(int d, int L);

/// Edges of a part clipped to the box [-L..L]^d: the path edges followed by
/// the induced orthant edges, each as (lex-smaller endpoint, other endpoint).
std::vector<std::pair<std::vector<int>, std::vector<int>>> part_edges_in_box(
    const PartitionPart& part, int L);

/// Functional ids of a wired box model matching a part's edges.
std::vector<int> part_functional_ids(const FunctionalModel& model,
                                     const PartitionPart& part);

std::string model_to_json(const FunctionalModel& m);

}  // namespace surflab
