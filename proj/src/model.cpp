#include "surflab/model.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

namespace surflab {

namespace {

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Row-major index over [-R..R]^d, or -1 when outside.
int box_index(const std::vector<int>& c, int d, int R) {
  int idx = 0;
  for (int i = 0; i < d; i++) {
    if (c[i] < -R || c[i] > R) return -1;
    idx = idx * (2 * R + 1) + (c[i] + R);
  }
  return idx;
}

std::vector<std::vector<int>> box_coords(int d, int R) {
  int s = 2 * R + 1;
  long long n = ipow(s, d);
  std::vector<std::vector<int>> coords(n, std::vector<int>(d, -R));
  for (long long v = 1; v < n; v++) {
    coords[v] = coords[v - 1];
    for (int i = d - 1; i >= 0; i--) {
      if (++coords[v][i] <= R) break;
      coords[v][i] = -R;
    }
  }
  return coords;
}

// Coefficient row of Delta^k at w on the infinite lattice Z^d,
// Delta f(x) = sum_{y~x} (f(x) - f(y)).
std::map<std::vector<int>, double> laplacian_power_row(const std::vector<int>& w,
                                                       int k, int d) {
  std::map<std::vector<int>, double> row;
  row[w] = 1.0;
  for (int iter = 0; iter < k; iter++) {
    std::map<std::vector<int>, double> next;
    for (const auto& [u, c] : row) {
      next[u] += 2.0 * d * c;
      for (int a = 0; a < d; a++) {
        for (int s : {-1, 1}) {
          std::vector<int> v = u;
          v[a] += s;
          next[v] -= c;
        }
      }
    }
    row = std::move(next);
  }
  return row;
}

// Same, but for the Laplacian of the induced box graph (free boundary).
std::map<std::vector<int>, double> box_laplacian_power_row(
    const std::vector<int>& w, int k, int d, int R) {
  std::map<std::vector<int>, double> row;
  row[w] = 1.0;
  for (int iter = 0; iter < k; iter++) {
    std::map<std::vector<int>, double> next;
    for (const auto& [u, c] : row) {
      for (int a = 0; a < d; a++) {
        for (int s : {-1, 1}) {
          std::vector<int> v = u;
          v[a] += s;
          if (box_index(v, d, R) < 0) continue;
          next[u] += c;
          next[v] -= c;
        }
      }
    }
    row = std::move(next);
  }
  return row;
}

void push_restricted_row(FunctionalModel& m, FunctionalLabel label, int origin,
                         const std::map<std::vector<int>, double>& row,
                         double sign = 1.0,
                         const std::map<std::vector<int>, double>* minus = nullptr) {
  Functional f;
  f.label = label;
  f.origin = origin;
  std::map<int, double> acc;  // coordinate -> coeff, ordered
  auto add = [&](const std::map<std::vector<int>, double>& r, double sgn) {
    for (const auto& [c, val] : r) {
      int v = box_index(c, m.dim, m.radius);
      if (v < 0) continue;  // exterior pinned to zero
      int cd = m.coord_of_vertex[v];
      if (cd < 0) continue;
      acc[cd] += sgn * val;
    }
  };
  add(row, sign);
  if (minus) add(*minus, -sign);
  for (const auto& [v, val] : acc)
    if (val != 0.0) f.entries.emplace_back(v, val);
  if (f.entries.empty()) return;
  f.id = m.num_functionals();
  m.functionals.push_back(std::move(f));
}

void check_span(const FunctionalModel& m) {
  if (m.n == 0) throw SpanLost("model has no coordinates");
  Eigen::SparseMatrix<double> F(m.n, m.n);
  std::vector<Eigen::Triplet<double>> trip;
  int live = 0;
  std::vector<char> touched(m.n, 0);
  for (const auto& f : m.functionals) {
    if (f.inf_resistance) continue;
    live++;
    for (const auto& [v1, c1] : f.entries) {
      touched[v1] = 1;
      for (const auto& [v2, c2] : f.entries) trip.emplace_back(v1, v2, c1 * c2);
    }
  }
  if (live < m.n) throw SpanLost("fewer functionals than coordinates");
  for (int v = 0; v < m.n; v++)
    if (!touched[v]) throw SpanLost("coordinate not touched by any live functional");
  F.setFromTriplets(trip.begin(), trip.end());
  if (m.n <= 500) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(F)};
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 1e-12 * std::max(1.0, hi))) throw SpanLost("functionals do not span");
  } else {
    // no sparse factorization here: its fill blows up on wide-stencil boxes in
    // 4+ dims. CG against a fixed random rhs stalls when F is singular (the
    // residual keeps the nullspace part of the rhs, ~|b|/sqrt(n) >> tol) and
    // needs at most n steps otherwise.
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-8);
    cg.setMaxIterations(m.n);
    cg.compute(F);
    Eigen::VectorXd b(m.n);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < m.n; i++) b[i] = normal(rng);
    Eigen::VectorXd x = cg.solve(b);  // assign, or the lazy solve never runs
    if (cg.info() != Eigen::Success) throw SpanLost("functionals do not span");
  }
}

}  // namespace

int FunctionalModel::vertex_at(const std::vector<int>& c) const {
  if (dim == 0 || static_cast<int>(c.size()) != dim) return -1;
  return box_index(c, dim, radius);
}

int FunctionalModel::origin_vertex() const {
  if (dim == 0) return 0;
  return box_index(std::vector<int>(dim, 0), dim, radius);
}

FunctionalModel build_lattice_box(int d, int L, BoundaryKind boundary, int j,
                                  const std::vector<int>* v0) {
  if (d < 1 || L < 0 || j < 1) throw std::invalid_argument("build_lattice_box: need d >= 1, L >= 0, j >= 1");
  if (boundary == BoundaryKind::Torus && j >= 2)
    throw std::invalid_argument("build_lattice_box: torus supports j = 1 only");

  FunctionalModel m;
  m.dim = d;
  m.radius = L;
  m.boundary = boundary;
  m.j = j;
  m.coords = box_coords(d, L);
  m.num_vertices = static_cast<int>(m.coords.size());

  // Pin one vertex for boundaries without a wired exterior.
  int pinned = -1;
  if (boundary == BoundaryKind::FreePinned || boundary == BoundaryKind::Torus) {
    std::vector<int> c0(d, 0);
    if (v0) c0 = *v0;
    pinned = box_index(c0, d, L);
    if (pinned < 0) throw std::invalid_argument("build_lattice_box: pinned vertex outside the box");
  } else if (v0) {
    throw std::invalid_argument("build_lattice_box: v0 only applies to free-pinned");
  }
  m.coord_of_vertex.assign(m.num_vertices, 0);
  int next = 0;
  for (int v = 0; v < m.num_vertices; v++)
    m.coord_of_vertex[v] = (v == pinned) ? -1 : next++;
  m.n = next;

  auto edge_key_of = [&](int axis, const std::vector<int>& low) {
    std::vector<int64_t> key;
    key.push_back(axis);
    for (int x : low) key.push_back(x);
    return key;
  };
  auto push_edge = [&](FunctionalLabel label, int origin, int va, int vb,
                       std::vector<int64_t> key) {
    // +1 at the first argument; callers pass the lex-smaller live vertex first.
    Functional f;
    f.label = label;
    f.origin = origin;
    if (va >= 0 && m.coord_of_vertex[va] >= 0)
      f.entries.emplace_back(m.coord_of_vertex[va], 1.0);
    if (vb >= 0 && m.coord_of_vertex[vb] >= 0)
      f.entries.emplace_back(m.coord_of_vertex[vb], -1.0);
    if (f.entries.empty()) return;
    f.edge_key = std::move(key);
    f.id = m.num_functionals();
    m.functionals.push_back(std::move(f));
  };

  if (j == 1) {
    int edge_id = 0;
    if (boundary == BoundaryKind::Torus) {
      int s = 2 * L + 1;
      if (s < 3) throw SpanLost("torus of side < 3 has only degenerate loops");
      for (int v = 0; v < m.num_vertices; v++) {
        for (int a = 0; a < d; a++) {
          std::vector<int> q = m.coords[v];
          q[a] += 1;
          bool wrap = q[a] > L;
          if (wrap) q[a] = -L;
          int w = box_index(q, d, L);
          int lo = std::min(v, w), hi = std::max(v, w);
          push_edge(FunctionalLabel::Edge, edge_id++, lo, hi,
                    edge_key_of(a, m.coords[lo]));
        }
      }
    } else {
      // interior edges, row-major forward
      for (int v = 0; v < m.num_vertices; v++) {
        for (int a = 0; a < d; a++) {
          std::vector<int> q = m.coords[v];
          q[a] += 1;
          int w = box_index(q, d, L);
          if (w < 0) continue;
          push_edge(FunctionalLabel::Edge, edge_id++, v, w, edge_key_of(a, m.coords[v]));
        }
      }
      // boundary crossing edges (wired only; a free box has no exterior)
      if (boundary == BoundaryKind::Wired) {
        for (int v = 0; v < m.num_vertices; v++) {
          for (int a = 0; a < d; a++) {
            for (int s : {-1, 1}) {
              std::vector<int> q = m.coords[v];
              q[a] += s;
              if (box_index(q, d, L) >= 0) continue;
              const std::vector<int>& low = (s < 0) ? q : m.coords[v];
              push_edge(FunctionalLabel::BoundaryEdge, edge_id++, v, -1,
                        edge_key_of(a, low));
            }
          }
        }
      }
    }
  } else if (j % 2 == 0) {
    int k = j / 2;
    if (boundary == BoundaryKind::Wired) {
      auto enlarged = box_coords(d, L + k);
      for (int wi = 0; wi < static_cast<int>(enlarged.size()); wi++) {
        auto row = laplacian_power_row(enlarged[wi], k, d);
        push_restricted_row(m, FunctionalLabel::LaplacianRow, wi, row);
      }
    } else {  // free-pinned: induced box graph
      for (int wi = 0; wi < m.num_vertices; wi++) {
        auto row = box_laplacian_power_row(m.coords[wi], k, d, L);
        push_restricted_row(m, FunctionalLabel::LaplacianRow, wi, row);
      }
    }
  } else {  // odd j >= 3: gradients of Delta^((j-1)/2)
    int k = (j - 1) / 2;
    int reach = k + 1, edge_id = 0;
    if (boundary == BoundaryKind::Wired) {
      auto enlarged = box_coords(d, L + reach);
      for (const auto& u : enlarged) {
        for (int a = 0; a < d; a++) {
          std::vector<int> w = u;
          w[a] += 1;
          if (box_index(w, d, L + reach) < 0) continue;
          auto ru = laplacian_power_row(u, k, d);
          auto rw = laplacian_power_row(w, k, d);
          push_restricted_row(m, FunctionalLabel::Edge, edge_id++, ru, 1.0, &rw);
        }
      }
    } else {
      for (int v = 0; v < m.num_vertices; v++) {
        for (int a = 0; a < d; a++) {
          std::vector<int> w = m.coords[v];
          w[a] += 1;
          if (box_index(w, d, L) < 0) continue;
          auto ru = box_laplacian_power_row(m.coords[v], k, d, L);
          auto rw = box_laplacian_power_row(w, k, d, L);
          push_restricted_row(m, FunctionalLabel::Edge, edge_id++, ru, 1.0, &rw);
        }
      }
    }
  }

  check_span(m);
  return m;
}

FunctionalModel build_tree(int degree, int height) {
  if (degree < 2 || height < 1) throw std::invalid_argument("build_tree: need degree >= 2, height >= 1");
  FunctionalModel m;
  m.boundary = BoundaryKind::Wired;
  m.radius = height;

  // BFS layout of interior vertices (depth < height)
  std::vector<int> parent{-1}, depth{0};
  for (int v = 0; v < static_cast<int>(parent.size()); v++) {
    if (depth[v] + 1 >= height) continue;
    int kids = (v == 0) ? degree : degree - 1;
    for (int c = 0; c < kids; c++) {
      parent.push_back(v);
      depth.push_back(depth[v] + 1);
    }
  }
  m.num_vertices = static_cast<int>(parent.size());
  m.n = m.num_vertices;
  m.coord_of_vertex.resize(m.num_vertices);
  for (int v = 0; v < m.num_vertices; v++) m.coord_of_vertex[v] = v;

  int edge_id = 0;
  for (int v = 1; v < m.num_vertices; v++) {
    Functional f;
    f.label = FunctionalLabel::Edge;
    f.origin = edge_id++;
    f.entries = {{parent[v], 1.0}, {v, -1.0}};
    f.id = m.num_functionals();
    m.functionals.push_back(std::move(f));
  }
  for (int v = 0; v < m.num_vertices; v++) {
    if (depth[v] != height - 1) continue;
    int kids = (v == 0) ? degree : degree - 1;
    for (int c = 0; c < kids; c++) {
      Functional f;
      f.label = FunctionalLabel::BoundaryEdge;
      f.origin = edge_id++;
      f.entries = {{v, 1.0}};
      f.id = m.num_functionals();
      m.functionals.push_back(std::move(f));
    }
  }
  check_span(m);
  return m;
}

FunctionalModel make_single_site(int boundary_edges) {
  if (boundary_edges < 1) throw std::invalid_argument("make_single_site: need >= 1 edge");
  FunctionalModel m;
  m.num_vertices = 1;
  m.n = 1;
  m.coord_of_vertex = {0};
  for (int e = 0; e < boundary_edges; e++) {
    Functional f;
    f.label = FunctionalLabel::BoundaryEdge;
    f.origin = e;
    f.entries = {{0, 1.0}};
    f.id = e;
    m.functionals.push_back(std::move(f));
  }
  return m;
}

FunctionalModel make_wired_path(int n_interior) {
  if (n_interior < 1) throw std::invalid_argument("make_wired_path: need >= 1 vertex");
  FunctionalModel m;
  m.num_vertices = n_interior;
  m.n = n_interior;
  m.coord_of_vertex.resize(n_interior);
  for (int v = 0; v < n_interior; v++) m.coord_of_vertex[v] = v;
  int edge_id = 0;
  auto push = [&](FunctionalLabel label, std::vector<std::pair<int, double>> e) {
    Functional f;
    f.label = label;
    f.origin = edge_id++;
    f.entries = std::move(e);
    f.id = m.num_functionals();
    m.functionals.push_back(std::move(f));
  };
  push(FunctionalLabel::BoundaryEdge, {{0, 1.0}});
  for (int v = 0; v + 1 < n_interior; v++)
    push(FunctionalLabel::Edge, {{v, 1.0}, {v + 1, -1.0}});
  push(FunctionalLabel::BoundaryEdge, {{n_interior - 1, 1.0}});
  return m;
}

FunctionalModel from_functionals(
    int n, const std::vector<std::vector<std::pair<int, double>>>& rows) {
  FunctionalModel m;
  m.num_vertices = n;
  m.n = n;
  m.coord_of_vertex.resize(n);
  for (int v = 0; v < n; v++) m.coord_of_vertex[v] = v;
  for (const auto& row : rows) {
    Functional f;
    f.label = FunctionalLabel::Edge;
    f.origin = m.num_functionals();
    for (auto [v, c] : row) {
      if (v < 0 || v >= n) throw std::invalid_argument("from_functionals: vertex out of range");
      if (c != 0.0) f.entries.emplace_back(v, c);
    }
    f.id = m.num_functionals();
    m.functionals.push_back(std::move(f));
  }
  check_span(m);
  return m;
}

FunctionalModel restrict_model(const FunctionalModel& m,
                               const std::vector<char>& keep, DropMode mode) {
  if (keep.size() != m.functionals.size())
    throw std::invalid_argument("restrict_model: keep mask size mismatch");
  FunctionalModel r = m;
  if (mode == DropMode::Delete) {
    r.functionals.clear();
    for (const auto& f : m.functionals) {
      if (!keep[f.id]) continue;
      Functional g = f;
      g.id = r.num_functionals();
      r.functionals.push_back(std::move(g));
    }
  } else {
    for (auto& f : r.functionals)
      if (!keep[f.id]) f.inf_resistance = true;
  }
  check_span(r);
  return r;
}

std::vector<PartitionPart> strong_transience_partition(int d, int L) {
  if (d < 3) throw std::invalid_argument("strong_transience_partition: need d >= 3");
  if (L < 1) throw std::invalid_argument("strong_transience_partition: need L >= 1");
  std::vector<PartitionPart> parts;
  for (int i = 1; i <= d; i++) {
    for (int eta : {1, -1}) {
      PartitionPart p;
      p.axis = i;
      p.sign = eta;
      std::vector<int> v(d, 0);
      p.path.push_back(v);
      v[i - 1] += eta;  // first step along iota_i
      p.path.push_back(v);
      for (int jj = i + 1; jj <= i + d - 1; jj++) {
        int jh = ((jj - 1) % d) + 1;
        int dir = (i <= jh) ? 1 : -1;  // iota_{i,j} = +-iota_{jhat}
        v[jh - 1] += eta * dir;
        p.path.push_back(v);
      }
      p.orthant.resize(d);
      for (int a = 0; a < d; a++) p.orthant[a] = (v[a] > 0) ? 1 : -1;
      parts.push_back(std::move(p));
    }
  }
  return parts;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> part_edges_in_box(
    const PartitionPart& part, int L) {
  std::vector<std::pair<std::vector<int>, std::vector<int>>> edges;
  auto lex_less = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  for (size_t k = 0; k + 1 < part.path.size(); k++) {
    const auto &a = part.path[k], &b = part.path[k + 1];
    edges.emplace_back(lex_less(a, b) ? a : b, lex_less(a, b) ? b : a);
  }
  int d = static_cast<int>(part.orthant.size());
  // induced orthant edges: enumerate orthant vertices inside the box
  std::vector<int> v(d);
  for (int a = 0; a < d; a++) v[a] = (part.orthant[a] > 0) ? 1 : -L;
  auto in_orthant = [&](const std::vector<int>& q) {
    for (int a = 0; a < d; a++)
      if (part.orthant[a] * q[a] < 1 || q[a] < -L || q[a] > L) return false;
    return true;
  };
  bool done = false;
  while (!done) {
    for (int a = 0; a < d; a++) {
      std::vector<int> w = v;
      w[a] += 1;
      if (in_orthant(w)) edges.emplace_back(v, w);
    }
    done = true;
    for (int a = d - 1; a >= 0; a--) {
      int lo = (part.orthant[a] > 0) ? 1 : -L;
      int hi = (part.orthant[a] > 0) ? L : -1;
      if (++v[a] <= hi) {
        done = false;
        break;
      }
      v[a] = lo;
    }
  }
  return edges;
}

std::vector<int> part_functional_ids(const FunctionalModel& model,
                                     const PartitionPart& part) {
  std::map<std::vector<int64_t>, int> by_key;
  for (const auto& f : model.functionals)
    if (!f.edge_key.empty()) by_key[f.edge_key] = f.id;
  std::vector<int> ids;
  for (const auto& [a, b] : part_edges_in_box(part, model.radius)) {
    int axis = -1;
    for (int i = 0; i < model.dim; i++)
      if (a[i] != b[i]) axis = i;
    std::vector<int64_t> key;
    key.push_back(axis);
    const std::vector<int>& low = (a[axis] < b[axis]) ? a : b;
    for (int x : low) key.push_back(x);
    auto it = by_key.find(key);
    if (it == by_key.end()) throw std::logic_error("part_functional_ids: edge not in model");
    ids.push_back(it->second);
  }
  return ids;
}

std::string model_to_json(const FunctionalModel& m) {
  nlohmann::ordered_json out;
  out["dim"] = m.dim;
  out["radius"] = m.radius;
  switch (m.boundary) {
    case BoundaryKind::Wired: out["boundary"] = "wired"; break;
    case BoundaryKind::FreePinned: out["boundary"] = "free-pinned"; break;
    case BoundaryKind::Torus: out["boundary"] = "torus"; break;
  }
  out["j"] = m.j;
  out["vertices"] = m.num_vertices;
  out["functionals"] = nlohmann::ordered_json::array();
  for (const auto& f : m.functionals) {
    nlohmann::ordered_json jf;
    jf["id"] = f.id;
    switch (f.label) {
      case FunctionalLabel::Edge: jf["label"] = "edge"; break;
      case FunctionalLabel::BoundaryEdge: jf["label"] = "boundary-edge"; break;
      case FunctionalLabel::LaplacianRow: jf["label"] = "laplacian-row"; break;
    }
    jf["origin"] = f.origin;
    if (f.inf_resistance) jf["inf-resistance"] = true;
    jf["entries"] = nlohmann::ordered_json::array();
    for (const auto& [v, c] : f.entries) jf["entries"].push_back({v, c});
    out["functionals"].push_back(std::move(jf));
  }
  return out.dump(2);
}

}  // namespace surflab
