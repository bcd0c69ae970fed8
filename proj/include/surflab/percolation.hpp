#pragma once
#include <cstdint>
#include <vector>

#include "surflab/graph.hpp"
#include "surflab/mixture.hpp"
#include "surflab/model.hpp"
#include "surflab/rng.hpp"

namespace surflab {

/// Bond-percolation thresholds used only to pick cutoffs: hypercubic lattice
/// values on record for d = 2..5, and 1/(degree-1) on the degree-regular tree.
double lattice_pc(int d);
double tree_pc(int degree);

struct PercolationSample {
  double p = 0;
  std::vector<char> open;         // per edge id
  std::vector<int> component;     // per vertex, labels 0..num_clusters-1
  std::vector<int> cluster_size;  // per label
  int num_open = 0;
  int num_clusters = 0;
  int largest_cluster = 0;
};

/// Each edge open independently with probability p; uniforms drawn in edge-id
/// order from rng. Components by union-find.
PercolationSample percolate(const Graph& g, double p, Rng& rng);

/// Keyed variant: edge e opens iff key_uniform(seed, [e]) < p, so samples at
/// different p under one seed form the standard monotone coupling.
PercolationSample percolate_keyed(const Graph& g, double p, uint64_t seed);

/// Row ids with xi[f] <= cutoff. When the xi are iid from rho this is bond
/// percolation at p = rho.cdf(cutoff).
std::vector<int> threshold_subgraph(const std::vector<double>& xi, double cutoff);

/// Smallest value on the 1000-points-per-decade log grid over [1e-3, 1e9]
/// whose rho-CDF reaches (1 + pc) / 2.
double default_cutoff(const MixtureMeasure& rho, double pc);

/// Resistance values for a box model, coupled across box sizes: row f draws
/// rho.quantile(key_uniform(seed, f.edge_key)), so a physical edge keeps its
/// value in every box containing it. Throws if some live row has no key.
std::vector<double> coupled_xi(const FunctionalModel& m, const MixtureMeasure& rho,
                               uint64_t seed);

/// Plain iid draw, row-id order.
std::vector<double> iid_xi(const FunctionalModel& m, const MixtureMeasure& rho, Rng& rng);

/// Origin-to-boundary effective resistance of wired boxes [-L..L]^d across L,
/// one coupled xi-hat per seed shared by all box sizes (xi = 1 when rho is
/// null). Rows with xi-hat above the cutoff are pruned first; an entry is +inf
/// when the probe is then cut off from the boundary. cutoff = +inf keeps the
/// whole box.
struct ResistanceProfile {
  std::vector<int> L;
  std::vector<std::vector<double>> samples;  // [seed index][L index]
};
ResistanceProfile cluster_resistance_profile(int d, const std::vector<int>& Ls,
                                             const MixtureMeasure* rho, double cutoff,
                                             int num_seeds, uint64_t seed0,
                                             const std::vector<int>* probe = nullptr);

}  // namespace surflab
