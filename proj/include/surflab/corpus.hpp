#pragma once
#include <string>
#include <vector>

#include "surflab/inequality.hpp"

namespace surflab {

/// Fixed 20-instance collection of finite resistance mixtures for the
/// inequality suite: 1-3 vertices, two-point and four-point grids, at most
/// six rows, all atom weights brute-force enumerable.
std::vector<SmallMixture> standard_corpus();

struct RegistryEntry {
  std::string kind;  // "potential" | "mixture" | "small-mixture"
  std::string name;
  std::string statement;  // the claim the entry instantiates
};

/// Stable-ordered registry of built-in potentials, mixture families, and the
/// standard corpus instances.
std::vector<RegistryEntry> registry();

}  // namespace surflab
