#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace surflab {

/// Parse or validation failure; `field` names the offending config entry.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string f, const std::string& msg)
      : std::runtime_error(f.empty() ? msg : f + ": " + msg), field(std::move(f)) {}
};

struct ModelSpec {
  int d = 2;
  std::vector<int> L{4};  // box radii, strictly increasing
  std::string boundary = "wired";  // wired | free-pinned | torus
  int j = 1;
};

struct PotentialSpec {
  std::string kind = "none";  // none | quadratic | splice | poly | power-interp
  double c = 1, alpha = 3, eps = 1, beta = 1, K = 1;
};

struct MixtureSpec {
  std::string kind = "none";  // none | pareto | two-point | tilted-stable
  double alpha = 3, eps = 1, beta = 1, K = 1;
  double kappa1 = 1, kappa2 = 2, w = 0.5;
};

struct SamplerSpec {
  // mixture-exact | splice-metropolis | metropolis | gaussian-exact
  std::string algorithm = "mixture-exact";
  long sweeps = 11000, burnin = 1000;
  int thin = 10, replicas = 4;
  double step = 0.5;  // metropolis proposal scale
};

struct ExperimentConfig {
  // decompose | sample | resistance-profile | percolate | verify-inequalities
  // | tails | max-scaling | variance-growth
  std::string kind = "sample";
  uint64_t seed = 1;
  std::string out = "out";
  ModelSpec model;
  PotentialSpec potential;
  MixtureSpec mixture;
  SamplerSpec sampler;
  std::vector<double> percolation_p;   // [percolation] p
  std::string cutoff_mode = "none";    // none | auto | fixed
  double cutoff_value = 0;
  std::string norm = "log";            // max-scaling: log | power
  double norm_exponent = 0.5;          // (log n)^e or n^e
};

/// Strict TOML subset: [section] headers, key = value with quoted strings,
/// integers, floats, booleans, and flat numeric arrays; '#' comments.
/// Unknown sections or keys are errors. Does not range-check; see validate().
ExperimentConfig parse_config(const std::string& text);

/// Range- and consistency-checks every field; throws ConfigError naming it.
void validate(const ExperimentConfig& c);

/// parse + validate from a file; throws ConfigError (field "" on I/O failure).
ExperimentConfig load_config(const std::string& path);

/// Fixed-order serialization; parse_config(canonical_toml(c)) round-trips
/// byte-identically.
std::string canonical_toml(const ExperimentConfig& c);

/// FNV-1a 64-bit hash of the canonical form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace surflab
