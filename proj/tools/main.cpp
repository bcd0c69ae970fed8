#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "surflab/config.hpp"
#include "surflab/corpus.hpp"
#include "surflab/experiments.hpp"

using namespace surflab;

int main(int argc, char** argv) {
  CLI::App app{"surflab: gradient random-surface laboratory"};
  app.require_subcommand(1);

  std::string cfg_path, out_override, kind_override;
  uint64_t seed_override = 0;
  bool dry = false;
  int threads = 1;

  CLI::App* run = app.add_subcommand("run", "run an experiment described by a TOML config");
  run->add_option("config", cfg_path, "config file path")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--out", out_override, "override the output directory");
  run->add_option("--kind", kind_override, "override the experiment kind");
  run->add_option("--threads", threads, "replica-level parallelism")
      ->check(CLI::Range(1, 256));
  run->add_flag("--dry-run", dry, "validate only; print the canonical config and hash");

  CLI::App* lc = app.add_subcommand(
      "list-corpus", "print the registry of potentials, mixtures, and corpus instances");

  CLI11_PARSE(app, argc, argv);

  if (lc->parsed()) {
    for (const RegistryEntry& e : registry())
      printf("%-14s %-18s %s\n", e.kind.c_str(), e.name.c_str(), e.statement.c_str());
    return 0;
  }

  try {
    ExperimentConfig c = load_config(cfg_path);
    if (*seed_opt) c.seed = seed_override;
    if (!kind_override.empty()) c.kind = kind_override;
    if (!out_override.empty()) {
      c.out = out_override;
    } else if (const char* root = std::getenv("SURFLAB_OUT")) {
      if (!c.out.empty() && c.out.front() != '/')
        c.out = std::string(root) + "/" + c.out;
    }
    validate(c);  // overrides re-checked
    if (dry) {
      printf("%s", canonical_toml(c).c_str());
      printf("# hash %s\n", config_hash(c).c_str());
      return 0;
    }
    RunResult r = run_experiment(c, threads);
    if (r.exit_code != 0) {
      fprintf(stderr, "error: %s\n", r.error.c_str());
      return r.exit_code;
    }
    printf("wrote %zu files under %s\n", r.files.size(), c.out.c_str());
    for (const std::string& f : r.files) printf("  %s\n", f.c_str());
    return 0;
  } catch (const ConfigError& e) {
    fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
