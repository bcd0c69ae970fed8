#pragma once
#include <string>
#include <vector>

#include "surflab/config.hpp"

namespace surflab {

struct RunResult {
  int exit_code = 0;  // 0 ok; 2 validation failure; 3 numerical failure
  std::string error;
  std::vector<std::string> files;  // artifacts written, relative to config.out
};

/// Executes the configured experiment and writes its result files plus
/// manifest.json under c.out. Result CSV/JSON content is a pure function of
/// the validated config (threads only change scheduling). Domain or numerics
/// errors become exit code 3 with this run's partial outputs removed.
RunResult run_experiment(const ExperimentConfig& c, int threads = 1);

}  // namespace surflab
