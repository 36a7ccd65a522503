#pragma once

#include "lmcf/config.hpp"
#include "lmcf/immersion.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lmcf {

enum ExitCode : int {
  exit_ok = 0,
  exit_invariant_violation = 2,
  exit_singular_stop = 3,
  exit_config_error = 4,
};

struct RunOutcome {
  int exit_code = exit_ok;
  std::string reason;
  int violations = 0;
  int steps = 0;
  double final_time = 0.0;
  std::map<std::string, double> fitted_rates;  // "sigma_2", "eta0_2", "total"
};

VertexImmersion make_fixture(const RunConfig& cfg);

// Executes one configured run and writes its artifacts under cfg.output_dir.
RunOutcome run(const RunConfig& cfg);

// Loads, overrides, validates and runs; configuration problems map to exit 4 with one
// JSON-lines error record (in the run log when the output directory is known, else stderr).
RunOutcome run_config_file(const std::filesystem::path& path, const std::vector<std::string>& overrides);

struct SweepOutcome {
  int exit_code = exit_ok;
  std::vector<std::pair<std::filesystem::path, RunOutcome>> runs;
};

// Runs every *.ini under `dir` (sorted by name) on up to `threads` workers and writes one
// summary CSV row per run to `summary`.
SweepOutcome sweep(const std::filesystem::path& dir, const std::vector<std::string>& overrides,
                   const std::filesystem::path& summary, int threads);

// Thread count from LMCF_THREADS, defaulting to the hardware concurrency.
int thread_count_from_env();

}  // namespace lmcf
