#pragma once

// Command implementations behind the CLI front end. Each command takes a
// parsed config plus flag overrides, computes, and writes one artifact
// (CSV or a JSON result envelope) to stdout or --out. Outputs are
// deterministic for a fixed config and seed: full-precision numbers,
// ordered keys, no timestamps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace polarsturm::cli {

struct Invocation {
  std::string command;
  ProblemConfig cfg;
  std::string out_path;  // empty writes to stdout
  std::string format;    // empty picks the command default
  int threads = 1;

  // Flag overrides; absent values fall back to the config options.
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda_min, lambda_max;
  std::optional<int> count;
  std::vector<int> branches;
  std::optional<int> oracle_m;
  int branch = 0;  // sl-eigenfunction selection
  int k = 0;
};

// Returns the process exit code: 0 success, 3 failed verification.
// Config problems throw ConfigError (exit 2 in main), numeric trouble
// throws NumericError (exit 3).
int run_command(Invocation& inv);

// Worker cap from POLARSTURM_THREADS, clamped to [1, 64]; 1 if unset.
int thread_cap_from_env();

}  // namespace polarsturm::cli
