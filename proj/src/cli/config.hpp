#pragma once

// JSON problem configs for the command-line driver. A config carries a
// schema version, a problem kind, the coefficient data, boundary blocks,
// and numeric options. Everything is validated up front so that a bad
// config fails with a clear message before any integration starts.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarsturm/linalg.hpp"
#include "polarsturm/model.hpp"

namespace polarsturm::cli {

using Json = nlohmann::ordered_json;

enum class ProblemKind { kHamiltonian, kMorse, kSturmLiouville, kBcCheck,
                         kAppendix };

struct NumericOptions {
  double h = 1e-3;
  int grid_nodes = 0;        // 0 = solver default
  int tau_nodes = 257;       // eigenfunction sampling
  double lambda = 0.0;       // fixed parameter for tau tracks
  bool has_lambda = false;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  int lambda_nodes = 0;
  int count = 3;             // eigenvalues per branch
  std::vector<int> branches;
  std::uint64_t seed = 1;
  int oracle_m = 0;          // 0 = no discretization cross-check
  int fuzz_trials = 0;       // verify: random symplectic probes
};

struct BoundaryData {
  // Morse penalty block at the left end.
  std::optional<Mat> n_left;
  // Separated Sturm-Liouville blocks.
  std::optional<Mat> alpha0, beta0, gamma1, delta1;
  // Coupled rows (bc-check): alpha/beta at 0, gamma/delta at t, per row.
  std::optional<Mat> row0_alpha, row0_beta, row0_gamma, row0_delta;
  std::optional<Mat> row1_alpha, row1_beta, row1_gamma, row1_delta;
  std::optional<Mat> rho0, rho1;
};

struct AppendixData {
  // Either template factors L0, L1, L2 ...
  std::optional<Mat> l0, l1, l2;
  // ... or scalar corner coefficients with free entries.
  std::optional<std::vector<double>> x;  // x1, x2, x3, x4
  int nu = 1;
  double a = 1.0, b = 0.0, c = 0.0;
  // Scalar boundary rows for the corner-coefficient map.
  std::optional<std::vector<double>> rows;  // a0 b0 g0 d0 a1 b1 g1 d1 [r0 r1]
};

struct ProblemConfig {
  int schema = 1;
  ProblemKind kind = ProblemKind::kHamiltonian;
  int n = 0;
  double t = 0.0;
  CoefficientModel model;      // hamiltonian / morse
  CoeffFn c0, d, e;            // sturm-liouville
  BoundaryData boundary;
  AppendixData appendix;
  NumericOptions options;
  std::string digest;          // stable hash of the canonicalized input
};

// Parses and validates; throws ConfigError with a path-qualified message.
ProblemConfig parse_config(const Json& j);
ProblemConfig load_config(const std::string& path);

Mat parse_matrix(const Json& j, int rows, int cols, const std::string& where);
CoeffFn parse_coefficient(const Json& j, int n, const std::string& where);

// FNV-1a over the canonical dump; stable across runs and platforms.
std::string config_digest(const Json& j);

}  // namespace polarsturm::cli
