#pragma once

// JSON run configuration shared by every subcommand.
//
// {
//   "system":     {"preset": "unstable_open_loop"} or {"A": [[..]], "B": [[..]], "K": [[..]]},
//                 plus optional "c", "c0" (override a preset's values),
//   "analysis":   {"order": 1, "orders": [0, 1, 2], "bracket": [1, 20], "tol": 0.01,
//                  "scan_points": 32, "c0_grid": [..], "threads": 0},
//   "simulation": {"M": 200, "cfl": 0.5, "dt": .., "T": 15, "scheme": "symplectic",
//                  "ode": "euler", "initial": {"kind": "cosine", "X0": [1, 1]},
//                  "sample_stride": 1, "snapshot_stride": 0, "lyapunov": true},
//   "solver":     {"margin": 1e-6, "max_iterations": 200, "tolerance": 1e-10},
//   "out": "results"
// }
//
// Every block except "system" is optional. Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stringlmi/analysis.hpp"
#include "stringlmi/sdp.hpp"
#include "stringlmi/system.hpp"
#include "stringlmi/wave_sim.hpp"

namespace stringlmi::config {

struct AnalysisConfig {
  int order = 1;
  std::vector<int> orders{0, 1, 2};
  std::pair<double, double> bracket{1.0, 20.0};
  double tol = 1e-2;
  int scan_points = 32;
  std::vector<double> c0_grid;
  unsigned threads = 0;
};

enum class InitialKind { kCosine, kZero };

struct SimulationConfig {
  wave::SimulationOptions options;
  InitialKind initial = InitialKind::kCosine;
  std::vector<double> X0;  ///< empty: all ones
  bool lyapunov = true;    ///< run the Lyapunov checks when the system certifies
};

struct RunConfig {
  SystemDescription system;
  std::string preset;  ///< empty for explicit matrices
  AnalysisConfig analysis;
  SimulationConfig simulation;
  double margin = 1e-6;
  SolverOptions solver;
  std::filesystem::path out = "results";
  /// FNV-1a over the canonical (sorted-key, compact) JSON text.
  std::uint64_t hash = 0;
  std::string canonical;

  Eigen::VectorXd initial_state() const;
  wave::InitialCondition initial_condition() const;
};

/// Throws ConfigError (module "config") on malformed JSON, unknown keys or
/// values violating a module precondition.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

std::string hex64(std::uint64_t v);

}  // namespace stringlmi::config
