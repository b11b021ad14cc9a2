#pragma once

// Dense semidefinite feasibility for small affine LMI systems.
//
// The solver maximizes a common slack t subject to F_j(x) >= t I for every
// block. This is the dual of a standard-form SDP pair and is solved with an
// infeasible-start primal-dual path-following method (HKM direction with a
// Mehrotra predictor-corrector step).

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "stringlmi/affine_system.hpp"
#include "stringlmi/lmi.hpp"

namespace stringlmi {

struct SolverOptions {
  int max_iterations = 200;
  /// Relative gap and relative primal/dual infeasibility at convergence.
  double tolerance = 1e-10;
  /// Stop early once feasible iterates move the objective by less than this.
  double slack_change_tolerance = 1e-9;
  /// Homogeneous systems: smallest slack relative to max_j ||F_j(x)||_2 still
  /// treated as strict feasibility rather than solver noise.
  double relative_floor = 1e-10;
  /// Fraction of the step to the cone boundary.
  double step_fraction = 0.95;
  /// Rescale each block of a homogeneous system to unit coefficient norm.
  bool scale_blocks = true;
};

enum class SolveStatus { kFeasible, kNotCertified };

struct SolveDiagnostics {
  int iterations = 0;
  double objective = 0.0;            ///< optimal common slack in solver scaling
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  double relative_slack = 0.0;       ///< min eig / max |eig| over blocks at the final x
  bool converged = false;
  bool iteration_cap = false;
  bool singular_newton = false;
  std::string message;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kNotCertified;
  /// Decision vector (rescaled so every block clears the margin when feasible).
  std::optional<Eigen::VectorXd> decision;
  /// Smallest block eigenvalue at `decision`, recomputed after solving.
  double slack = 0.0;
  SolveDiagnostics diagnostics;
};

/// Decide feasibility of F_j(x) >= margin I for all blocks. Reports feasible
/// only after an eigenvalue check of every block at the returned point.
SolveReport solve_feasibility(const AffineLmiSystem& system, const SolverOptions& options = {});

/// Witness for the stability LMI at a given order.
struct Certificate {
  int order = 0;
  Eigen::MatrixXd P;
  Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d R = Eigen::Matrix2d::Zero();
  double margin = 1e-6;
  double slack = 0.0;
  double relative_slack = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
};

struct VerificationReport {
  bool passed = false;
  double min_eig_P = 0.0;
  double min_eig_S = 0.0;
  double min_eig_R = 0.0;
  double max_eig_psi = 0.0;
  std::vector<std::string> failures;
};

/// Recompute Psi from the structural matrices and check P, S, R >= eps - tol
/// and Psi <= -eps + tol with a symmetric eigenvalue routine.
/// Throws DomainError when the certificate does not fit the blocks.
VerificationReport verify_certificate(const LmiBlocks& blocks, const Certificate& cert,
                                      double tol = 1e-9);

struct CertifyReport {
  SolveStatus status = SolveStatus::kNotCertified;
  std::optional<Certificate> certificate;
  std::optional<VerificationReport> verification;
  SolveDiagnostics diagnostics;
};

/// Build the affine system for `blocks`, solve it and verify the result.
CertifyReport certify(const LmiBlocks& blocks, double margin = 1e-6,
                      const SolverOptions& options = {});

/// Convenience: build blocks for (sys, order) and certify.
CertifyReport certify(const SystemDescription& sys, int order, double margin = 1e-6,
                      const SolverOptions& options = {});

/// Sparse SDPA text (".dat-s") of the slack-maximization problem
///   minimize -t  s.t.  sum_k x_k F_k - t I - (-F_0) >= 0  per block,
/// with t as the last variable. A homogeneous system also gets its
/// normalization 1 - a^T x >= 0 as a trailing 1x1 diagonal block.
std::string export_sdpa(const AffineLmiSystem& system);

/// Parsed sparse SDPA problem: minimize c^T y s.t. sum_i y_i F_i - F_0 >= 0.
struct SdpaProblem {
  int num_variables = 0;
  std::vector<int> block_sizes;  ///< negative for diagonal blocks
  Eigen::VectorXd objective;
  /// matrices[i][b] for i = 0..num_variables (0 is the constant F_0).
  std::vector<std::vector<Eigen::MatrixXd>> matrices;
};

/// Throws ConfigError on malformed input.
SdpaProblem parse_sdpa(const std::string& text);

/// Maps a parsed slack-maximization problem back onto an AffineLmiSystem
/// (inverse of export_sdpa for files it produced).
AffineLmiSystem affine_system_from_sdpa(const SdpaProblem& problem, double margin);

}  // namespace stringlmi
