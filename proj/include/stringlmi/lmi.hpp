#pragma once

// Structural matrices of the Lyapunov stability LMI for the string/ODE
// coupling and their rendering as an affine system in (P_N, S, R).
//
// The extended vector is ordered
//
//   xi_N = [ X ; Proj_0 ; ... ; Proj_N ; u_t(1) ; c u_x(0) ]
//
// where Proj_k are the Legendre projections of the Riemann-like field
// chi(x) = [u_t(x) + c u_x(x) ; u_t(1-x) - c u_x(1-x)]. With that ordering
//   X_N = F xi,  d/dt X_N = Z xi,  chi(1) = H xi,  chi(0) = G xi.

#include <Eigen/Dense>
#include <tuple>
#include <utility>
#include <vector>

#include "stringlmi/affine_system.hpp"
#include "stringlmi/system.hpp"

namespace stringlmi {

enum class Equilibrium { kUniqueZero, kDegenerate };

/// Unique zero equilibrium iff A + BK is nonsingular, tested as
/// sigma_min(A+BK) > 1e-10 * ||A+BK||_2.
Equilibrium check_equilibrium(const SystemDescription& sys);

struct LmiBlocks {
  int order = 0;
  int n = 0;
  double c = 0.0;
  double c0 = 0.0;

  Eigen::MatrixXd F;          ///< (n+2(N+1)) x (n+2(N+1)+2)
  Eigen::MatrixXd Z;          ///< same shape as F
  Eigen::MatrixXd dynamics;   ///< n x (n+2(N+1)+2), X' = dynamics * xi
  Eigen::MatrixXd projection_rate;  ///< 2(N+1) x xi, Proj' = c * projection_rate * xi
  Eigen::MatrixXd G;          ///< 2 x xi
  Eigen::MatrixXd H;          ///< 2 x xi
  Eigen::Matrix2d g;
  Eigen::Matrix2d h;
  Eigen::MatrixXd B_tilde;    ///< n x 2
  Eigen::MatrixXd L;          ///< Legendre differentiation blocks
  Eigen::MatrixXd ones;
  Eigen::MatrixXd alternating;
  /// (row offset in xi, weight) of each R block in the Bessel term.
  std::vector<std::pair<int, double>> bessel_blocks;

  int p_size() const noexcept { return n + 2 * (order + 1); }
  int xi_size() const noexcept { return p_size() + 2; }

  /// diag(0_n, R, 3R, ..., (2N+1)R, 0_2).
  Eigen::MatrixXd bessel_weight(const Eigen::Matrix2d& R) const;
};

/// Matrices for any order N in [0, kMaxOrder]. Throws ConfigError when N is
/// out of range and DomainError on an invalid system.
LmiBlocks build_blocks(const SystemDescription& sys, int order);

/// The order-0 matrices written out directly (Z_0 = [N_0; c (H_0 - G_0)]),
/// without going through the general Legendre machinery. Kept as an
/// independent route for cross-checking build_blocks(sys, 0).
LmiBlocks build_blocks_order0(const SystemDescription& sys);

/// Psi = He(Z^T P F) - c Rtilde + c (H^T (S+R) H - G^T S G), symmetrized.
Eigen::MatrixXd assemble_psi(const LmiBlocks& blocks, const Eigen::MatrixXd& P,
                             const Eigen::Matrix2d& S, const Eigen::Matrix2d& R);

/// h^T (S+R) h - g^T S g, the trailing diagonal block of Psi when K = 0 and
/// a necessary condition for Psi < 0 in general.
Eigen::Matrix2d boundary_block(const LmiBlocks& blocks, const Eigen::Matrix2d& S,
                               const Eigen::Matrix2d& R);

/// Spectral radius of g^{-1} h for given (c, c0). Equals
/// sqrt(|1 - c c0| / (1 + c c0)); below one exactly when c0 > 0.
double boundary_spectral_radius(double c, double c0);

/// Vectorization of (P, S, R): upper triangles, row-major, P first.
struct DecisionLayout {
  int p_size = 0;

  int p_count() const noexcept { return p_size * (p_size + 1) / 2; }
  int s_offset() const noexcept { return p_count(); }
  int r_offset() const noexcept { return p_count() + 3; }
  int num_variables() const noexcept { return p_count() + 6; }

  Eigen::VectorXd pack(const Eigen::MatrixXd& P, const Eigen::Matrix2d& S,
                       const Eigen::Matrix2d& R) const;
  std::tuple<Eigen::MatrixXd, Eigen::Matrix2d, Eigen::Matrix2d> unpack(
      const Eigen::VectorXd& x) const;
};

/// Symmetric basis matrix for upper-triangular index (i, j) of a size-n matrix.
Eigen::MatrixXd symmetric_basis(int n, int i, int j);

/// Four constraints, in order: P >= eps I, S >= eps I, R >= eps I,
/// -Psi >= eps I. Homogeneous, so the normalization tr P + tr S + tr R <= 1
/// is attached.
AffineLmiSystem build_affine_system(const LmiBlocks& blocks, double margin = 1e-6);

}  // namespace stringlmi
