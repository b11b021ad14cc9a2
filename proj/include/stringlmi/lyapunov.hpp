#pragma once

// Post-processing of simulated trajectories with a solved certificate:
//   calV(u)   = int_0^1 chi^T (S + x R) chi dx
//   V_N(X, u) = X_N^T P_N X_N + calV(u),  X_N = [X; Proj_0; ...; Proj_N]

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "stringlmi/legendre.hpp"
#include "stringlmi/sdp.hpp"
#include "stringlmi/system.hpp"
#include "stringlmi/wave_sim.hpp"

namespace stringlmi::lyapunov {

/// Quadrature on the field's own rule.
double evaluate_calV(const legendre::SampledField& chi, const Eigen::Matrix2d& S,
                     const Eigen::Matrix2d& R);
double evaluate_calV(const wave::FieldState& state, const SystemDescription& sys,
                     const Eigen::Matrix2d& S, const Eigen::Matrix2d& R);

/// [X; Proj_0; ...; Proj_N] from the grid samples.
Eigen::VectorXd extended_state(const wave::FieldState& state, const SystemDescription& sys,
                               int order);

/// V_N at `state` for the certificate's order. Throws DomainError when the
/// certificate does not match n + 2(N+1).
double evaluate_V(const wave::FieldState& state, const SystemDescription& sys,
                  const Certificate& cert);

struct DecayOptions {
  double C = 10.0;  ///< increment tolerance is C (dt + dx^2) V(0)
  std::optional<double> tolerance;  ///< overrides the C-based tolerance (relative to V(0))
};

struct LyapunovSeries {
  std::vector<double> times;
  std::vector<double> V;
  std::vector<double> hnorm2;
  std::optional<double> decay_rate;  ///< empty when V is not positive on the tail
  double max_increment = 0.0;        ///< largest V[k+1] - V[k] (0 if never increasing)
  double tolerance = 0.0;            ///< allowed increment, absolute
  bool nonincreasing = false;        ///< max_increment <= tolerance
  double ratio_lo = 0.0;             ///< min V / hnorm2 over nonzero states
  double ratio_hi = 0.0;
  bool ratio_bounded = false;        ///< 0 < ratio_lo <= ratio_hi < inf

  /// "t,V,hnorm2,ratio"
  std::string to_csv() const;
};

/// V along the trajectory's snapshots. Throws PreconditionError when the
/// certificate fails verify_certificate for the trajectory's system or when
/// the trajectory has no snapshots.
LyapunovSeries check_decay(const wave::Trajectory& traj, const Certificate& cert,
                           const DecayOptions& options = {});

struct ProjectionResidual {
  int order = 0;
  int samples = 0;           ///< interior snapshots compared
  double max_residual = 0.0;
  double rms_residual = 0.0;
  double max_rate = 0.0;     ///< largest |dProj/dt| seen, for scale
  /// max_k |Proj(t_k) - Proj(t_0) - int_0^{t_k} rhs dt| with the trapezoid
  /// rule in time. Stays first order when chi carries a jump, where the
  /// pointwise residual does not.
  double integrated_max = 0.0;
  std::vector<double> times;
  std::vector<double> residuals;
};

/// Central differences of the projections across snapshots against
/// c (1_N chi(1) - 1bar_N chi(0) - L_N Proj). Throws PreconditionError with
/// fewer than 3 snapshots.
ProjectionResidual check_projection_derivative(const wave::Trajectory& traj, int order);

}  // namespace stringlmi::lyapunov
