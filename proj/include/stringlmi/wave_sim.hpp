#pragma once

// Finite-difference co-simulation of the string/ODE coupling
//   u_tt = c^2 u_xx on (0, 1),  u(0) = K X,  u_x(1) = -c0 u_t(1),
//   X' = A X + B u(1).
// The field is stored as (u, v = u_t) on the uniform grid x_i = i/M.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stringlmi/legendre.hpp"
#include "stringlmi/system.hpp"

namespace stringlmi::wave {

struct InitialCondition {
  std::function<double(double)> u0;
  std::function<double(double)> v0;
  Eigen::VectorXd X0;

  static InitialCondition zero(int n);
  /// u0(x) = (cos(pi x) + 1) K X0 / 2, v0 = 0.
  static InitialCondition cosine_profile(const SystemDescription& sys, const Eigen::VectorXd& X0);
};

struct FieldState {
  double t = 0.0;
  int M = 0;
  std::vector<double> u;
  std::vector<double> v;
  Eigen::VectorXd X;

  double dx() const noexcept { return 1.0 / M; }
};

enum class FieldScheme {
  kSymplectic,    ///< v from the current u, then u from the new v (leapfrog-equivalent)
  kForwardEuler,  ///< both from the current state
};

enum class OdeScheme { kEuler, kRk4 };

struct SimulationOptions {
  int M = 200;
  double cfl = 0.5;              ///< used when dt is not given: dt = cfl dx / c
  std::optional<double> dt;
  double T = 15.0;
  FieldScheme scheme = FieldScheme::kSymplectic;
  OdeScheme ode = OdeScheme::kEuler;
  int sample_stride = 1;         ///< record a Sample every this many steps
  int snapshot_stride = 0;       ///< store the full state every this many steps; 0 = never
  double compat_tol = 1e-6;
  double decay_threshold = 0.01;
  double growth_threshold = 10.0;
};

/// Largest admissible c dt / dx.
inline constexpr double kMaxCfl = 0.5;

/// Samples the initial condition. Throws ConfigError for M < 3 and
/// CompatibilityError when u0(0) != K X0 or u0_x(1) != -c0 v0(1) beyond
/// tol * (1 + |K X0|).
FieldState init_state(const SystemDescription& sys, int M, const InitialCondition& ic,
                      double tol = 1e-6);

/// One explicit step. Throws ConfigError when c dt / dx > kMaxCfl and
/// DivergenceError when the new state is not finite.
void step(FieldState& state, const SystemDescription& sys, double dt,
          FieldScheme scheme = FieldScheme::kSymplectic, OdeScheme ode = OdeScheme::kEuler);

/// u_x on the grid: central differences inside, second-order one-sided at
/// x = 0, and the boundary condition -c0 v(1) at x = 1.
std::vector<double> spatial_derivative(const FieldState& state, double c0);

/// Squared H-norm |X|^2 + ||u||^2 + c^2 ||u_x||^2 + ||v||^2 (trapezoid rule).
double hnorm2(const FieldState& state, const SystemDescription& sys);
double hnorm(const FieldState& state, const SystemDescription& sys);

/// chi(x) = [v(x) + c u_x(x); v(1-x) - c u_x(1-x)] on the trapezoid rule of the grid.
legendre::SampledField riemann_chi(const FieldState& state, const SystemDescription& sys);

/// 2 ||u_x||^2 + 2 u(0)^2 - ||u||^2.
double lemma1_gap(const FieldState& state, double c0);

struct Sample {
  double t;
  double hnorm;
  double normX;
  double ut1;
  double ux0;
};

enum class Outcome { kDecayed, kGrew, kIndeterminate };

const char* to_string(Outcome o) noexcept;

struct Trajectory {
  SystemDescription sys;
  int M = 0;
  double dt = 0.0;
  FieldScheme scheme = FieldScheme::kSymplectic;
  std::vector<Sample> samples;
  std::vector<FieldState> snapshots;
  int snapshot_stride = 0;
  Outcome outcome = Outcome::kIndeterminate;
  std::optional<double> blowup_time;
  std::string divergence_message;

  double snapshot_dt() const noexcept { return dt * snapshot_stride; }
  /// "t,hnorm,normX,ut1,ux0"
  std::string to_csv() const;
  /// "t,x,u,v" over the stored snapshots.
  std::string snapshots_csv() const;
};

/// Steps to T (rounded up to a whole number of steps). The final state is
/// always sampled.
/// A divergence ends the run early with blowup_time set and outcome kGrew.
/// Throws ConfigError on invalid options, CompatibilityError from init_state.
Trajectory simulate(const SystemDescription& sys, const InitialCondition& ic,
                    const SimulationOptions& options = {});

}  // namespace stringlmi::wave
