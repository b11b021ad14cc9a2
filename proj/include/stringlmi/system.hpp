#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace stringlmi {

/// Linear ODE  X' = A X + B u(1,t)  coupled to the string  u_tt = c^2 u_xx  on
/// [0, 1] through  u(0,t) = K X(t)  and the damped end  u_x(1,t) = -c0 u_t(1,t).
/// The string displacement u is scalar, so B is n x 1 and K is 1 x n.
struct SystemDescription {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd K;
  double c = 1.0;
  double c0 = 1.0;

  int n() const noexcept { return static_cast<int>(A.rows()); }

  /// Closed-loop ODE matrix A + B K.
  Eigen::MatrixXd closed_loop() const { return A + B * K; }

  /// Throws DomainError on inconsistent shapes, c <= 0 or c0 <= 0.
  void validate() const;

  /// Same ODE with another wave speed / damping.
  SystemDescription with_wave(double speed, double damping) const;

  /// FNV-1a hash over (A, B, K, c, c0) as raw doubles. Stable across runs on
  /// one platform; used to tag sweep outputs.
  std::uint64_t hash() const;
};

namespace presets {

/// A and A + BK both Hurwitz.
SystemDescription hurwitz_pair(double c = 1.0, double c0 = 1.0);

/// A unstable, A + BK Hurwitz.
SystemDescription unstable_open_loop(double c = 10.0, double c0 = 0.15);

/// A and A + BK both unstable.
SystemDescription unstable_closed_loop(double c = 5.0, double c0 = 0.5);

}  // namespace presets

}  // namespace stringlmi
