#include "stringlmi/wave_sim.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>

#include "stringlmi/error.hpp"
#include "stringlmi/kernels.hpp"

namespace stringlmi::wave {

namespace {

constexpr const char* kModule = "wave_sim";

double trapezoid_sq(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) s += f[i] * f[i];
  s += 0.5 * (f.front() * f.front() + f.back() * f.back());
  return s * dx;
}

Eigen::VectorXd ode_rate(const SystemDescription& sys, const Eigen::VectorXd& X, double u1) {
  return sys.A * X + sys.B * u1;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

InitialCondition InitialCondition::zero(int n) {
  return {[](double) { return 0.0; }, [](double) { return 0.0; }, Eigen::VectorXd::Zero(n)};
}

InitialCondition InitialCondition::cosine_profile(const SystemDescription& sys,
                                                  const Eigen::VectorXd& X0) {
  const double kx = (sys.K * X0)(0);
  return {[kx](double x) { return 0.5 * (std::cos(std::numbers::pi * x) + 1.0) * kx; },
          [](double) { return 0.0; }, X0};
}

FieldState init_state(const SystemDescription& sys, int M, const InitialCondition& ic, double tol) {
  sys.validate();
  if (M < 3) throw ConfigError(kModule, "grid needs at least 3 intervals");
  if (!ic.u0 || !ic.v0) throw ConfigError(kModule, "initial condition lacks u0 or v0");
  if (ic.X0.size() != sys.n()) throw ConfigError(kModule, "X0 has wrong dimension");

  const double kx = (sys.K * ic.X0)(0);
  const double scale = 1.0 + std::abs(kx);
  const double dirichlet = ic.u0(0.0) - kx;
  if (std::abs(dirichlet) > tol * scale) {
    throw CompatibilityError(kModule, "u0(0) - K X0 = " + fmt(dirichlet));
  }
  // second-order one-sided difference for u0_x(1)
  const double h = 1e-4;
  const double ux1 = (3.0 * ic.u0(1.0) - 4.0 * ic.u0(1.0 - h) + ic.u0(1.0 - 2.0 * h)) / (2.0 * h);
  const double neumann = ux1 + sys.c0 * ic.v0(1.0);
  if (std::abs(neumann) > std::max(tol, 1e-6) * scale) {
    throw CompatibilityError(kModule, "u0_x(1) + c0 v0(1) = " + fmt(neumann));
  }

  FieldState s;
  s.M = M;
  s.X = ic.X0;
  s.u.resize(M + 1);
  s.v.resize(M + 1);
  for (int i = 0; i <= M; ++i) {
    const double x = static_cast<double>(i) / M;
    s.u[i] = ic.u0(x);
    s.v[i] = ic.v0(x);
  }
  s.u[0] = kx;
  return s;
}

void step(FieldState& s, const SystemDescription& sys, double dt, FieldScheme scheme,
          OdeScheme ode) {
  const int M = s.M;
  const double dx = s.dx();
  const double c = sys.c;
  if (!(dt > 0.0) || c * dt / dx > kMaxCfl * (1.0 + 1e-12)) {
    throw ConfigError(kModule, "CFL number " + fmt(c * dt / dx) + " exceeds " + fmt(kMaxCfl));
  }
  const auto& kern = kernels::active();
  const double k = c * c * dt / (dx * dx);
  const double kap = 2.0 * c * c * sys.c0 * dt / dx;
  const double u1 = s.u[M];

  // ODE with the current u(1) held over the step.
  if (ode == OdeScheme::kEuler) {
    s.X += dt * ode_rate(sys, s.X, u1);
  } else {
    const Eigen::VectorXd k1 = ode_rate(sys, s.X, u1);
    const Eigen::VectorXd k2 = ode_rate(sys, s.X + 0.5 * dt * k1, u1);
    const Eigen::VectorXd k3 = ode_rate(sys, s.X + 0.5 * dt * k2, u1);
    const Eigen::VectorXd k4 = ode_rate(sys, s.X + dt * k3, u1);
    s.X += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  if (scheme == FieldScheme::kSymplectic) {
    kern.stencil_accumulate(s.u.data(), s.v.data(), M + 1, k);
    // ghost node u[M+1] = u[M-1] - 2 dx c0 v[M], damping taken at the new level
    s.v[M] = (s.v[M] + k * (2.0 * s.u[M - 1] - 2.0 * s.u[M])) / (1.0 + kap);
    kern.axpy(dt, s.v.data() + 1, s.u.data() + 1, M);
  } else {
    const std::vector<double> v_old = s.v;
    kern.stencil_accumulate(s.u.data(), s.v.data(), M + 1, k);
    s.v[M] += k * (2.0 * s.u[M - 1] - 2.0 * s.u[M]) - kap * v_old[M];
    kern.axpy(dt, v_old.data() + 1, s.u.data() + 1, M);
  }

  s.u[0] = (sys.K * s.X)(0);
  s.v[0] = (sys.K * ode_rate(sys, s.X, s.u[M]))(0);
  s.t += dt;

  if (!s.X.allFinite() || !std::isfinite(s.u[M]) || !std::isfinite(s.v[M]) ||
      !std::isfinite(s.u[M / 2]) || !std::isfinite(s.v[M / 2])) {
    throw DivergenceError(kModule, "non-finite state", s.t);
  }
}

std::vector<double> spatial_derivative(const FieldState& s, double c0) {
  const int M = s.M;
  const double dx = s.dx();
  std::vector<double> ux(M + 1);
  kernels::active().central_difference(s.u.data(), ux.data(), M + 1, 0.5 / dx);
  ux[0] = (-3.0 * s.u[0] + 4.0 * s.u[1] - s.u[2]) / (2.0 * dx);
  ux[M] = -c0 * s.v[M];
  return ux;
}

double hnorm2(const FieldState& s, const SystemDescription& sys) {
  const double dx = s.dx();
  const std::vector<double> ux = spatial_derivative(s, sys.c0);
  return s.X.squaredNorm() + trapezoid_sq(s.u, dx) + sys.c * sys.c * trapezoid_sq(ux, dx) +
         trapezoid_sq(s.v, dx);
}

double hnorm(const FieldState& s, const SystemDescription& sys) { return std::sqrt(hnorm2(s, sys)); }

legendre::SampledField riemann_chi(const FieldState& s, const SystemDescription& sys) {
  const int M = s.M;
  const std::vector<double> ux = spatial_derivative(s, sys.c0);
  legendre::SampledField f{legendre::QuadratureRule::trapezoid(M), {}};
  f.components[0].resize(M + 1);
  f.components[1].resize(M + 1);
  for (int i = 0; i <= M; ++i) {
    f.components[0][i] = s.v[i] + sys.c * ux[i];
    f.components[1][i] = s.v[M - i] - sys.c * ux[M - i];
  }
  return f;
}

double lemma1_gap(const FieldState& s, double c0) {
  const double dx = s.dx();
  const std::vector<double> ux = spatial_derivative(s, c0);
  return 2.0 * trapezoid_sq(ux, dx) + 2.0 * s.u[0] * s.u[0] - trapezoid_sq(s.u, dx);
}

const char* to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::kDecayed:
      return "decayed";
    case Outcome::kGrew:
      return "grew";
    case Outcome::kIndeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

std::string Trajectory::to_csv() const {
  std::ostringstream os;
  os << "t,hnorm,normX,ut1,ux0\n";
  for (const auto& s : samples) {
    os << fmt(s.t) << ',' << fmt(s.hnorm) << ',' << fmt(s.normX) << ',' << fmt(s.ut1) << ','
       << fmt(s.ux0) << '\n';
  }
  return os.str();
}

std::string Trajectory::snapshots_csv() const {
  std::ostringstream os;
  os << "t,x,u,v\n";
  for (const auto& st : snapshots) {
    for (int i = 0; i <= st.M; ++i) {
      os << fmt(st.t) << ',' << fmt(static_cast<double>(i) / st.M) << ',' << fmt(st.u[i]) << ','
         << fmt(st.v[i]) << '\n';
    }
  }
  return os.str();
}

Trajectory simulate(const SystemDescription& sys, const InitialCondition& ic,
                    const SimulationOptions& options) {
  if (options.M < 3) throw ConfigError(kModule, "grid needs at least 3 intervals");
  if (!(options.T > 0.0)) throw ConfigError(kModule, "final time must be positive");
  if (options.sample_stride < 1 || options.snapshot_stride < 0) {
    throw ConfigError(kModule, "strides must be positive");
  }
  if (!(options.decay_threshold > 0.0 && options.decay_threshold < options.growth_threshold)) {
    throw ConfigError(kModule, "need 0 < decay threshold < growth threshold");
  }
  FieldState state = init_state(sys, options.M, ic, options.compat_tol);
  const double dx = state.dx();
  const double dt = options.dt ? *options.dt : options.cfl * dx / sys.c;
  if (!(dt > 0.0) || sys.c * dt / dx > kMaxCfl * (1.0 + 1e-12)) {
    throw ConfigError(kModule, "CFL number " + fmt(sys.c * dt / dx) + " exceeds " + fmt(kMaxCfl));
  }
  const long steps = static_cast<long>(std::ceil(options.T / dt - 1e-9));

  Trajectory traj;
  traj.sys = sys;
  traj.M = options.M;
  traj.dt = dt;
  traj.scheme = options.scheme;
  traj.snapshot_stride = options.snapshot_stride;

  auto record = [&](const FieldState& st) {
    const std::vector<double> ux = spatial_derivative(st, sys.c0);
    traj.samples.push_back({st.t, hnorm(st, sys), st.X.norm(), st.v[st.M], ux[0]});
  };
  record(state);
  if (options.snapshot_stride > 0) traj.snapshots.push_back(state);
  const double h0 = traj.samples.front().hnorm;

  for (long n = 1; n <= steps; ++n) {
    try {
      step(state, sys, dt, options.scheme, options.ode);
    } catch (const DivergenceError& e) {
      traj.blowup_time = e.time();
      traj.divergence_message = e.what();
      traj.outcome = Outcome::kGrew;
      return traj;
    }
    if (n % options.sample_stride == 0 || n == steps) record(state);
    if (options.snapshot_stride > 0 && n % options.snapshot_stride == 0) {
      traj.snapshots.push_back(state);
    }
  }

  const double hT = traj.samples.back().hnorm;
  if (h0 == 0.0) {
    traj.outcome = hT == 0.0 ? Outcome::kDecayed : Outcome::kGrew;
  } else if (hT < options.decay_threshold * h0) {
    traj.outcome = Outcome::kDecayed;
  } else if (hT > options.growth_threshold * h0) {
    traj.outcome = Outcome::kGrew;
  } else {
    traj.outcome = Outcome::kIndeterminate;
  }
  return traj;
}

}  // namespace stringlmi::wave
