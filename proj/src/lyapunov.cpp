#include "stringlmi/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "stringlmi/error.hpp"
#include "stringlmi/lmi.hpp"

namespace stringlmi::lyapunov {

namespace {

constexpr const char* kModule = "lyapunov";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

Eigen::VectorXd stack(const wave::FieldState& state, const legendre::ProjectionVector& proj) {
  const int n = static_cast<int>(state.X.size());
  Eigen::VectorXd out(n + 2 * static_cast<int>(proj.entries.size()));
  out.head(n) = state.X;
  out.tail(out.size() - n) = proj.stacked();
  return out;
}

double quad_form(const Eigen::MatrixXd& P, const Eigen::VectorXd& x) { return x.dot(P * x); }

}  // namespace

double evaluate_calV(const legendre::SampledField& chi, const Eigen::Matrix2d& S,
                     const Eigen::Matrix2d& R) {
  return legendre::integrate_quadratic(chi, S, R);
}

double evaluate_calV(const wave::FieldState& state, const SystemDescription& sys,
                     const Eigen::Matrix2d& S, const Eigen::Matrix2d& R) {
  return evaluate_calV(wave::riemann_chi(state, sys), S, R);
}

Eigen::VectorXd extended_state(const wave::FieldState& state, const SystemDescription& sys,
                               int order) {
  return stack(state, legendre::project(wave::riemann_chi(state, sys), order));
}

double evaluate_V(const wave::FieldState& state, const SystemDescription& sys,
                  const Certificate& cert) {
  const long expected = state.X.size() + 2L * (cert.order + 1);
  if (cert.order < 0 || cert.P.rows() != expected || cert.P.cols() != expected) {
    throw DomainError(kModule, "certificate of order " + std::to_string(cert.order) +
                                   " does not match the state dimension");
  }
  const legendre::SampledField chi = wave::riemann_chi(state, sys);
  const Eigen::VectorXd xn = stack(state, legendre::project(chi, cert.order));
  return quad_form(cert.P, xn) + evaluate_calV(chi, cert.S, cert.R);
}

std::string LyapunovSeries::to_csv() const {
  std::ostringstream os;
  os << "t,V,hnorm2,ratio\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << fmt(times[i]) << ',' << fmt(V[i]) << ',' << fmt(hnorm2[i]) << ',';
    if (hnorm2[i] > 0.0) os << fmt(V[i] / hnorm2[i]);
    os << '\n';
  }
  return os.str();
}

LyapunovSeries check_decay(const wave::Trajectory& traj, const Certificate& cert,
                           const DecayOptions& options) {
  if (traj.snapshots.empty()) throw PreconditionError(kModule, "trajectory has no snapshots");
  const LmiBlocks blocks = build_blocks(traj.sys, cert.order);
  const VerificationReport check = verify_certificate(blocks, cert);
  if (!check.passed) {
    std::string why;
    for (const auto& f : check.failures) why += (why.empty() ? "" : "; ") + f;
    throw PreconditionError(kModule, "certificate not verified: " + why);
  }

  LyapunovSeries out;
  const int M = traj.snapshots.front().M;
  const legendre::LegendreBasis basis(cert.order, legendre::QuadratureRule::trapezoid(M));
  for (const auto& st : traj.snapshots) {
    const legendre::SampledField chi = wave::riemann_chi(st, traj.sys);
    const Eigen::VectorXd xn = stack(st, basis.project(chi));
    out.times.push_back(st.t);
    out.V.push_back(quad_form(cert.P, xn) + evaluate_calV(chi, cert.S, cert.R));
    out.hnorm2.push_back(wave::hnorm2(st, traj.sys));
  }

  const double dx = 1.0 / M;
  const double rel = options.tolerance ? *options.tolerance : options.C * (traj.dt + dx * dx);
  out.tolerance = rel * out.V.front();
  for (std::size_t k = 1; k < out.V.size(); ++k) {
    out.max_increment = std::max(out.max_increment, out.V[k] - out.V[k - 1]);
  }
  out.nonincreasing = out.max_increment <= out.tolerance;

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t k = 0; k < out.V.size(); ++k) {
    if (out.hnorm2[k] <= 0.0) continue;
    const double r = out.V[k] / out.hnorm2[k];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (std::isfinite(lo)) {
    out.ratio_lo = lo;
    out.ratio_hi = hi;
    out.ratio_bounded = lo > 0.0 && std::isfinite(hi);
  }

  // least-squares slope of log V over the tail half
  const std::size_t start = out.V.size() / 2;
  double st = 0, sy = 0, stt = 0, sty = 0;
  int count = 0;
  for (std::size_t k = start; k < out.V.size(); ++k) {
    if (!(out.V[k] > 0.0)) continue;
    const double t = out.times[k];
    const double y = std::log(out.V[k]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  const double denom = count * stt - st * st;
  if (count >= 2 && denom > 0.0) out.decay_rate = -(count * sty - st * sy) / denom;
  return out;
}

ProjectionResidual check_projection_derivative(const wave::Trajectory& traj, int order) {
  if (traj.snapshots.size() < 3) {
    throw PreconditionError(kModule, "need at least 3 snapshots, have " +
                                         std::to_string(traj.snapshots.size()));
  }
  const LmiBlocks blocks = build_blocks(traj.sys, order);
  const int M = traj.snapshots.front().M;
  const legendre::LegendreBasis basis(order, legendre::QuadratureRule::trapezoid(M));
  const double c = traj.sys.c;

  std::vector<Eigen::VectorXd> proj;
  std::vector<Eigen::VectorXd> rhs;
  for (const auto& st : traj.snapshots) {
    const legendre::SampledField chi = wave::riemann_chi(st, traj.sys);
    const Eigen::VectorXd p = basis.project(chi).stacked();
    const Eigen::Vector2d chi1 = chi.at(M);
    const Eigen::Vector2d chi0 = chi.at(0);
    rhs.push_back(c * (blocks.ones * chi1 - blocks.alternating * chi0 - blocks.L * p));
    proj.push_back(p);
  }

  ProjectionResidual out;
  out.order = order;
  double sum2 = 0.0;
  for (std::size_t k = 1; k + 1 < proj.size(); ++k) {
    const double h = traj.snapshots[k + 1].t - traj.snapshots[k - 1].t;
    const Eigen::VectorXd rate = (proj[k + 1] - proj[k - 1]) / h;
    const double r = (rate - rhs[k]).norm();
    out.times.push_back(traj.snapshots[k].t);
    out.residuals.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
    out.max_rate = std::max(out.max_rate, rate.norm());
    sum2 += r * r;
    ++out.samples;
  }
  out.rms_residual = std::sqrt(sum2 / out.samples);

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(proj.front().size());
  for (std::size_t k = 1; k < proj.size(); ++k) {
    const double h = traj.snapshots[k].t - traj.snapshots[k - 1].t;
    acc += 0.5 * h * (rhs[k] + rhs[k - 1]);
    out.integrated_max = std::max(out.integrated_max, (proj[k] - proj.front() - acc).norm());
  }
  return out;
}

}  // namespace stringlmi::lyapunov
