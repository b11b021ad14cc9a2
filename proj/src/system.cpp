#include "stringlmi/system.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "stringlmi/error.hpp"

namespace stringlmi {

namespace {

constexpr const char* kModule = "lmi_assembly";

void mix(std::uint64_t& h, double value) {
  unsigned char bytes[sizeof(double)];
  std::memcpy(bytes, &value, sizeof(double));
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
}

void mix(std::uint64_t& h, const Eigen::MatrixXd& m) {
  mix(h, static_cast<double>(m.rows()));
  mix(h, static_cast<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) mix(h, m(i, j));
  }
}

}  // namespace

void SystemDescription::validate() const {
  const auto n = A.rows();
  if (n < 1 || A.cols() != n) throw DomainError(kModule, "A must be square and non-empty");
  if (B.rows() != n || B.cols() != 1) {
    throw DomainError(kModule, "B must be " + std::to_string(n) + "x1");
  }
  if (K.rows() != 1 || K.cols() != n) {
    throw DomainError(kModule, "K must be 1x" + std::to_string(n));
  }
  if (!A.allFinite() || !B.allFinite() || !K.allFinite()) {
    throw DomainError(kModule, "system matrices must be finite");
  }
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError(kModule, "wave speed c must be > 0");
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    throw DomainError(kModule, "boundary damping c0 must be > 0");
  }
}

SystemDescription SystemDescription::with_wave(double speed, double damping) const {
  SystemDescription copy = *this;
  copy.c = speed;
  copy.c0 = damping;
  return copy;
}

std::uint64_t SystemDescription::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  mix(h, A);
  mix(h, B);
  mix(h, K);
  mix(h, c);
  mix(h, c0);
  return h;
}

namespace presets {

SystemDescription hurwitz_pair(double c, double c0) {
  SystemDescription s;
  s.A.resize(2, 2);
  s.A << -2.0, 1.0, 0.0, -1.0;
  s.B.resize(2, 1);
  s.B << 1.0, 1.0;
  s.K.resize(1, 2);
  s.K << 0.0, -2.0;
  s.c = c;
  s.c0 = c0;
  return s;
}

SystemDescription unstable_open_loop(double c, double c0) {
  SystemDescription s;
  s.A.resize(2, 2);
  s.A << 2.0, 1.0, 0.0, 1.0;
  s.B.resize(2, 1);
  s.B << 1.0, 1.0;
  s.K.resize(1, 2);
  s.K << -10.0, 2.0;
  s.c = c;
  s.c0 = c0;
  return s;
}

SystemDescription unstable_closed_loop(double c, double c0) {
  SystemDescription s;
  s.A.resize(2, 2);
  s.A << 0.0, 1.0, -2.0, 0.1;
  s.B.resize(2, 1);
  s.B << 0.0, 1.0;
  s.K.resize(1, 2);
  s.K << 1.0, 0.0;
  s.c = c;
  s.c0 = c0;
  return s;
}

}  // namespace presets

}  // namespace stringlmi
