#include "stringlmi/lmi.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <string>

#include "stringlmi/error.hpp"
#include "stringlmi/legendre.hpp"

namespace stringlmi {

namespace {

constexpr const char* kModule = "lmi_assembly";

Eigen::Matrix2d boundary_g(double c, double c0) {
  Eigen::Matrix2d g;
  g << 0.0, 1.0, 1.0 + c * c0, 0.0;
  return g;
}

Eigen::Matrix2d boundary_h(double c, double c0) {
  Eigen::Matrix2d h;
  h << 1.0 - c * c0, 0.0, 0.0, -1.0;
  return h;
}

// Rows of the boundary maps chi(0) = G xi and chi(1) = H xi common to both
// routes: G = [0 | g] + [K; 0] dynamics, H = [0 | h] + [0; K] dynamics.
void fill_boundary_maps(LmiBlocks& b, const SystemDescription& sys) {
  const int p = b.p_size();
  const int xi = b.xi_size();
  b.G = Eigen::MatrixXd::Zero(2, xi);
  b.H = Eigen::MatrixXd::Zero(2, xi);
  b.G.block<2, 2>(0, p) = b.g;
  b.H.block<2, 2>(0, p) = b.h;
  b.G.row(0) += sys.K * b.dynamics;
  b.H.row(1) += sys.K * b.dynamics;
}

void check_sizes(const LmiBlocks& blocks, const Eigen::MatrixXd& P) {
  if (P.rows() != blocks.p_size() || P.cols() != blocks.p_size()) {
    throw DomainError(kModule, "P must be " + std::to_string(blocks.p_size()) + "x" +
                                   std::to_string(blocks.p_size()) + " for order " +
                                   std::to_string(blocks.order));
  }
}

}  // namespace

Equilibrium check_equilibrium(const SystemDescription& sys) {
  const Eigen::MatrixXd closed = sys.closed_loop();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(closed);
  const auto& sv = svd.singularValues();
  const double largest = sv(0);
  const double smallest = sv(sv.size() - 1);
  return smallest > 1e-10 * largest ? Equilibrium::kUniqueZero : Equilibrium::kDegenerate;
}

Eigen::MatrixXd LmiBlocks::bessel_weight(const Eigen::Matrix2d& R) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(xi_size(), xi_size());
  for (const auto& [offset, weight] : bessel_blocks) out.block<2, 2>(offset, offset) = weight * R;
  return out;
}

LmiBlocks build_blocks(const SystemDescription& sys, int order) {
  sys.validate();
  if (order < 0 || order > legendre::kMaxOrder) {
    throw ConfigError(kModule, "order " + std::to_string(order) + " outside [0, " +
                                   std::to_string(legendre::kMaxOrder) + "]");
  }
  LmiBlocks b;
  b.order = order;
  b.n = sys.n();
  b.c = sys.c;
  b.c0 = sys.c0;
  const int n = b.n;
  const int p = b.p_size();
  const int xi = b.xi_size();
  const int m = 2 * (order + 1);

  b.g = boundary_g(sys.c, sys.c0);
  b.h = boundary_h(sys.c, sys.c0);

  Eigen::RowVector2d split(1.0, -1.0);
  b.B_tilde = (1.0 / (2.0 * sys.c)) * sys.B * split;

  b.dynamics = Eigen::MatrixXd::Zero(n, xi);
  b.dynamics.leftCols(n) = sys.closed_loop();
  b.dynamics.middleCols(n, 2) = b.B_tilde;

  fill_boundary_maps(b, sys);

  const legendre::BlockMatrices lm = legendre::build_block_matrices(order);
  b.L = lm.lower;
  b.ones = lm.ones;
  b.alternating = lm.alternating;

  Eigen::MatrixXd padded_L = Eigen::MatrixXd::Zero(m, xi);
  padded_L.middleCols(n, m) = b.L;
  b.projection_rate = b.ones * b.H - b.alternating * b.G - padded_L;

  b.F = Eigen::MatrixXd::Zero(p, xi);
  b.F.leftCols(p).setIdentity();

  b.Z.resize(p, xi);
  b.Z.topRows(n) = b.dynamics;
  b.Z.bottomRows(m) = sys.c * b.projection_rate;

  for (int k = 0; k <= order; ++k) b.bessel_blocks.emplace_back(n + 2 * k, 2.0 * k + 1.0);
  return b;
}

LmiBlocks build_blocks_order0(const SystemDescription& sys) {
  sys.validate();
  LmiBlocks b;
  b.order = 0;
  b.n = sys.n();
  b.c = sys.c;
  b.c0 = sys.c0;
  const int n = b.n;
  b.g = boundary_g(sys.c, sys.c0);
  b.h = boundary_h(sys.c, sys.c0);
  b.B_tilde.resize(n, 2);
  b.B_tilde.col(0) = sys.B / (2.0 * sys.c);
  b.B_tilde.col(1) = -sys.B / (2.0 * sys.c);

  // N_0 = [A+BK  B_tilde  0_{n,2}]
  b.dynamics.resize(n, n + 4);
  b.dynamics << sys.A + sys.B * sys.K, b.B_tilde, Eigen::MatrixXd::Zero(n, 2);
  fill_boundary_maps(b, sys);

  b.L = Eigen::MatrixXd::Zero(2, 2);
  b.ones = Eigen::MatrixXd::Identity(2, 2);
  b.alternating = Eigen::MatrixXd::Identity(2, 2);
  b.projection_rate = b.H - b.G;

  // F_0 = [I_{n+2}  0_{n+2,2}],  Z_0 = [N_0; c (H_0 - G_0)]
  b.F.resize(n + 2, n + 4);
  b.F << Eigen::MatrixXd::Identity(n + 2, n + 2), Eigen::MatrixXd::Zero(n + 2, 2);
  b.Z.resize(n + 2, n + 4);
  b.Z << b.dynamics, sys.c * (b.H - b.G);
  b.bessel_blocks = {{n, 1.0}};
  return b;
}

Eigen::MatrixXd assemble_psi(const LmiBlocks& blocks, const Eigen::MatrixXd& P,
                             const Eigen::Matrix2d& S, const Eigen::Matrix2d& R) {
  check_sizes(blocks, P);
  const Eigen::MatrixXd cross = blocks.Z.transpose() * P * blocks.F;
  Eigen::MatrixXd psi = cross + cross.transpose();
  psi -= blocks.c * blocks.bessel_weight(R);
  psi += blocks.c * (blocks.H.transpose() * (S + R) * blocks.H -
                     blocks.G.transpose() * S * blocks.G);
  return 0.5 * (psi + psi.transpose());
}

Eigen::Matrix2d boundary_block(const LmiBlocks& blocks, const Eigen::Matrix2d& S,
                               const Eigen::Matrix2d& R) {
  return blocks.h.transpose() * (S + R) * blocks.h - blocks.g.transpose() * S * blocks.g;
}

double boundary_spectral_radius(double c, double c0) {
  const Eigen::Matrix2d gh = boundary_g(c, c0).inverse() * boundary_h(c, c0);
  Eigen::EigenSolver<Eigen::Matrix2d> es(gh, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd symmetric_basis(int n, int i, int j) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  e(i, j) = 1.0;
  e(j, i) = 1.0;
  return e;
}

Eigen::VectorXd DecisionLayout::pack(const Eigen::MatrixXd& P, const Eigen::Matrix2d& S,
                                     const Eigen::Matrix2d& R) const {
  Eigen::VectorXd x(num_variables());
  int k = 0;
  for (int i = 0; i < p_size; ++i) {
    for (int j = i; j < p_size; ++j) x(k++) = P(i, j);
  }
  x(k++) = S(0, 0);
  x(k++) = S(0, 1);
  x(k++) = S(1, 1);
  x(k++) = R(0, 0);
  x(k++) = R(0, 1);
  x(k++) = R(1, 1);
  return x;
}

std::tuple<Eigen::MatrixXd, Eigen::Matrix2d, Eigen::Matrix2d> DecisionLayout::unpack(
    const Eigen::VectorXd& x) const {
  if (x.size() != num_variables()) throw DomainError(kModule, "decision vector size mismatch");
  Eigen::MatrixXd P(p_size, p_size);
  int k = 0;
  for (int i = 0; i < p_size; ++i) {
    for (int j = i; j < p_size; ++j) P(i, j) = P(j, i) = x(k++);
  }
  Eigen::Matrix2d S;
  S(0, 0) = x(k++);
  S(0, 1) = S(1, 0) = x(k++);
  S(1, 1) = x(k++);
  Eigen::Matrix2d R;
  R(0, 0) = x(k++);
  R(0, 1) = R(1, 0) = x(k++);
  R(1, 1) = x(k++);
  return {P, S, R};
}

AffineLmiSystem build_affine_system(const LmiBlocks& blocks, double margin) {
  if (!(margin > 0.0)) throw DomainError(kModule, "strictness margin must be positive");
  const DecisionLayout layout{blocks.p_size()};
  const int nv = layout.num_variables();
  const int p = blocks.p_size();
  const int xi = blocks.xi_size();

  AffineLmiSystem sys;
  sys.num_variables = nv;
  sys.margin = margin;

  AffineConstraint cp{"P", Eigen::MatrixXd::Zero(p, p), {}};
  AffineConstraint cs{"S", Eigen::MatrixXd::Zero(2, 2), {}};
  AffineConstraint cr{"R", Eigen::MatrixXd::Zero(2, 2), {}};
  AffineConstraint cpsi{"-Psi", Eigen::MatrixXd::Zero(xi, xi), {}};
  cp.coefficients.assign(nv, Eigen::MatrixXd::Zero(p, p));
  cs.coefficients.assign(nv, Eigen::MatrixXd::Zero(2, 2));
  cr.coefficients.assign(nv, Eigen::MatrixXd::Zero(2, 2));
  cpsi.coefficients.reserve(nv);

  Eigen::VectorXd trace_weights = Eigen::VectorXd::Zero(nv);
  const Eigen::Matrix2d zero2 = Eigen::Matrix2d::Zero();
  const Eigen::MatrixXd zeroP = Eigen::MatrixXd::Zero(p, p);

  // Psi is linear in (P, S, R), so its coefficient on each basis element is
  // Psi evaluated at that element.
  int k = 0;
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j, ++k) {
      const Eigen::MatrixXd e = symmetric_basis(p, i, j);
      cp.coefficients[k] = e;
      if (i == j) trace_weights(k) = 1.0;
      cpsi.coefficients.push_back(-assemble_psi(blocks, e, zero2, zero2));
    }
  }
  for (int part = 0; part < 2; ++part) {
    AffineConstraint& target = part == 0 ? cs : cr;
    for (int i = 0; i < 2; ++i) {
      for (int j = i; j < 2; ++j, ++k) {
        const Eigen::Matrix2d e = symmetric_basis(2, i, j);
        target.coefficients[k] = e;
        if (i == j) trace_weights(k) = 1.0;
        cpsi.coefficients.push_back(part == 0 ? -assemble_psi(blocks, zeroP, e, zero2)
                                              : -assemble_psi(blocks, zeroP, zero2, e));
      }
    }
  }

  sys.constraints = {std::move(cp), std::move(cs), std::move(cr), std::move(cpsi)};
  sys.normalization = trace_weights;
  return sys;
}

}  // namespace stringlmi
