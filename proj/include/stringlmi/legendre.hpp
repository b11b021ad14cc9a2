#pragma once

// Shifted Legendre polynomials on [0, 1], quadrature rules, projections of
// sampled two-component fields and the associated Bessel lower bound.

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace stringlmi::legendre {

/// Largest polynomial order supported by the block builders and projections.
inline constexpr int kMaxOrder = 10;

/// Shifted Legendre polynomial of degree k at x in [0, 1], computed with the
/// three-term recurrence (k+1) L_{k+1} = (2k+1)(2x-1) L_k - k L_{k-1}.
double eval(int k, double x);

/// Values L_0(x) .. L_order(x).
std::vector<double> eval_all(int order, double x);

/// d/dx L_k(x), from the derivative recurrence P'_{k+1} = P'_{k-1} + (2k+1) P_k
/// of the unshifted family (times 2 for the change of variable).
double derivative(int k, double x);

/// (2j+1)(1 - (-1)^{j+k}) when j <= k, zero otherwise. These are the
/// coefficients of dL_k/dx in the basis L_0 .. L_k.
double ell_coefficient(int k, int j);

/// Stacked 2x2-block matrices driving the projection dynamics:
///   `lower`        2(N+1) x 2(N+1), block (k, j) = ell(k, j) I2
///   `ones`         2(N+1) x 2, N+1 copies of I2
///   `alternating`  2(N+1) x 2, block k = (-1)^k I2
struct BlockMatrices {
  Eigen::MatrixXd lower;
  Eigen::MatrixXd ones;
  Eigen::MatrixXd alternating;
};

BlockMatrices build_block_matrices(int order);

enum class QuadratureKind { kGauss, kTrapezoid };

/// Quadrature on [0, 1]. Gauss rules are composite (equal panels, same node
/// count per panel); trapezoid rules sit on the uniform grid i/M, i = 0..M.
struct QuadratureRule {
  QuadratureKind kind = QuadratureKind::kTrapezoid;
  int nodes_per_panel = 0;
  int panels = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  static QuadratureRule gauss(int nodes_per_panel, int panels = 1);
  static QuadratureRule trapezoid(int intervals);

  std::size_t size() const noexcept { return nodes.size(); }
  double integrate(const std::vector<double>& values) const;
};

/// A two-component function sampled on the nodes of a quadrature rule.
struct SampledField {
  QuadratureRule rule;
  std::array<std::vector<double>, 2> components;

  Eigen::Vector2d at(std::size_t i) const { return {components[0][i], components[1][i]}; }
};

/// Projections X_k = int_0^1 chi(x) L_k(x) dx for k = 0..N.
struct ProjectionVector {
  std::vector<Eigen::Vector2d> entries;

  int order() const noexcept { return static_cast<int>(entries.size()) - 1; }
  /// [X_0; X_1; ...; X_N] as one vector of length 2(N+1).
  Eigen::VectorXd stacked() const;
};

/// Precomputed weighted polynomial tables for a fixed rule and order.
class LegendreBasis {
 public:
  /// Throws ConfigError when order exceeds kMaxOrder or a Gauss rule has fewer
  /// than 2N+2 nodes per panel.
  LegendreBasis(int order, QuadratureRule rule);

  int order() const noexcept { return order_; }
  const QuadratureRule& rule() const noexcept { return rule_; }

  /// w_i L_k(x_i) over the rule nodes.
  const std::vector<double>& weighted_values(int k) const { return weighted_[k]; }

  /// Throws ConfigError when the samples do not live on this basis' rule.
  ProjectionVector project(const SampledField& field) const;

 private:
  int order_;
  QuadratureRule rule_;
  std::vector<std::vector<double>> weighted_;
  std::vector<double> ones_;
};

/// One-shot projection using the field's own quadrature rule.
ProjectionVector project(const SampledField& field, int order);

/// sum_k (2k+1) X_k^T R X_k. Throws DomainError when R is not symmetric.
double bessel_bound(const ProjectionVector& projection, const Eigen::Matrix2d& R);

/// Quadrature of int_0^1 chi^T(x) M(x) chi(x) dx with M(x) = S + x R.
double integrate_quadratic(const SampledField& field, const Eigen::Matrix2d& S,
                           const Eigen::Matrix2d& R = Eigen::Matrix2d::Zero());

}  // namespace stringlmi::legendre
