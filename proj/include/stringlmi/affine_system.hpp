#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace stringlmi {

/// One block constraint  F(x) = F0 + sum_k x_k F_k  required to satisfy
/// F(x) >= margin * I. All matrices are symmetric.
struct AffineConstraint {
  std::string name;
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> coefficients;

  int size() const noexcept { return static_cast<int>(constant.rows()); }
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;
};

/// A list of block constraints affine in a common decision vector.
///
/// When every constraint is homogeneous (all constants zero) the feasible set
/// is a cone; `normalization` then holds a linear functional a with a^T x <= 1
/// that the solver uses to keep the slack maximization bounded.
struct AffineLmiSystem {
  int num_variables = 0;
  std::vector<AffineConstraint> constraints;
  double margin = 1e-6;
  std::optional<Eigen::VectorXd> normalization;

  bool homogeneous() const;
  std::vector<Eigen::MatrixXd> evaluate(const Eigen::VectorXd& x) const;
  /// Throws DomainError when shapes are inconsistent or a matrix is not symmetric.
  void validate() const;
};

}  // namespace stringlmi
