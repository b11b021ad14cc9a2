#include "stringlmi/affine_system.hpp"

#include <string>

#include "stringlmi/error.hpp"

namespace stringlmi {

namespace {

constexpr const char* kModule = "lmi_assembly";

bool is_symmetric(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

Eigen::MatrixXd AffineConstraint::evaluate(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd out = constant;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (x(k) != 0.0) out.noalias() += x(k) * coefficients[k];
  }
  return out;
}

bool AffineLmiSystem::homogeneous() const {
  for (const auto& c : constraints) {
    if (!c.constant.isZero(0.0)) return false;
  }
  return true;
}

std::vector<Eigen::MatrixXd> AffineLmiSystem::evaluate(const Eigen::VectorXd& x) const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(constraints.size());
  for (const auto& c : constraints) out.push_back(c.evaluate(x));
  return out;
}

void AffineLmiSystem::validate() const {
  if (num_variables < 1) throw DomainError(kModule, "affine system has no decision variables");
  if (!(margin > 0.0)) throw DomainError(kModule, "strictness margin must be positive");
  for (const auto& c : constraints) {
    if (c.constant.rows() != c.constant.cols() || c.constant.rows() < 1) {
      throw DomainError(kModule, "constraint '" + c.name + "' is not square");
    }
    if (static_cast<int>(c.coefficients.size()) != num_variables) {
      throw DomainError(kModule, "constraint '" + c.name + "' has " +
                                     std::to_string(c.coefficients.size()) +
                                     " coefficient matrices, expected " +
                                     std::to_string(num_variables));
    }
    if (!is_symmetric(c.constant)) {
      throw DomainError(kModule, "constraint '" + c.name + "' constant is not symmetric");
    }
    for (const auto& m : c.coefficients) {
      if (m.rows() != c.size() || m.cols() != c.size()) {
        throw DomainError(kModule, "constraint '" + c.name + "' coefficient has wrong shape");
      }
      if (!is_symmetric(m)) {
        throw DomainError(kModule, "constraint '" + c.name + "' coefficient is not symmetric");
      }
    }
  }
  if (normalization && normalization->size() != num_variables) {
    throw DomainError(kModule, "normalization functional has wrong length");
  }
}

}  // namespace stringlmi
