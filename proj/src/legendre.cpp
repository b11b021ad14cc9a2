#include "stringlmi/legendre.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "stringlmi/error.hpp"
#include "stringlmi/kernels.hpp"

namespace stringlmi::legendre {

namespace {

constexpr const char* kModule = "legendre";

void check_order(int order) {
  if (order < 0 || order > kMaxOrder) {
    throw ConfigError(kModule, "order " + std::to_string(order) + " outside [0, " +
                                   std::to_string(kMaxOrder) + "]");
  }
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
void gauss_reference(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 1; k < n; ++k) {
        double p2 = ((2.0 * k + 1.0) * z * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node for the weight
    double p0 = 1.0;
    double p1 = z;
    for (int k = 1; k < n; ++k) {
      double p2 = ((2.0 * k + 1.0) * z * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

double eval(int k, double x) {
  if (k < 0) throw DomainError(kModule, "negative polynomial degree");
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(kModule, "x = " + std::to_string(x) + " outside [0, 1]");
  }
  const double t = 2.0 * x - 1.0;
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = t;
  for (int j = 1; j < k; ++j) {
    double next = ((2.0 * j + 1.0) * t * cur - j * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> eval_all(int order, double x) {
  if (order < 0) throw DomainError(kModule, "negative polynomial degree");
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(kModule, "x = " + std::to_string(x) + " outside [0, 1]");
  }
  std::vector<double> values(order + 1);
  const double t = 2.0 * x - 1.0;
  values[0] = 1.0;
  if (order >= 1) values[1] = t;
  for (int j = 1; j < order; ++j) {
    values[j + 1] = ((2.0 * j + 1.0) * t * values[j] - j * values[j - 1]) / (j + 1.0);
  }
  return values;
}

double derivative(int k, double x) {
  if (k == 0) {
    eval(0, x);  // domain check
    return 0.0;
  }
  std::vector<double> p = eval_all(k, x);
  // dP_j/dt with P'_0 = 0, P'_1 = 1, P'_{j+1} = P'_{j-1} + (2j+1) P_j
  double dprev = 0.0;
  double dcur = 1.0;
  for (int j = 1; j < k; ++j) {
    double dnext = dprev + (2.0 * j + 1.0) * p[j];
    dprev = dcur;
    dcur = dnext;
  }
  return 2.0 * dcur;
}

double ell_coefficient(int k, int j) {
  if (j > k || j < 0) return 0.0;
  return ((j + k) % 2 == 0) ? 0.0 : 2.0 * (2.0 * j + 1.0);
}

BlockMatrices build_block_matrices(int order) {
  check_order(order);
  const int size = 2 * (order + 1);
  BlockMatrices m;
  m.lower = Eigen::MatrixXd::Zero(size, size);
  m.ones = Eigen::MatrixXd::Zero(size, 2);
  m.alternating = Eigen::MatrixXd::Zero(size, 2);
  for (int k = 0; k <= order; ++k) {
    for (int j = 0; j <= k; ++j) {
      m.lower.block<2, 2>(2 * k, 2 * j) = ell_coefficient(k, j) * Eigen::Matrix2d::Identity();
    }
    m.ones.block<2, 2>(2 * k, 0).setIdentity();
    m.alternating.block<2, 2>(2 * k, 0) = (k % 2 == 0 ? 1.0 : -1.0) * Eigen::Matrix2d::Identity();
  }
  return m;
}

QuadratureRule QuadratureRule::gauss(int nodes_per_panel, int panels) {
  if (nodes_per_panel < 1 || panels < 1) {
    throw ConfigError(kModule, "Gauss rule needs at least one node and one panel");
  }
  std::vector<double> ref_x;
  std::vector<double> ref_w;
  gauss_reference(nodes_per_panel, ref_x, ref_w);
  QuadratureRule rule;
  rule.kind = QuadratureKind::kGauss;
  rule.nodes_per_panel = nodes_per_panel;
  rule.panels = panels;
  rule.nodes.reserve(static_cast<std::size_t>(nodes_per_panel) * panels);
  rule.weights.reserve(rule.nodes.capacity());
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (int i = 0; i < nodes_per_panel; ++i) {
      rule.nodes.push_back(a + 0.5 * h * (ref_x[i] + 1.0));
      rule.weights.push_back(0.5 * h * ref_w[i]);
    }
  }
  return rule;
}

QuadratureRule QuadratureRule::trapezoid(int intervals) {
  if (intervals < 1) throw ConfigError(kModule, "trapezoid rule needs at least one interval");
  QuadratureRule rule;
  rule.kind = QuadratureKind::kTrapezoid;
  rule.nodes_per_panel = 2;
  rule.panels = intervals;
  const double h = 1.0 / intervals;
  rule.nodes.resize(intervals + 1);
  rule.weights.assign(intervals + 1, h);
  for (int i = 0; i <= intervals; ++i) rule.nodes[i] = static_cast<double>(i) / intervals;
  rule.weights.front() = rule.weights.back() = 0.5 * h;
  return rule;
}

double QuadratureRule::integrate(const std::vector<double>& values) const {
  if (values.size() != nodes.size()) {
    throw ConfigError(kModule, "sample count does not match quadrature node count");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += weights[i] * values[i];
  return sum;
}

Eigen::VectorXd ProjectionVector::stacked() const {
  Eigen::VectorXd out(2 * entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) out.segment<2>(2 * k) = entries[k];
  return out;
}

LegendreBasis::LegendreBasis(int order, QuadratureRule rule) : order_(order), rule_(std::move(rule)) {
  check_order(order);
  if (rule_.kind == QuadratureKind::kGauss && rule_.nodes_per_panel < 2 * order + 2) {
    throw ConfigError(kModule, "Gauss rule with " + std::to_string(rule_.nodes_per_panel) +
                                   " nodes per panel cannot integrate order " +
                                   std::to_string(order) + " products (needs " +
                                   std::to_string(2 * order + 2) + ")");
  }
  weighted_.assign(order + 1, std::vector<double>(rule_.size()));
  ones_.assign(rule_.size(), 1.0);
  for (std::size_t i = 0; i < rule_.size(); ++i) {
    std::vector<double> values = eval_all(order, rule_.nodes[i]);
    for (int k = 0; k <= order; ++k) weighted_[k][i] = rule_.weights[i] * values[k];
  }
}

ProjectionVector LegendreBasis::project(const SampledField& field) const {
  const std::size_t n = rule_.size();
  if (field.rule.kind != rule_.kind || field.rule.size() != n ||
      field.rule.panels != rule_.panels || field.rule.nodes_per_panel != rule_.nodes_per_panel ||
      field.components[0].size() != n || field.components[1].size() != n) {
    throw ConfigError(kModule, "samples are not on the projection quadrature grid");
  }
  const auto& table = kernels::active();
  ProjectionVector out;
  out.entries.resize(order_ + 1);
  for (int k = 0; k <= order_; ++k) {
    for (int c = 0; c < 2; ++c) {
      out.entries[k][c] =
          table.weighted_dot(weighted_[k].data(), field.components[c].data(), ones_.data(), n);
    }
  }
  return out;
}

ProjectionVector project(const SampledField& field, int order) {
  return LegendreBasis(order, field.rule).project(field);
}

double bessel_bound(const ProjectionVector& projection, const Eigen::Matrix2d& R) {
  const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
  if (std::abs(R(0, 1) - R(1, 0)) > 1e-12 * scale) {
    throw DomainError(kModule, "weight matrix R is not symmetric");
  }
  double bound = 0.0;
  for (std::size_t k = 0; k < projection.entries.size(); ++k) {
    const Eigen::Vector2d& xk = projection.entries[k];
    bound += (2.0 * k + 1.0) * xk.dot(R * xk);
  }
  return bound;
}

double integrate_quadratic(const SampledField& field, const Eigen::Matrix2d& S,
                           const Eigen::Matrix2d& R) {
  const auto& rule = field.rule;
  if (field.components[0].size() != rule.size() || field.components[1].size() != rule.size()) {
    throw ConfigError(kModule, "samples are not on the quadrature grid");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Eigen::Vector2d chi = field.at(i);
    const Eigen::Matrix2d weight = S + rule.nodes[i] * R;
    sum += rule.weights[i] * chi.dot(weight * chi);
  }
  return sum;
}

}  // namespace stringlmi::legendre
