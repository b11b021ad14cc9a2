#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "stringlmi/error.hpp"
#include "stringlmi/sdp.hpp"

namespace stringlmi {

namespace {

constexpr const char* kModule = "sdp";

// Shortest round-trip representation, so output is byte-stable.
std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void emit_matrix(std::ostringstream& os, int matno, int blkno, const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = i; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) {
        os << matno << ' ' << blkno << ' ' << (i + 1) << ' ' << (j + 1) << ' ' << fmt(m(i, j))
           << '\n';
      }
    }
  }
}

}  // namespace

std::string export_sdpa(const AffineLmiSystem& system) {
  const int nv = system.num_variables;
  const int m = nv + 1;
  const bool with_norm = !system.constraints.empty() && system.homogeneous();
  const int nblock = static_cast<int>(system.constraints.size()) + (with_norm ? 1 : 0);

  std::ostringstream os;
  os << "* slack maximization: minimize -t s.t. F_j(x) - t I >= 0\n";
  os << "* variables 1.." << nv << " are x, variable " << m << " is t\n";
  if (!system.constraints.empty()) {
    os << "* blocks:";
    for (const auto& c : system.constraints) os << ' ' << c.name << '(' << c.size() << ')';
    if (with_norm) os << " normalization(1)";
    os << '\n';
  }
  os << "* margin " << fmt(system.margin) << '\n';
  os << m << '\n' << nblock << '\n';
  for (int b = 0; b < nblock; ++b) {
    if (b) os << ' ';
    if (b < static_cast<int>(system.constraints.size())) {
      os << system.constraints[b].size();
    } else {
      os << -1;
    }
  }
  os << '\n';
  for (int k = 0; k < m; ++k) {
    if (k) os << ' ';
    os << (k == nv ? "-1" : "0");
  }
  os << '\n';

  // SDPA form: sum_k y_k F_k - F_0 >= 0, so F_0 = -constant and the slack
  // enters with -I.
  for (std::size_t b = 0; b < system.constraints.size(); ++b) {
    const auto& c = system.constraints[b];
    const int blkno = static_cast<int>(b) + 1;
    emit_matrix(os, 0, blkno, -c.constant);
    for (int k = 0; k < nv; ++k) emit_matrix(os, k + 1, blkno, c.coefficients[k]);
    emit_matrix(os, m, blkno, -Eigen::MatrixXd::Identity(c.size(), c.size()));
  }
  if (with_norm) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(nv);
    if (system.normalization) {
      a = *system.normalization;
    } else {
      for (const auto& c : system.constraints) {
        for (int k = 0; k < nv; ++k) a(k) += c.coefficients[k].trace();
      }
    }
    os << 0 << ' ' << nblock << " 1 1 " << fmt(-1.0) << '\n';
    for (int k = 0; k < nv; ++k) {
      if (a(k) != 0.0) os << (k + 1) << ' ' << nblock << " 1 1 " << fmt(-a(k)) << '\n';
    }
  }
  return os.str();
}

SdpaProblem parse_sdpa(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;  // first two non-comment lines
  std::ostringstream rest;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*' || line[0] == '"') continue;
    if (header.size() < 2) {
      header.push_back(line);
    } else {
      for (char& ch : line) {
        if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
      }
      rest << line << '\n';
    }
  }
  if (header.size() < 2) throw ConfigError(kModule, "SDPA text lacks mDIM/nBLOCK lines");

  SdpaProblem p;
  int nblock = 0;
  if (!(std::istringstream(header[0]) >> p.num_variables) || p.num_variables < 0) {
    throw ConfigError(kModule, "bad mDIM line: " + header[0]);
  }
  if (!(std::istringstream(header[1]) >> nblock) || nblock < 0) {
    throw ConfigError(kModule, "bad nBLOCK line: " + header[1]);
  }
  std::istringstream body(rest.str());
  p.block_sizes.resize(nblock);
  for (int b = 0; b < nblock; ++b) {
    if (!(body >> p.block_sizes[b]) || p.block_sizes[b] == 0) {
      throw ConfigError(kModule, "bad block structure");
    }
  }
  p.objective.resize(p.num_variables);
  for (int k = 0; k < p.num_variables; ++k) {
    if (!(body >> p.objective(k))) throw ConfigError(kModule, "truncated objective row");
  }
  p.matrices.assign(p.num_variables + 1, {});
  for (auto& mats : p.matrices) {
    for (int b = 0; b < nblock; ++b) {
      const int s = std::abs(p.block_sizes[b]);
      mats.push_back(Eigen::MatrixXd::Zero(s, s));
    }
  }
  int k = 0, b = 0, i = 0, j = 0;
  double v = 0.0;
  while (body >> k) {
    if (!(body >> b >> i >> j >> v)) throw ConfigError(kModule, "truncated coefficient line");
    if (k < 0 || k > p.num_variables || b < 1 || b > nblock) {
      throw ConfigError(kModule, "coefficient index out of range");
    }
    const int s = std::abs(p.block_sizes[b - 1]);
    if (i < 1 || j < 1 || i > s || j > s) throw ConfigError(kModule, "entry outside its block");
    if (p.block_sizes[b - 1] < 0 && i != j) {
      throw ConfigError(kModule, "off-diagonal entry in a diagonal block");
    }
    p.matrices[k][b - 1](i - 1, j - 1) = v;
    p.matrices[k][b - 1](j - 1, i - 1) = v;
  }
  if (!body.eof()) throw ConfigError(kModule, "unparseable coefficient data");
  return p;
}

AffineLmiSystem affine_system_from_sdpa(const SdpaProblem& problem, double margin) {
  const int m = problem.num_variables;
  if (m < 2) throw ConfigError(kModule, "expected at least one decision variable and a slack");
  for (int k = 0; k < m; ++k) {
    const double expect = k == m - 1 ? -1.0 : 0.0;
    if (problem.objective(k) != expect) {
      throw ConfigError(kModule, "objective is not slack maximization");
    }
  }
  AffineLmiSystem sys;
  sys.num_variables = m - 1;
  sys.margin = margin;
  const int nblock = static_cast<int>(problem.block_sizes.size());
  for (int b = 0; b < nblock; ++b) {
    const Eigen::MatrixXd& slack = problem.matrices[m][b];
    const int s = std::abs(problem.block_sizes[b]);
    if (slack.isZero(0.0) && s == 1) {
      // Normalization 1 - a^T x >= 0.
      if (problem.matrices[0][b](0, 0) != -1.0) {
        throw ConfigError(kModule, "normalization block must have constant 1");
      }
      Eigen::VectorXd a(sys.num_variables);
      for (int k = 0; k < sys.num_variables; ++k) a(k) = -problem.matrices[k + 1][b](0, 0);
      sys.normalization = a;
      continue;
    }
    if (!slack.isApprox(-Eigen::MatrixXd::Identity(s, s))) {
      throw ConfigError(kModule, "slack does not enter block " + std::to_string(b + 1) + " as -I");
    }
    AffineConstraint c;
    c.name = "block" + std::to_string(b + 1);
    c.constant = -problem.matrices[0][b];
    for (int k = 0; k < sys.num_variables; ++k) c.coefficients.push_back(problem.matrices[k + 1][b]);
    sys.constraints.push_back(std::move(c));
  }
  return sys;
}

}  // namespace stringlmi
