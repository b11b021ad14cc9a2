#include "stringlmi/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "stringlmi/error.hpp"

namespace stringlmi {

namespace {

constexpr const char* kModule = "sdp";
// Iterates beyond this are treated as an unbounded slack direction.
constexpr double kUnboundedSlack = 1e12;

// One block of the standard-form pair
//   (P) min sum_b <C_b, X_b>  s.t. sum_b <A_ib, X_b> = b_i,  X_b >= 0
//   (D) max b^T y             s.t. Z_b = C_b - sum_i y_i A_ib >= 0
struct Block {
  int size = 0;
  Eigen::MatrixXd C;
  std::vector<std::pair<int, Eigen::MatrixXd>> terms;  // (variable, A)
};

struct Problem {
  int m = 0;  // includes the slack, stored last
  Eigen::VectorXd b;
  std::vector<Block> blocks;
  std::vector<double> block_scale;  // per constraint, 1 for the normalization
};

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a.cwiseProduct(b).sum(); }

Eigen::VectorXd default_normalization(const AffineLmiSystem& system) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(system.num_variables);
  for (const auto& c : system.constraints) {
    for (int k = 0; k < system.num_variables; ++k) a(k) += c.coefficients[k].trace();
  }
  return a;
}

Problem build_problem(const AffineLmiSystem& system, const SolverOptions& options) {
  Problem pr;
  const int nv = system.num_variables;
  pr.m = nv + 1;
  pr.b = Eigen::VectorXd::Zero(pr.m);
  pr.b(nv) = 1.0;
  const bool homogeneous = system.homogeneous();

  for (const auto& c : system.constraints) {
    double scale = 1.0;
    if (homogeneous && options.scale_blocks) {
      double largest = 0.0;
      for (const auto& f : c.coefficients) largest = std::max(largest, f.norm());
      if (largest > 0.0) scale = 1.0 / largest;
    }
    Block blk;
    blk.size = c.size();
    blk.C = scale * c.constant;
    for (int k = 0; k < nv; ++k) {
      if (!c.coefficients[k].isZero(0.0)) blk.terms.emplace_back(k, -scale * c.coefficients[k]);
    }
    blk.terms.emplace_back(nv, Eigen::MatrixXd::Identity(blk.size, blk.size));
    pr.blocks.push_back(std::move(blk));
    pr.block_scale.push_back(scale);
  }
  if (homogeneous && !system.constraints.empty()) {
    const Eigen::VectorXd a = system.normalization ? *system.normalization
                                                   : default_normalization(system);
    Block blk;
    blk.size = 1;
    blk.C = Eigen::MatrixXd::Ones(1, 1);
    for (int k = 0; k < nv; ++k) {
      if (a(k) != 0.0) blk.terms.emplace_back(k, Eigen::MatrixXd::Constant(1, 1, a(k)));
    }
    pr.blocks.push_back(std::move(blk));
    pr.block_scale.push_back(1.0);
  }
  return pr;
}

// A(V)_i = sum_b <A_ib, V_b>
Eigen::VectorXd apply_a(const Problem& pr, const std::vector<Eigen::MatrixXd>& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(pr.m);
  for (std::size_t bi = 0; bi < pr.blocks.size(); ++bi) {
    for (const auto& [i, a] : pr.blocks[bi].terms) out(i) += inner(a, v[bi]);
  }
  return out;
}

// A^T(y)_b = sum_i y_i A_ib
Eigen::MatrixXd apply_at(const Block& blk, const Eigen::VectorXd& y) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(blk.size, blk.size);
  for (const auto& [i, a] : blk.terms) {
    if (y(i) != 0.0) out.noalias() += y(i) * a;
  }
  return out;
}

// Largest alpha in (0, 1] keeping M + alpha D positive definite, times the
// step fraction. `chol` is the Cholesky factor of M.
double step_length(const Eigen::MatrixXd& chol, const Eigen::MatrixXd& d, double fraction) {
  const auto tri = chol.triangularView<Eigen::Lower>();
  Eigen::MatrixXd w = tri.solve(d);
  w = tri.solve(w.transpose()).eval();
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return 1.0;
  return std::min(1.0, fraction * (-1.0 / lmin));
}

struct BlockEigen {
  double min = 0.0;
  double max_abs = 0.0;
};

BlockEigen block_eigen(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)))};
}

struct IterateResult {
  Eigen::VectorXd y;
  SolveDiagnostics diag;
};

IterateResult run_ipm(const Problem& pr, const SolverOptions& options) {
  const std::size_t nb = pr.blocks.size();
  SolveDiagnostics diag;

  int total_dim = 0;
  double c_norm = 0.0;
  for (const auto& blk : pr.blocks) {
    total_dim += blk.size;
    c_norm += blk.C.squaredNorm();
  }
  c_norm = std::sqrt(c_norm);
  const double b_norm = pr.b.norm();

  // Identity-scaled interior start.
  std::vector<Eigen::MatrixXd> X(nb), Z(nb);
  for (std::size_t bi = 0; bi < nb; ++bi) {
    const Block& blk = pr.blocks[bi];
    double a_max = 0.0;
    double xi = 0.0;
    for (const auto& [i, a] : blk.terms) {
      const double an = a.norm();
      a_max = std::max(a_max, an);
      xi = std::max(xi, (1.0 + std::abs(pr.b(i))) / (1.0 + an));
    }
    const double s = blk.size;
    const double x0 = std::max({10.0, std::sqrt(s), s * xi});
    const double z0 = std::max({10.0, std::sqrt(s), a_max, blk.C.norm()});
    X[bi] = x0 * Eigen::MatrixXd::Identity(blk.size, blk.size);
    Z[bi] = z0 * Eigen::MatrixXd::Identity(blk.size, blk.size);
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(pr.m);

  std::vector<Eigen::MatrixXd> LX(nb), Zinv(nb), LZ(nb), Rd(nb);
  double previous_objective = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 0;; ++iter) {
    // Factorizations of the current iterate.
    bool factor_ok = true;
    for (std::size_t bi = 0; bi < nb && factor_ok; ++bi) {
      Eigen::LLT<Eigen::MatrixXd> lx(X[bi]);
      Eigen::LLT<Eigen::MatrixXd> lz(Z[bi]);
      if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
      LX[bi] = lx.matrixL();
      LZ[bi] = lz.matrixL();
      Zinv[bi] = lz.solve(Eigen::MatrixXd::Identity(pr.blocks[bi].size, pr.blocks[bi].size));
      Zinv[bi] = 0.5 * (Zinv[bi] + Zinv[bi].transpose()).eval();
    }
    if (!factor_ok) {
      diag.singular_newton = true;
      diag.message = "iterate lost positive definiteness";
      break;
    }

    // Residuals and measures.
    const Eigen::VectorXd rp = pr.b - apply_a(pr, X);
    double rd_norm = 0.0;
    double pobj = 0.0;
    double mu = 0.0;
    for (std::size_t bi = 0; bi < nb; ++bi) {
      const Block& blk = pr.blocks[bi];
      Rd[bi] = blk.C - apply_at(blk, y) - Z[bi];
      rd_norm += Rd[bi].squaredNorm();
      pobj += inner(blk.C, X[bi]);
      mu += inner(X[bi], Z[bi]);
    }
    rd_norm = std::sqrt(rd_norm);
    mu /= total_dim;
    const double dobj = pr.b.dot(y);

    diag.iterations = iter;
    diag.objective = dobj;
    diag.primal_infeasibility = rp.norm() / (1.0 + b_norm);
    diag.dual_infeasibility = rd_norm / (1.0 + c_norm);
    diag.relative_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    const double worst = std::max({diag.primal_infeasibility, diag.dual_infeasibility,
                                   diag.relative_gap});
    if (worst < options.tolerance) {
      diag.converged = true;
      break;
    }
    if (diag.dual_infeasibility < options.tolerance && diag.relative_gap < 1e-8 &&
        std::abs(dobj - previous_objective) < options.slack_change_tolerance * (1.0 + std::abs(dobj))) {
      diag.converged = true;
      break;
    }
    if (!y.allFinite() || y.lpNorm<Eigen::Infinity>() > kUnboundedSlack) {
      diag.message = "slack unbounded";
      break;
    }
    if (iter >= options.max_iterations) {
      diag.iteration_cap = true;
      diag.message = "iteration cap reached";
      break;
    }
    previous_objective = dobj;

    // Schur complement M_ij = sum_b <L^T A_i U, L^T A_j U>, U = LZ^{-T}.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(pr.m, pr.m);
    for (std::size_t bi = 0; bi < nb; ++bi) {
      const Block& blk = pr.blocks[bi];
      const int s = blk.size;
      const int t = static_cast<int>(blk.terms.size());
      // U^T = LZ^{-1}, so L^T A U = L^T A LZ^{-T} = (LZ^{-1} (L^T A)^T)^T.
      Eigen::MatrixXd stacked(s * s, t);
      const auto lz = LZ[bi].triangularView<Eigen::Lower>();
      for (int k = 0; k < t; ++k) {
        Eigen::MatrixXd la = LX[bi].transpose() * blk.terms[k].second;
        Eigen::MatrixXd w = lz.solve(la.transpose());
        stacked.col(k) = Eigen::Map<const Eigen::VectorXd>(w.data(), s * s);
      }
      const Eigen::MatrixXd local = stacked.transpose() * stacked;
      for (int a = 0; a < t; ++a) {
        for (int c = 0; c < t; ++c) M(blk.terms[a].first, blk.terms[c].first) += local(a, c);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> schur(M);
    Eigen::LDLT<Eigen::MatrixXd> schur_fallback;
    bool use_fallback = false;
    if (schur.info() != Eigen::Success) {
      schur_fallback.compute(M);
      if (schur_fallback.info() != Eigen::Success) {
        diag.singular_newton = true;
        diag.message = "singular Schur complement";
        break;
      }
      use_fallback = true;
    }
    auto solve_m = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
      return use_fallback ? Eigen::VectorXd(schur_fallback.solve(rhs)) : Eigen::VectorXd(schur.solve(rhs));
    };

    // Direction for target sigma*mu with second-order term `corr` (may be empty).
    std::vector<Eigen::MatrixXd> dX(nb), dZ(nb);
    Eigen::VectorXd dy;
    auto direction = [&](double target, const std::vector<Eigen::MatrixXd>* corr) -> bool {
      std::vector<Eigen::MatrixXd> base(nb);
      for (std::size_t bi = 0; bi < nb; ++bi) {
        Eigen::MatrixXd tmp = X[bi] * Rd[bi];
        if (corr) tmp += (*corr)[bi];
        base[bi] = target * Zinv[bi] - X[bi] - tmp * Zinv[bi];
      }
      dy = solve_m(rp - apply_a(pr, base));
      if (!dy.allFinite()) return false;
      for (std::size_t bi = 0; bi < nb; ++bi) {
        const Block& blk = pr.blocks[bi];
        dZ[bi] = Rd[bi] - apply_at(blk, dy);
        Eigen::MatrixXd tmp = X[bi] * dZ[bi];
        if (corr) tmp += (*corr)[bi];
        Eigen::MatrixXd d = target * Zinv[bi] - X[bi] - tmp * Zinv[bi];
        dX[bi] = 0.5 * (d + d.transpose());
      }
      return true;
    };
    auto steps = [&](double fraction) {
      double ap = 1.0, ad = 1.0;
      for (std::size_t bi = 0; bi < nb; ++bi) {
        ap = std::min(ap, step_length(LX[bi], dX[bi], fraction));
        ad = std::min(ad, step_length(LZ[bi], dZ[bi], fraction));
      }
      return std::pair<double, double>{ap, ad};
    };

    // Predictor.
    if (!direction(0.0, nullptr)) {
      diag.singular_newton = true;
      diag.message = "non-finite Newton direction";
      break;
    }
    auto [ap_aff, ad_aff] = steps(1.0);
    double mu_aff = 0.0;
    for (std::size_t bi = 0; bi < nb; ++bi) {
      mu_aff += inner(X[bi] + ap_aff * dX[bi], Z[bi] + ad_aff * dZ[bi]);
    }
    mu_aff /= total_dim;
    const double ratio = std::clamp(mu_aff / mu, 0.0, 1.0);
    const double sigma = ratio * ratio * ratio;

    // Corrector.
    std::vector<Eigen::MatrixXd> corr(nb);
    for (std::size_t bi = 0; bi < nb; ++bi) corr[bi] = dX[bi] * dZ[bi];
    if (!direction(sigma * mu, &corr)) {
      diag.singular_newton = true;
      diag.message = "non-finite Newton direction";
      break;
    }
    auto [ap, ad] = steps(options.step_fraction);
    for (std::size_t bi = 0; bi < nb; ++bi) {
      X[bi] += ap * dX[bi];
      Z[bi] += ad * dZ[bi];
      X[bi] = 0.5 * (X[bi] + X[bi].transpose()).eval();
      Z[bi] = 0.5 * (Z[bi] + Z[bi].transpose()).eval();
    }
    y += ad * dy;
  }
  return {y, diag};
}

bool is_symmetric(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

SolveReport solve_feasibility(const AffineLmiSystem& system, const SolverOptions& options) {
  system.validate();
  if (options.max_iterations < 1) throw ConfigError(kModule, "iteration cap must be positive");
  if (!(options.tolerance > 0.0)) throw ConfigError(kModule, "tolerance must be positive");
  if (!(options.step_fraction > 0.0 && options.step_fraction < 1.0)) {
    throw ConfigError(kModule, "step fraction must lie in (0, 1)");
  }

  SolveReport report;
  if (system.constraints.empty()) {
    report.status = SolveStatus::kFeasible;
    report.decision = Eigen::VectorXd::Zero(system.num_variables);
    report.slack = std::numeric_limits<double>::infinity();
    report.diagnostics.converged = true;
    return report;
  }

  const Problem pr = build_problem(system, options);
  IterateResult run = run_ipm(pr, options);
  report.diagnostics = run.diag;

  Eigen::VectorXd x = run.y.head(system.num_variables);
  if (!x.allFinite()) {
    report.diagnostics.message = "non-finite iterate";
    return report;
  }

  // Re-evaluate every block on the original data; the solver's own slack is
  // not trusted.
  auto measure = [&](const Eigen::VectorXd& point) {
    BlockEigen worst{std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& c : system.constraints) {
      const BlockEigen e = block_eigen(c.evaluate(point));
      worst.min = std::min(worst.min, e.min);
      worst.max_abs = std::max(worst.max_abs, e.max_abs);
    }
    return worst;
  };
  BlockEigen e = measure(x);
  report.diagnostics.relative_slack = e.max_abs > 0.0 ? e.min / e.max_abs : 0.0;

  if (system.homogeneous()) {
    // A cone: any positive multiple of a strictly feasible point is feasible,
    // so a strictly positive relative slack is rescaled onto the margin.
    if (e.min > 0.0 && report.diagnostics.relative_slack >= options.relative_floor) {
      x *= system.margin * (1.0 + 1e-6) / e.min;
      e = measure(x);
    }
  }
  report.slack = e.min;
  report.decision = x;
  if (e.min >= system.margin) {
    report.status = SolveStatus::kFeasible;
  } else if (report.diagnostics.message.empty()) {
    report.diagnostics.message = "optimal slack below margin";
  }
  return report;
}

VerificationReport verify_certificate(const LmiBlocks& blocks, const Certificate& cert, double tol) {
  const int p = blocks.p_size();
  if (cert.P.rows() != p || cert.P.cols() != p) {
    throw DomainError(kModule, "certificate P is " + std::to_string(cert.P.rows()) + "x" +
                                   std::to_string(cert.P.cols()) + ", blocks need " +
                                   std::to_string(p) + "x" + std::to_string(p));
  }
  if (!is_symmetric(cert.P) || !is_symmetric(cert.S) || !is_symmetric(cert.R)) {
    throw DomainError(kModule, "certificate matrices must be symmetric");
  }
  VerificationReport out;
  auto min_eig = [](const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  const double eps = cert.margin;
  out.min_eig_P = min_eig(cert.P);
  out.min_eig_S = min_eig(cert.S);
  out.min_eig_R = min_eig(cert.R);
  const Eigen::MatrixXd psi = assemble_psi(blocks, cert.P, cert.S, cert.R);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(psi, Eigen::EigenvaluesOnly);
  out.max_eig_psi = es.eigenvalues()(psi.rows() - 1);

  if (!(out.min_eig_P >= eps - tol)) out.failures.push_back("P not positive definite");
  if (!(out.min_eig_S >= eps - tol)) out.failures.push_back("S not positive definite");
  if (!(out.min_eig_R >= eps - tol)) out.failures.push_back("R not positive definite");
  if (!(out.max_eig_psi <= -eps + tol)) out.failures.push_back("Psi not negative definite");
  out.passed = out.failures.empty();
  return out;
}

CertifyReport certify(const LmiBlocks& blocks, double margin, const SolverOptions& options) {
  const AffineLmiSystem system = build_affine_system(blocks, margin);
  const SolveReport solved = solve_feasibility(system, options);
  CertifyReport out;
  out.diagnostics = solved.diagnostics;
  if (!solved.decision) return out;

  const DecisionLayout layout{blocks.p_size()};
  auto [P, S, R] = layout.unpack(*solved.decision);
  Certificate cert;
  cert.order = blocks.order;
  cert.P = std::move(P);
  cert.S = S;
  cert.R = R;
  cert.margin = margin;
  cert.slack = solved.slack;
  cert.relative_slack = solved.diagnostics.relative_slack;
  cert.iterations = solved.diagnostics.iterations;
  cert.primal_residual = solved.diagnostics.primal_infeasibility;
  cert.dual_residual = solved.diagnostics.dual_infeasibility;
  cert.gap = solved.diagnostics.relative_gap;

  if (solved.status != SolveStatus::kFeasible) return out;
  VerificationReport check = verify_certificate(blocks, cert);
  out.verification = check;
  if (!check.passed) {
    out.diagnostics.message = "certificate failed verification: " + check.failures.front();
    return out;
  }
  out.status = SolveStatus::kFeasible;
  out.certificate = std::move(cert);
  return out;
}

CertifyReport certify(const SystemDescription& sys, int order, double margin,
                      const SolverOptions& options) {
  return certify(build_blocks(sys, order), margin, options);
}

}  // namespace stringlmi
