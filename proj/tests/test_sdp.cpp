#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "stringlmi/error.hpp"
#include "stringlmi/lmi.hpp"
#include "stringlmi/sdp.hpp"
#include "stringlmi/system.hpp"

using namespace stringlmi;

namespace {

AffineConstraint scalar(const std::string& name, double constant, double coef) {
  return {name, Eigen::MatrixXd::Constant(1, 1, constant), {Eigen::MatrixXd::Constant(1, 1, coef)}};
}

// x >= eps and 1 - x >= eps
AffineLmiSystem interval_toy() {
  AffineLmiSystem s;
  s.num_variables = 1;
  s.constraints = {scalar("lower", 0.0, 1.0), scalar("upper", 1.0, -1.0)};
  return s;
}

// x - 1 >= eps and -x - 1 >= eps
AffineLmiSystem empty_toy() {
  AffineLmiSystem s;
  s.num_variables = 1;
  s.constraints = {scalar("a", -1.0, 1.0), scalar("b", -1.0, -1.0)};
  return s;
}

AffineLmiSystem scaled(AffineLmiSystem s, double factor) {
  for (auto& c : s.constraints) {
    c.constant *= factor;
    for (auto& m : c.coefficients) m *= factor;
  }
  return s;
}

double min_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scalar toy: interval is feasible with slack 1/2") {
  auto r = solve_feasibility(interval_toy());
  REQUIRE(r.status == SolveStatus::kFeasible);
  REQUIRE(r.decision);
  CHECK((*r.decision)(0) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(r.slack == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(r.diagnostics.converged);
}

TEST_CASE("scalar toy: empty intersection is not certified") {
  auto r = solve_feasibility(empty_toy());
  CHECK(r.status == SolveStatus::kNotCertified);
  CHECK(r.slack < 0.0);
  CHECK(r.slack == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("scale robustness") {
  for (double f : {1e-3, 0.25, 7.3, 1e3}) {
    auto a = solve_feasibility(scaled(interval_toy(), f));
    CHECK(a.status == SolveStatus::kFeasible);
    CHECK(a.slack == doctest::Approx(0.5 * f).epsilon(1e-6));
    CHECK(solve_feasibility(scaled(empty_toy(), f)).status == SolveStatus::kNotCertified);
  }
  auto sys = build_affine_system(build_blocks(presets::unstable_open_loop(), 1));
  for (double f : {1e-2, 3.0, 1e2}) {
    CAPTURE(f);
    auto r = solve_feasibility(scaled(sys, f));
    CHECK(r.status == SolveStatus::kFeasible);
  }
  auto bad = build_affine_system(build_blocks(presets::unstable_open_loop(6.0, 0.15), 1));
  for (double f : {1e-2, 3.0, 1e2}) {
    CHECK(solve_feasibility(scaled(bad, f)).status == SolveStatus::kNotCertified);
  }
}

TEST_CASE("feasible reports always pass an independent eigenvalue check") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  int feasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    AffineLmiSystem s;
    s.num_variables = 3;
    for (int b = 0; b < 2; ++b) {
      const int n = 2 + b;
      AffineConstraint c{"b" + std::to_string(b), Eigen::MatrixXd::Zero(n, n), {}};
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
      c.constant = m + m.transpose();
      for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
        c.coefficients.push_back(m + m.transpose());
      }
      s.constraints.push_back(c);
    }
    auto r = solve_feasibility(s);
    if (r.status == SolveStatus::kFeasible) {
      ++feasible;
      for (const auto& v : s.evaluate(*r.decision)) CHECK(min_eig(v) >= s.margin);
    }
  }
  CHECK(feasible > 0);
}

TEST_CASE("determinism") {
  auto blocks = build_blocks(presets::unstable_closed_loop(), 2);
  auto a = certify(blocks);
  auto b = certify(blocks);
  REQUIRE(a.certificate);
  REQUIRE(b.certificate);
  CHECK(a.certificate->P == b.certificate->P);
  CHECK(a.certificate->S == b.certificate->S);
  CHECK(a.certificate->R == b.certificate->R);
  CHECK(a.diagnostics.iterations == b.diagnostics.iterations);
}

TEST_CASE("system (24) is never certified at N = 0") {
  auto base = presets::unstable_closed_loop();
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double c = 1.0 + 19.0 * i / 9.0;
      const double c0 = 0.1 + 1.9 * j / 9.0;
      CAPTURE(c);
      CAPTURE(c0);
      CHECK(certify(base.with_wave(c, c0), 0).status == SolveStatus::kNotCertified);
    }
  }
}

TEST_CASE("verified certificates satisfy the block necessary condition") {
  for (const auto& s : {presets::unstable_closed_loop(), presets::unstable_open_loop(),
                        presets::hurwitz_pair(2.0, 1.0)}) {
    auto blocks = build_blocks(s, 1);
    auto r = certify(blocks);
    REQUIRE(r.status == SolveStatus::kFeasible);
    REQUIRE(r.verification);
    CHECK(r.verification->passed);
    const auto& cert = *r.certificate;
    CHECK(cert.slack >= cert.margin);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(boundary_block(blocks, cert.S, cert.R));
    CHECK(es.eigenvalues()(1) < 0.0);
    // constraints evaluated at the certificate clear the margin
    auto sys = build_affine_system(blocks, cert.margin);
    const DecisionLayout layout{blocks.p_size()};
    for (const auto& v : sys.evaluate(layout.pack(cert.P, cert.S, cert.R))) {
      CHECK(min_eig(v) >= cert.margin - 1e-9);
    }
  }
}

// Independent witness search for a decoupled scalar ODE: diagonal P, S, R on a
// log grid, checked only through assemble_psi and eigenvalues.
TEST_CASE("grid-searched witnesses are confirmed by the solver") {
  SystemDescription s;
  s.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
  s.B = Eigen::MatrixXd::Zero(1, 1);
  s.K = Eigen::MatrixXd::Zero(1, 1);
  int witnesses = 0;
  for (double c : {0.5, 1.0, 2.0}) {
    for (double c0 : {0.3, 1.0, 3.0}) {
      auto blocks = build_blocks(s.with_wave(c, c0), 0);
      bool found = false;
      const double grid[] = {1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0, 10.0};
      for (double px : grid) {
        for (double pa : grid) {
          for (double pb : grid) {
            for (double s1 : grid) {
              for (double s2 : grid) {
                for (double r : grid) {
                  Eigen::MatrixXd P = Eigen::Vector3d(px, pa, pb).asDiagonal();
                  Eigen::Matrix2d S = Eigen::Vector2d(s1, s2).asDiagonal();
                  Eigen::Matrix2d R = r * Eigen::Matrix2d::Identity();
                  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_psi(blocks, P, S, R));
                  if (es.eigenvalues().maxCoeff() < 0.0) found = true;
                  if (found) break;
                }
                if (found) break;
              }
              if (found) break;
            }
            if (found) break;
          }
          if (found) break;
        }
        if (found) break;
      }
      CAPTURE(c);
      CAPTURE(c0);
      if (found) {
        ++witnesses;
        CHECK(certify(blocks).status == SolveStatus::kFeasible);
      }
    }
  }
  CHECK(witnesses >= 3);
}

TEST_CASE("solver agrees with an external conic solver away from the boundary") {
  // Reference statuses from an independent conic solver (see tools/).
  struct Case {
    SystemDescription sys;
    int order;
    bool feasible;
  };
  const Case cases[] = {
      {presets::unstable_open_loop(7.5, 0.15), 0, true},
      {presets::unstable_open_loop(6.5, 0.15), 0, false},
      {presets::unstable_open_loop(7.2, 0.15), 1, true},
      {presets::unstable_open_loop(6.5, 0.15), 1, false},
      {presets::hurwitz_pair(1.6, 0.5), 0, true},
      {presets::hurwitz_pair(1.3, 0.5), 0, false},
      {presets::hurwitz_pair(1.3, 0.5), 2, false},
      {presets::hurwitz_pair(1.1, 1.0), 0, true},
  };
  for (const auto& cs : cases) {
    CAPTURE(cs.sys.c);
    CAPTURE(cs.order);
    CHECK((certify(cs.sys, cs.order).status == SolveStatus::kFeasible) == cs.feasible);
  }
}

TEST_CASE("verify_certificate failures") {
  auto blocks = build_blocks(presets::unstable_closed_loop(), 1);
  auto r = certify(blocks);
  REQUIRE(r.certificate);
  SUBCASE("S = 0") {
    Certificate c = *r.certificate;
    c.S.setZero();
    auto v = verify_certificate(blocks, c);
    CHECK_FALSE(v.passed);
    REQUIRE_FALSE(v.failures.empty());
    CHECK(std::find(v.failures.begin(), v.failures.end(), "S not positive definite") !=
          v.failures.end());
  }
  SUBCASE("dimension mismatch") {
    Certificate c = *r.certificate;
    c.P = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(verify_certificate(blocks, c), DomainError);
  }
}

TEST_CASE("perturbing a marginal certificate breaks it") {
  // Rescaled certificates sit on the margin; shifting P by -2 eps must fail.
  for (double c : {6.9, 10.0}) {
    auto blocks = build_blocks(presets::unstable_open_loop(c, 0.15), 1);
    auto r = certify(blocks);
    REQUIRE(r.certificate);
    Certificate pert = *r.certificate;
    pert.P -= 2.0 * pert.margin * Eigen::MatrixXd::Identity(pert.P.rows(), pert.P.cols());
    CHECK_FALSE(verify_certificate(blocks, pert).passed);
  }
}

TEST_CASE("solver option validation") {
  SolverOptions o;
  o.max_iterations = 0;
  CHECK_THROWS_AS(solve_feasibility(interval_toy(), o), ConfigError);
  AffineLmiSystem bad = interval_toy();
  bad.constraints[0].constant = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(solve_feasibility(bad), DomainError);
}

TEST_CASE("iteration cap is reported") {
  SolverOptions o;
  o.max_iterations = 2;
  auto r = solve_feasibility(interval_toy(), o);
  CHECK(r.diagnostics.iteration_cap);
  if (r.status == SolveStatus::kFeasible) {
    for (const auto& v : interval_toy().evaluate(*r.decision)) CHECK(min_eig(v) >= 1e-6);
  }
}

TEST_CASE("SDPA export: golden file for the scalar toy") {
  const std::string text = export_sdpa(interval_toy());
  CHECK(text == read_file(STRINGLMI_TEST_DATA "/scalar_toy.dat-s"));
}

TEST_CASE("SDPA export: empty constraint list is header only") {
  AffineLmiSystem s;
  s.num_variables = 2;
  const std::string text = export_sdpa(s);
  auto p = parse_sdpa(text);
  CHECK(p.num_variables == 3);
  CHECK(p.block_sizes.empty());
  std::istringstream in(text);
  std::string line;
  int data_lines = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '*') ++data_lines;
  }
  CHECK(data_lines == 3);  // mDIM, nBLOCK, objective; the structure line is empty
}

TEST_CASE("SDPA round trip through the parser") {
  auto blocks = build_blocks(presets::unstable_open_loop(), 1);
  auto sys = build_affine_system(blocks);
  const std::string text = export_sdpa(sys);
  auto parsed = parse_sdpa(text);
  CHECK(parsed.num_variables == sys.num_variables + 1);
  REQUIRE(parsed.block_sizes.size() == 5);
  CHECK(parsed.block_sizes[0] == blocks.p_size());
  CHECK(parsed.block_sizes[3] == blocks.xi_size());
  CHECK(parsed.block_sizes[4] == -1);
  auto back = affine_system_from_sdpa(parsed, sys.margin);
  REQUIRE(back.constraints.size() == 4);
  REQUIRE(back.normalization);
  CHECK(*back.normalization == *sys.normalization);
  for (std::size_t b = 0; b < 4; ++b) {
    for (int k = 0; k < sys.num_variables; ++k) {
      CHECK(back.constraints[b].coefficients[k] == sys.constraints[b].coefficients[k]);
    }
  }
  CHECK(solve_feasibility(back).status == SolveStatus::kFeasible);
  CHECK_THROWS_AS(parse_sdpa("3\n"), ConfigError);
  CHECK_THROWS_AS(parse_sdpa("2\n1\n2\n0 -1\n1 1 3 1 1.0\n"), ConfigError);
}

TEST_CASE("SDPA interop fixture") {
  // Exported file and the status an external solver gave it.
  auto sys = build_affine_system(build_blocks(presets::unstable_open_loop(10.0, 0.15), 1));
  auto fixture = parse_sdpa(read_file(STRINGLMI_TEST_DATA "/system23_c10_N1.dat-s"));
  auto now = parse_sdpa(export_sdpa(sys));
  REQUIRE(fixture.num_variables == now.num_variables);
  REQUIRE(fixture.block_sizes == now.block_sizes);
  for (std::size_t i = 0; i < now.matrices.size(); ++i) {
    for (std::size_t b = 0; b < now.matrices[i].size(); ++b) {
      CHECK((fixture.matrices[i][b] - now.matrices[i][b]).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  const std::string external = read_file(STRINGLMI_TEST_DATA "/system23_c10_N1.external.json");
  const bool external_feasible = external.find("\"status\": \"feasible\"") != std::string::npos;
  CHECK(external_feasible);
  CHECK((solve_feasibility(sys).status == SolveStatus::kFeasible) == external_feasible);
}
