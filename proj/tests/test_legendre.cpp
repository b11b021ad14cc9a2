#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "stringlmi/error.hpp"
#include "stringlmi/legendre.hpp"

namespace lg = stringlmi::legendre;

namespace {

// Defining alternating sum, exact in rational arithmetic for small k. Used
// only as an independent oracle for the recurrence.
double shifted_legendre_sum(int k, double x) {
  double sum = 0.0;
  double binom_k_l = 1.0;   // C(k, l)
  double binom_kl_l = 1.0;  // C(k+l, l)
  for (int l = 0; l <= k; ++l) {
    if (l > 0) {
      binom_k_l = binom_k_l * (k - l + 1) / l;
      binom_kl_l = binom_kl_l * (k + l) / l;
    }
    sum += ((l % 2) ? -1.0 : 1.0) * binom_k_l * binom_kl_l * std::pow(x, l);
  }
  return (k % 2 ? -1.0 : 1.0) * sum;
}

lg::SampledField sample(const lg::QuadratureRule& rule, double (*f0)(double), double (*f1)(double)) {
  lg::SampledField f{rule, {}};
  for (double x : rule.nodes) {
    f.components[0].push_back(f0(x));
    f.components[1].push_back(f1(x));
  }
  return f;
}

}  // namespace

TEST_CASE("legendre_eval examples") {
  CHECK(lg::eval(0, 0.7) == 1.0);
  CHECK(lg::eval(1, 0.0) == -1.0);
  CHECK(lg::eval(1, 1.0) == 1.0);
  CHECK(lg::eval(2, 0.5) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("legendre_eval rejects x outside [0,1]") {
  CHECK_THROWS_AS(lg::eval(2, -0.01), stringlmi::DomainError);
  CHECK_THROWS_AS(lg::eval(2, 1.5), stringlmi::DomainError);
  CHECK_THROWS_AS(lg::eval(2, std::nan("")), stringlmi::DomainError);
  CHECK_THROWS_AS(lg::eval_all(3, 2.0), stringlmi::DomainError);
  try {
    lg::eval(1, 3.0);
  } catch (const stringlmi::Error& e) {
    CHECK(e.code() == "legendre.domain");
  }
}

TEST_CASE("boundary values") {
  for (int k = 0; k <= lg::kMaxOrder; ++k) {
    CHECK(lg::eval(k, 0.0) == doctest::Approx(k % 2 ? -1.0 : 1.0).epsilon(1e-14));
    CHECK(lg::eval(k, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("recurrence agrees with the defining sum") {
  for (int k = 0; k <= 6; ++k) {
    for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      CHECK(lg::eval(k, x) == doctest::Approx(shifted_legendre_sum(k, x)).epsilon(1e-11));
    }
  }
}

TEST_CASE("ell_coefficient examples") {
  CHECK(lg::ell_coefficient(0, 0) == 0.0);
  CHECK(lg::ell_coefficient(1, 0) == 2.0);
  CHECK(lg::ell_coefficient(2, 1) == 6.0);
  CHECK(lg::ell_coefficient(0, 1) == 0.0);
  // formula evaluated directly
  for (int k = 0; k <= 8; ++k) {
    for (int j = 0; j <= 8; ++j) {
      const double expect = j <= k ? (2.0 * j + 1.0) * (1.0 - std::pow(-1.0, j + k)) : 0.0;
      CHECK(lg::ell_coefficient(k, j) == expect);
    }
  }
}

TEST_CASE("block matrices") {
  SUBCASE("N=0") {
    auto m = lg::build_block_matrices(0);
    CHECK(m.lower.isZero(0.0));
    CHECK(m.ones.isIdentity(0.0));
    CHECK(m.alternating.isIdentity(0.0));
  }
  SUBCASE("N=1") {
    auto m = lg::build_block_matrices(1);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(4, 4);
    expect.block<2, 2>(2, 0) = 2.0 * Eigen::Matrix2d::Identity();
    CHECK(m.lower.isApprox(expect));
    CHECK(m.alternating.block<2, 2>(2, 0).isApprox(-Eigen::Matrix2d::Identity()));
  }
  SUBCASE("N=2 third block row") {
    auto m = lg::build_block_matrices(2);
    CHECK(m.lower.block<2, 2>(4, 0).isZero(0.0));
    CHECK(m.lower.block<2, 2>(4, 2).isApprox(6.0 * Eigen::Matrix2d::Identity()));
    CHECK(m.lower.block<2, 2>(4, 4).isZero(0.0));
    CHECK(m.ones.rows() == 6);
  }
  CHECK_THROWS_AS(lg::build_block_matrices(lg::kMaxOrder + 1), stringlmi::ConfigError);
}

TEST_CASE("orthogonality under Gauss quadrature") {
  const auto rule = lg::QuadratureRule::gauss(12);
  for (int j = 0; j <= 5; ++j) {
    for (int k = 0; k <= 5; ++k) {
      std::vector<double> v;
      for (double x : rule.nodes) v.push_back(lg::eval(j, x) * lg::eval(k, x));
      const double q = rule.integrate(v);
      if (j == k) {
        CHECK(std::abs(q - 1.0 / (2 * k + 1)) < 1e-12);
      } else {
        CHECK(std::abs(q) < 1e-12);
      }
    }
  }
}

TEST_CASE("differentiation rule at quadrature nodes") {
  const auto rule = lg::QuadratureRule::gauss(12, 2);
  for (int k = 0; k <= 5; ++k) {
    for (double x : rule.nodes) {
      double rhs = 0.0;
      for (int j = 0; j <= k; ++j) rhs += lg::ell_coefficient(k, j) * lg::eval(j, x);
      CHECK(std::abs(lg::derivative(k, x) - rhs) < 1e-10);
    }
  }
  // and against a central difference of the polynomial itself
  for (int k = 1; k <= 6; ++k) {
    const double x = 0.37, h = 1e-5;
    const double fd = (lg::eval(k, x + h) - lg::eval(k, x - h)) / (2 * h);
    CHECK(lg::derivative(k, x) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("gauss rule integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 8}) {
    const auto rule = lg::QuadratureRule::gauss(n, 3);
    std::vector<double> v;
    for (double x : rule.nodes) v.push_back(std::pow(x, 2 * n - 1));
    CHECK(rule.integrate(v) == doctest::Approx(1.0 / (2 * n)).epsilon(1e-13));
  }
}

TEST_CASE("project examples") {
  const auto rule = lg::QuadratureRule::gauss(6);
  SUBCASE("constant field") {
    auto f = sample(rule, [](double) { return 3.0; }, [](double) { return -1.0; });
    auto p = lg::project(f, 2);
    REQUIRE(p.order() == 2);
    CHECK(p.entries[0].isApprox(Eigen::Vector2d(3.0, -1.0), 1e-14));
    CHECK(p.entries[1].norm() < 1e-14);
    CHECK(p.entries[2].norm() < 1e-14);
  }
  SUBCASE("linear field") {
    auto f = sample(rule, [](double x) { return 2.0 * x - 1.0; }, [](double) { return 0.0; });
    auto p = lg::project(f, 1);
    CHECK(p.entries[0].norm() < 1e-14);
    CHECK(std::abs(p.entries[1][0] - 1.0 / 3.0) < 1e-14);
    CHECK(p.entries[1][1] == 0.0);
  }
  SUBCASE("L2 is orthogonal to L0, L1") {
    auto f = sample(rule, [](double x) { return 6 * x * x - 6 * x + 1; }, [](double) { return 0.0; });
    auto p = lg::project(f, 1);
    CHECK(p.entries[0].norm() < 1e-14);
    CHECK(p.entries[1].norm() < 1e-14);
  }
}

TEST_CASE("trapezoid projection converges at second order") {
  auto err = [](int m) {
    const auto rule = lg::QuadratureRule::trapezoid(m);
    auto f = sample(rule, [](double x) { return std::sin(3 * x); }, [](double x) { return x * x; });
    auto p = lg::project(f, 1);
    // reference from a fine Gauss rule
    const auto fine = lg::QuadratureRule::gauss(20, 4);
    auto g = sample(fine, [](double x) { return std::sin(3 * x); }, [](double x) { return x * x; });
    auto q = lg::project(g, 1);
    return (p.stacked() - q.stacked()).norm();
  };
  const double e1 = err(50), e2 = err(100);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("projection rejects mismatched grids") {
  lg::LegendreBasis basis(2, lg::QuadratureRule::gauss(6));
  auto f = sample(lg::QuadratureRule::gauss(8), [](double) { return 1.0; }, [](double) { return 1.0; });
  CHECK_THROWS_AS(basis.project(f), stringlmi::ConfigError);
  auto t = sample(lg::QuadratureRule::trapezoid(5), [](double) { return 1.0; }, [](double) { return 1.0; });
  CHECK_THROWS_AS(basis.project(t), stringlmi::ConfigError);
  // a Gauss rule too coarse for the order
  CHECK_THROWS_AS(lg::LegendreBasis(3, lg::QuadratureRule::gauss(7)), stringlmi::ConfigError);
  CHECK_NOTHROW(lg::LegendreBasis(3, lg::QuadratureRule::gauss(8)));
  CHECK_THROWS_AS(lg::LegendreBasis(lg::kMaxOrder + 1, lg::QuadratureRule::trapezoid(100)),
                  stringlmi::ConfigError);
}

TEST_CASE("bessel_bound examples") {
  const auto rule = lg::QuadratureRule::gauss(8);
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  {
    auto f = sample(rule, [](double) { return 1.0; }, [](double) { return 0.0; });
    CHECK(lg::bessel_bound(lg::project(f, 0), I) == doctest::Approx(1.0));
    CHECK(lg::integrate_quadratic(f, I) == doctest::Approx(1.0));
  }
  {
    auto f = sample(rule, [](double x) { return 2 * x - 1; }, [](double) { return 0.0; });
    CHECK(std::abs(lg::bessel_bound(lg::project(f, 0), I)) < 1e-14);
    CHECK(lg::integrate_quadratic(f, I) == doctest::Approx(1.0 / 3.0));
    CHECK(lg::bessel_bound(lg::project(f, 1), I) == doctest::Approx(1.0 / 3.0));
  }
  Eigen::Matrix2d bad;
  bad << 1, 0.5, 0.2, 1;
  auto f = sample(rule, [](double) { return 1.0; }, [](double) { return 0.0; });
  CHECK_THROWS_AS(lg::bessel_bound(lg::project(f, 0), bad), stringlmi::DomainError);
}

TEST_CASE("bessel bound is monotone in N and below the integral") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const auto rule = lg::QuadratureRule::gauss(24, 2);
  for (int trial = 0; trial < 100; ++trial) {
    // random smooth chi: low-order trig sums
    double a[2][4];
    for (auto& row : a) for (double& v : row) v = nd(rng);
    lg::SampledField f{rule, {}};
    for (double x : rule.nodes) {
      for (int c = 0; c < 2; ++c) {
        f.components[c].push_back(a[c][0] + a[c][1] * std::cos(3 * x) + a[c][2] * std::sin(7 * x) +
                                  a[c][3] * x * x * x);
      }
    }
    Eigen::Matrix2d m;
    m << nd(rng), nd(rng), nd(rng), nd(rng);
    const Eigen::Matrix2d R = m * m.transpose();
    const double integral = lg::integrate_quadratic(f, R);
    double prev = -1.0;
    for (int n = 0; n <= lg::kMaxOrder; ++n) {
      const double b = lg::bessel_bound(lg::project(f, n), R);
      CHECK(b >= prev - 1e-12 * (1 + integral));
      CHECK(b <= integral + 1e-10 * (1 + integral));
      prev = b;
    }
  }
}

TEST_CASE("integrate_quadratic with position-dependent weight") {
  const auto rule = lg::QuadratureRule::gauss(6);
  auto f = sample(rule, [](double) { return 1.0; }, [](double) { return 2.0; });
  Eigen::Matrix2d S = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d R;
  R << 2, 0, 0, 0;
  // int (1 + 4) + x*2 dx = 5 + 1
  CHECK(lg::integrate_quadratic(f, S, R) == doctest::Approx(6.0));
}
