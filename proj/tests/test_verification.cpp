#include <cmath>

#include "doctest.h"
#include "wf/objective.hpp"
#include "wf/rng.hpp"
#include "wf/verification.hpp"

using namespace wf;

namespace {

Matrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  Matrix g(n, n);
  for (auto& v : g.reshaped()) v = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

}  // namespace

TEST_CASE("line fit and median helpers") {
  const auto fit = fit_line({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("design maxima") {
  const auto r = check_design_maxima(100, 10000, 50, 1);
  CHECK(r.first_entry.trials == 50);
  CHECK(r.first_entry.observed.size() == 50);
  CHECK(r.first_entry.bound == doctest::Approx(5.0 * std::sqrt(std::log(10000.0))));
  CHECK(r.first_entry.violation_rate <= 0.02);
  CHECK(r.row_norm.bound == doctest::Approx(std::sqrt(600.0)));
  CHECK(r.row_norm.violation_rate == 0.0);

  // With one sample the statistic is |N(0,1)|, whose median is 0.6745.
  const auto single = check_design_maxima(2, 1, 10000, 2);
  CHECK(single.first_entry.median() >= 0.55);
  CHECK(single.first_entry.median() <= 0.80);

  const auto again = check_design_maxima(100, 10000, 50, 1);
  CHECK(again.first_entry.observed == r.first_entry.observed);
}

TEST_CASE("violation rate is the fraction above the bound") {
  const auto r = check_design_maxima(10, 50, 40, 3);
  std::size_t above = 0;
  for (double v : r.first_entry.observed) above += v > r.first_entry.bound;
  CHECK(r.first_entry.violation_rate == static_cast<double>(above) / 40.0);
}

TEST_CASE("hessian concentration") {
  const auto r = check_hessian_concentration(50, {2000, 8000, 32000}, 10, 4);
  REQUIRE(r.per_m.size() == 3);
  CHECK(r.slope >= -0.65);
  CHECK(r.slope <= -0.35);
  CHECK(r.per_m[0].median() > r.per_m[2].median());

  SUBCASE("scalar case") {
    RandomStream rng(5, 0);
    Vector one(1);
    one << 1.0;
    double prev = 0.0;
    for (std::size_t m : {100ul, 10000ul, 1000000ul}) {
      RowMatrix rows(static_cast<Eigen::Index>(m), 1);
      double sum4 = 0.0;
      for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        rows(i, 0) = rng.normal();
        sum4 += std::pow(rows(i, 0), 4);
      }
      const double dev = hessian_deviation(rows, one);
      CHECK(dev == doctest::Approx(std::abs(sum4 / m - 3.0)).epsilon(1e-10));
      if (m == 1000000) CHECK(dev < prev);
      prev = dev;
    }
  }

  SUBCASE("sign and rotation invariance") {
    const std::size_t n = 20;
    const auto d = generate_design(n, 3000, DesignKind::Gaussian, Signal::basis(n), 6);
    const Vector x = Signal::random(n, 7).entries();
    const double base = hessian_deviation(d.rows(), x);
    CHECK(hessian_deviation(d.rows(), -x) == doctest::Approx(base).epsilon(1e-12));
    const Matrix q = random_orthogonal(n, 8);
    const RowMatrix rotated = d.rows() * q.transpose();
    CHECK(std::abs(hessian_deviation(rotated, q * x) - base) <= 1e-8);
  }
}

TEST_CASE("local smoothness") {
  const auto r = check_local_smoothness(100, 10000, 50, 9);
  CHECK(r.trials == 50);
  CHECK(r.observed.size() + r.discarded == 50);
  CHECK(r.envelopes.size() == r.observed.size());
  CHECK(r.violation_rate == 0.0);

  SUBCASE("origin") {
    const std::size_t n = 50;
    const auto d = generate_design(n, 100 * n, DesignKind::Gaussian, Signal::basis(n), 10);
    const auto est = hessian_spectral_norm(d, Vector::Zero(n), 1);
    CHECK(est.converged);
    CHECK(est.norm <= 4.0);
    CHECK(est.norm >= 2.0);
  }

  SUBCASE("power iteration agrees with the dense route") {
    const std::size_t n = 50;
    const auto d = generate_design(n, 5000, DesignKind::Gaussian, Signal::basis(n), 11);
    const Vector z = Signal::random(n, 12, 0.8).entries();
    const auto est = hessian_spectral_norm(d, z, 2);
    CHECK(std::abs(est.norm - dense_spectral_norm(hessian(d, z))) <= 1e-6 * est.norm);
  }
}

TEST_CASE("polynomial statistics") {
  SUBCASE("case 3 concentrates") {
    const auto r = check_polynomial_concentration(3, 50, 100000, 50, 13);
    CHECK(r.deviations.median() <= 0.05);
  }
  SUBCASE("case 4 sample constant") {
    const auto r = check_polynomial_concentration(4, 50, 100000, 50, 14);
    const double med = median(r.normalized_means);
    CHECK(med >= 13.0);
    CHECK(med <= 17.0);
  }
  SUBCASE("expectation constants") {
    const auto d = generate_design(4, 200000, DesignKind::Gaussian, Signal::basis(4), 15);
    Vector z(3);
    z << 0.6, -0.8, 0.0;  // unit norm
    const double expected[] = {0.0, 0.0, 1.0, 15.0, 15.0, 3.0};
    const double tol[] = {0.05, 0.05, 0.05, 1.5, 1.5, 0.2};
    for (int c = 1; c <= 6; ++c) {
      const auto s = polynomial_statistic(d.rows(), c, z);
      CHECK(s.constant == expected[c - 1]);
      CHECK(std::abs(s.mean - expected[c - 1]) <= tol[c - 1]);
    }
  }
  SUBCASE("zero direction") {
    const auto d = generate_design(5, 100, DesignKind::Gaussian, Signal::basis(5), 16);
    for (int c = 1; c <= 6; ++c) {
      const auto s = polynomial_statistic(d.rows(), c, Vector::Zero(4));
      CHECK(s.deviation == 0.0);
      CHECK_FALSE(s.normalized_deviation.has_value());
    }
  }
  SUBCASE("rotation of the orthogonal block") {
    const std::size_t n = 12;
    const auto d = generate_design(n, 5000, DesignKind::Gaussian, Signal::basis(n), 17);
    const Vector z = Signal::random(n - 1, 18).entries();
    const Matrix q = random_orthogonal(n - 1, 19);
    RowMatrix rotated = d.rows();
    rotated.rightCols(n - 1) = d.rows().rightCols(n - 1) * q.transpose();
    for (int c = 1; c <= 6; ++c) {
      const double a = polynomial_statistic(d.rows(), c, z).deviation;
      const double b = polynomial_statistic(rotated, c, q * z).deviation;
      CHECK(std::abs(a - b) <= 1e-8);
    }
  }
  SUBCASE("errors") {
    const auto d = generate_design(5, 10, DesignKind::Gaussian, Signal::basis(5), 1);
    CHECK_THROWS_AS(polynomial_statistic(d.rows(), 7, Vector::Zero(4)), std::invalid_argument);
    CHECK_THROWS_AS(polynomial_statistic(d.rows(), 1, Vector::Zero(5)), std::invalid_argument);
    CHECK_THROWS_AS(check_polynomial_concentration(0, 5, 10, 1, 1), std::invalid_argument);
  }
  SUBCASE("determinism") {
    const auto a = check_polynomial_concentration(6, 10, 1000, 5, 3);
    const auto b = check_polynomial_concentration(6, 10, 1000, 5, 3);
    CHECK(a.deviations.observed == b.deviations.observed);
  }
}
