#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "wf/objective.hpp"
#include "wf/rng.hpp"
#include "wf/verification.hpp"

using namespace wf;

namespace {

DesignEnsemble single_row() {
  RowMatrix r(1, 2);
  r << 1.0, 0.0;
  Vector y(1);
  y << 1.0;
  return DesignEnsemble(r, DesignKind::Gaussian, y, 0, 0);
}

Vector point(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

Vector random_vector(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  RandomStream rng(seed, 99);
  Vector x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = scale * rng.normal();
  return x;
}

}  // namespace

TEST_CASE("loss, gradient and hessian on a single sample") {
  const auto d = single_row();
  const Vector x = point(2.0, 0.0);
  CHECK(loss(d, x) == doctest::Approx(2.25));
  CHECK(evaluate(d, x).loss == doctest::Approx(2.25));
  const Vector g = gradient(d, x);
  CHECK(g[0] == doctest::Approx(6.0));
  CHECK(g[1] == 0.0);
  const Matrix h = hessian(d, x);
  CHECK(h(0, 0) == doctest::Approx(11.0));
  CHECK(h(0, 1) == 0.0);
  CHECK(h(1, 0) == 0.0);
  CHECK(h(1, 1) == 0.0);
}

TEST_CASE("the truth is a global minimizer") {
  const Signal s = Signal::random(20, 3);
  const auto d = generate_design(20, 300, DesignKind::Gaussian, s, 1);
  CHECK(loss(d, s.entries()) < 1e-25);
  CHECK(loss(d, -s.entries()) < 1e-25);
  CHECK(gradient(d, s.entries()).norm() < 1e-12);
}

TEST_CASE("gradient and hessian agree with finite differences") {
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + trial % 6;
    const Signal s = Signal::random(n, 50 + trial);
    const auto d = generate_design(n, 40 + 5 * trial, DesignKind::Gaussian, s, trial);
    const Vector x = random_vector(n, 700 + trial, 0.7);

    const Vector fd = oracle::central_difference([&](const Vector& v) { return oracle::loss(d, v); },
                                                 x, 1e-5);
    CHECK(oracle::relative_error(gradient(d, x), fd) <= 1e-6);

    const Matrix h = hessian(d, x);
    const Matrix jd =
        oracle::jacobian_difference([&](const Vector& v) { return gradient(d, v); }, x, 1e-5);
    CHECK((h - jd).norm() <= 1e-5 * h.norm());
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * h.cwiseAbs().maxCoeff());

    const HessianOperator op(d, x);
    const Vector v = random_vector(n, 900 + trial);
    CHECK(oracle::relative_error(op.apply(v), h * v) <= 1e-12);
  }
}

TEST_CASE("sign symmetry of the loss") {
  const auto d = generate_design(10, 200, DesignKind::Gaussian, Signal::basis(10), 4);
  const Vector x = random_vector(10, 5);
  CHECK(loss(d, x) == loss(d, -x));
  CHECK(gradient(d, -x) == -gradient(d, x));
  CHECK(hessian(d, -x) == hessian(d, x));
}

TEST_CASE("dimension mismatches are rejected") {
  const auto d = generate_design(4, 10, DesignKind::Gaussian, Signal::basis(4), 4);
  const Vector bad = Vector::Ones(3);
  CHECK_THROWS_AS(loss(d, bad), std::invalid_argument);
  CHECK_THROWS_AS(gradient(d, bad), std::invalid_argument);
  CHECK_THROWS_AS(hessian(d, bad), std::invalid_argument);
}

TEST_CASE("hessian at the truth approaches 2I + 4 e1 e1^T") {
  const std::size_t n = 50;
  const auto d = generate_design(n, 50000, DesignKind::Gaussian, Signal::basis(n), 8);
  Matrix expected = 2.0 * Matrix::Identity(n, n);
  expected(0, 0) += 4.0;
  CHECK(dense_spectral_norm(hessian(d, Signal::basis(n).entries()) - expected) <= 0.5);
}

TEST_CASE("population gradient fixed points") {
  const std::size_t n = 6;
  const Signal e1 = Signal::basis(n);
  CHECK(population_gradient(e1.entries(), e1).norm() == 0.0);
  CHECK(population_gradient(-e1.entries(), e1).norm() == 0.0);
  CHECK(population_gradient(Vector::Zero(n), e1).norm() == 0.0);
  Vector saddle = Vector::Zero(n);
  saddle[1] = 1.0 / std::sqrt(3.0);
  CHECK(population_gradient(saddle, e1).norm() <= 1e-15);
  Vector rotated_saddle = Vector::Zero(n);
  rotated_saddle.tail(n - 1).setConstant(1.0 / std::sqrt(3.0 * (n - 1)));
  CHECK(population_gradient(rotated_saddle, e1).norm() <= 1e-15);
}

TEST_CASE("population gradient is the gradient of the population loss") {
  const Signal s = Signal::random(7, 2, 1.3);
  const Vector x = random_vector(7, 77);
  const Vector fd = oracle::central_difference(
      [&](const Vector& v) { return population_loss(v, s); }, x, 1e-5);
  CHECK(oracle::relative_error(population_gradient(x, s), fd) <= 1e-8);
  CHECK(population_loss(s.entries(), s) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("averaged gradients converge to the population gradient at rate K^-1/2") {
  const std::size_t n = 5, m = 50;
  const Signal e1 = Signal::basis(n);
  Vector x = Vector::Zero(n);
  x[0] = 0.4;
  x[1] = 0.6;
  const Vector target = population_gradient(x, e1);
  const std::vector<std::size_t> ks{4, 16, 64, 256};
  std::vector<double> log_k, log_err;
  std::uint64_t stream = 10;
  for (std::size_t k : ks) {
    double err = 0.0;
    const int reps = 30;
    for (int r = 0; r < reps; ++r) {
      Vector avg = Vector::Zero(n);
      for (std::size_t j = 0; j < k; ++j) {
        avg += gradient(generate_design(n, m, DesignKind::Gaussian, e1, 3, stream++), x);
      }
      err += (avg / static_cast<double>(k) - target).norm();
    }
    log_k.push_back(std::log(static_cast<double>(k)));
    log_err.push_back(std::log(err / reps));
  }
  const double rate = -fit_line(log_k, log_err).slope;
  CHECK(rate >= 0.35);
  CHECK(rate <= 0.65);
}

TEST_CASE("residual terms reproduce the signal coordinate of the fluctuation") {
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 5 + trial;
    const Signal e1 = Signal::basis(n);
    const auto d = generate_design(n, 100 + 20 * trial, DesignKind::Gaussian, e1, trial);
    const Vector x = random_vector(n, 300 + trial, 0.5);
    const auto r = fluctuation(d, x, e1);
    REQUIRE(r.has_terms);
    CHECK(std::abs(r.r1 - (r.i1 + r.i2 - r.i3 - r.i4)) <= 1e-9 * std::max(1.0, std::abs(r.r1)));
    CHECK(std::abs(r.fluctuation_norm - r.fluctuation.norm()) <= 1e-12 * r.fluctuation_norm);

    // One gradient step on the signal coordinate.
    const double eta = 0.1;
    const Vector next = x - eta * gradient(d, x);
    const double predicted = (1.0 + 3.0 * eta * (1.0 - x.squaredNorm())) * x[0] - eta * r.r1;
    CHECK(std::abs(next[0] - predicted) <= 1e-9);
  }
}

TEST_CASE("residual terms need the e1 convention") {
  const Signal s = Signal::random(6, 1);
  const auto d = generate_design(6, 60, DesignKind::Gaussian, s, 1);
  const Vector x = random_vector(6, 2);
  CHECK_THROWS_AS(fluctuation(d, x, s), UnsupportedConvention);
  const auto r = fluctuation(d, x, s, ResidualTerms::Skip);
  CHECK_FALSE(r.has_terms);
  CHECK(oracle::relative_error(r.fluctuation, gradient(d, x) - population_gradient(x, s)) <= 1e-15);
}

TEST_CASE("signal-coordinate fluctuation shrinks like m^-1/2") {
  const std::size_t n = 50;
  const Signal e1 = Signal::basis(n);
  Vector x = random_vector(n, 4242);
  x *= 0.8 / x.norm();
  auto median_r1 = [&](std::size_t m, std::uint64_t stream0) {
    std::vector<double> values;
    for (std::uint64_t k = 0; k < 50; ++k) {
      const auto d = generate_design(n, m, DesignKind::Gaussian, e1, 17, stream0 + k);
      values.push_back(std::abs(fluctuation(d, x, e1).r1));
    }
    return median(values);
  };
  const double ratio = median_r1(2000, 1000) / median_r1(32000, 2000);
  CHECK(ratio >= 2.8);
  CHECK(ratio <= 5.7);
}

TEST_CASE("leave-one-out evaluation never reads the skipped row") {
  const auto d = generate_design(6, 30, DesignKind::Gaussian, Signal::basis(6), 2);
  RowMatrix rows = d.rows();
  rows.row(7).setConstant(std::numeric_limits<double>::quiet_NaN());
  const DesignEnsemble poisoned(rows, d.kind(), d.measurements(), 0, 0);
  const Vector x = random_vector(6, 3);
  const auto clean = evaluate(d, x, 7);
  const auto dirty = evaluate(poisoned, x, 7);
  CHECK(dirty.gradient == clean.gradient);
  CHECK(dirty.loss == clean.loss);
  CHECK_THROWS_AS(evaluate(d, x, 30), std::out_of_range);
}
