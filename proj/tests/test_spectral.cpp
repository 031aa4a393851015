#include <cmath>

#include "doctest.h"
#include "wf/objective.hpp"
#include "wf/rng.hpp"
#include "wf/spectral.hpp"

using namespace wf;

namespace {

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  Matrix a(n, n);
  for (auto& v : a.reshaped()) v = rng.normal();
  return (a + a.transpose()) / 2.0;
}

}  // namespace

TEST_CASE("power iteration matches the dense spectral norm") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix a = random_symmetric(50, seed);
    const auto est = power_iteration([&](const Vector& v) { return Vector(a * v); }, 50, seed, 1e-12,
                                     20000);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const double ref = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(est.converged);
    CHECK(std::abs(est.norm - ref) <= 1e-6 * ref);
    CHECK(std::abs(dense_spectral_norm(a) - ref) <= 1e-12 * ref);
  }
}

TEST_CASE("power iteration on the empirical hessian") {
  const std::size_t n = 50;
  const Signal e1 = Signal::basis(n);
  const auto d = generate_design(n, 2000, DesignKind::Gaussian, e1, 3);
  RandomStream rng(4, 0);
  Vector x(n);
  for (auto& v : x) v = 0.2 * rng.normal();
  const HessianOperator op(d, x);
  const auto est = power_iteration([&](const Vector& v) { return op.apply(v); }, n, 1);
  CHECK(est.converged);
  CHECK(std::abs(est.norm - dense_spectral_norm(hessian(d, x))) <= 1e-6 * est.norm);
}

TEST_CASE("extreme eigenvalues of a diagonal operator") {
  Vector diag(6);
  diag << -3.0, -1.0, 0.5, 1.0, 2.0, 5.0;
  const auto r = extreme_eigenvalues([&](const Vector& v) { return Vector(diag.cwiseProduct(v)); },
                                     6, 7, 1e-12, 5000);
  CHECK(r.converged);
  CHECK(r.highest == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(r.lowest == doctest::Approx(-3.0).epsilon(1e-6));

  diag << -7.0, -1.0, 0.5, 1.0, 2.0, 5.0;
  const auto s = extreme_eigenvalues([&](const Vector& v) { return Vector(diag.cwiseProduct(v)); },
                                     6, 7, 1e-12, 5000);
  CHECK(s.lowest == doctest::Approx(-7.0).epsilon(1e-6));
  CHECK(s.highest == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("power iteration is deterministic") {
  const Matrix a = random_symmetric(20, 9);
  const auto op = [&](const Vector& v) { return Vector(a * v); };
  const auto x = power_iteration(op, 20, 3);
  const auto y = power_iteration(op, 20, 3);
  CHECK(x.norm == y.norm);
  CHECK(x.iterations == y.iterations);
}
