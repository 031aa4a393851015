#include "wf/spectral.hpp"

#include <cmath>

#include "wf/rng.hpp"

namespace wf {

SpectralEstimate power_iteration(const LinearMap& op, std::size_t n, std::uint64_t seed,
                                 double tol, int max_iters) {
  RandomStream rng(seed, streams::kProbe);
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& v_j : v) v_j = rng.normal();
  v.normalize();

  SpectralEstimate est;
  double previous = 0.0;
  for (int k = 1; k <= max_iters; ++k) {
    const Vector w = op(v);
    const double norm = w.norm();
    est.iterations = k;
    est.dominant_eigenvalue = v.dot(w);
    est.norm = norm;
    if (norm == 0.0) {
      est.converged = true;
      break;
    }
    if (k > 1 && std::abs(norm - previous) <= tol * norm) {
      est.converged = true;
      break;
    }
    previous = norm;
    v = w / norm;
  }
  return est;
}

EigenRange extreme_eigenvalues(const LinearMap& op, std::size_t n, std::uint64_t seed, double tol,
                               int max_iters) {
  const SpectralEstimate first = power_iteration(op, n, seed, tol, max_iters);
  const double shift = first.dominant_eigenvalue;
  const LinearMap shifted = [&](const Vector& v) { return Vector(op(v) - shift * v); };
  const SpectralEstimate second = power_iteration(shifted, n, seed + 1, tol, max_iters);
  const double other = second.dominant_eigenvalue + shift;

  EigenRange range;
  range.lowest = std::min(shift, other);
  range.highest = std::max(shift, other);
  range.converged = first.converged && second.converged;
  return range;
}

double dense_spectral_norm(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace wf
