#pragma once

#include <cstdint>
#include <functional>

#include "wf/model.hpp"

namespace wf {

using LinearMap = std::function<Vector(const Vector&)>;

struct SpectralEstimate {
  double norm = 0.0;                 // largest |eigenvalue| (symmetric operator)
  double dominant_eigenvalue = 0.0;  // signed Rayleigh quotient at the final iterate
  int iterations = 0;
  bool converged = false;
};

struct EigenRange {
  double lowest = 0.0;
  double highest = 0.0;
  bool converged = false;
};

// Power iteration on a symmetric operator of size n from a seeded random
// start. Stops once ||A v|| changes by at most tol relative between steps.
SpectralEstimate power_iteration(const LinearMap& op, std::size_t n, std::uint64_t seed,
                                 double tol = 1e-8, int max_iters = 1000);

// Both extreme eigenvalues: a plain pass finds the dominant one, a second
// pass on A - lambda I finds the opposite end of the spectrum.
EigenRange extreme_eigenvalues(const LinearMap& op, std::size_t n, std::uint64_t seed,
                               double tol = 1e-8, int max_iters = 1000);

// Dense reference: largest |eigenvalue| of a symmetric matrix.
double dense_spectral_norm(const Matrix& symmetric);

}  // namespace wf
