#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wf {

// Signal strength alpha_t = |<x^t, u>| and orthogonal strength beta_t = ||x_perp^t||.
struct SEPoint {
  double alpha = 0.0;
  double beta = 0.0;
};

struct StageTimes {
  std::optional<std::size_t> t0;
  std::optional<std::size_t> t1;
  std::optional<std::size_t> t_gamma;
};

// Thresholds of the stage predicates. The defaults make all three fire at
// desk-scale sizes; they are not the (unspecified) constants of the theory.
struct StageConstants {
  double gamma = 0.1;
  double c4 = 0.1;
  double c6 = 1.0;
};

struct SETrace {
  std::vector<SEPoint> points;
  double eta = 0.0;
  std::vector<double> zetas;  // empty for population traces
  std::vector<double> rhos;
  StageTimes stage_times;
};

class DegenerateStep : public std::domain_error {
 public:
  DegenerateStep(std::size_t t, const std::string& what) : std::domain_error(what), t_(t) {}
  std::size_t step() const noexcept { return t_; }

 private:
  std::size_t t_;
};

SEPoint population_step(SEPoint p, double eta);

// True when |alpha - 1| <= gamma/2 and beta <= gamma/2.
bool in_local_region(SEPoint p, double gamma);

// Iterates population_step from p0 until the local-region event or max_iters.
// stage_times.t_gamma is filled when the event occurs.
SETrace population_run(SEPoint p0, double eta, std::size_t max_iters, double gamma = 0.1);

// Inverts the perturbed recursion
//   alpha' = {1 + 3 eta [1 - (alpha^2 + beta^2)] + eta zeta} alpha
//   beta'  = {1 + eta [1 - 3 (alpha^2 + beta^2)] + eta rho} beta
// for zeta_t and rho_t. A zero alpha_t throws DegenerateStep; a zero beta_t
// ends the extraction there and truncates the returned points.
SETrace extract_perturbations(const std::vector<SEPoint>& points, double eta);

// Forward application of the perturbed recursion.
std::vector<SEPoint> apply_perturbations(SEPoint p0, double eta, const std::vector<double>& zetas,
                                         const std::vector<double>& rhos);

// First indices satisfying
//   t0:      alpha_{t+1} >= c6 / log^5 m
//   t1:      alpha_{t+1} >  c4
//   t_gamma: |alpha_t - 1| <= gamma/2 and beta_t <= gamma/2
// m == 0 stands for the population limit (t0 threshold 0).
StageTimes stage_times(const std::vector<SEPoint>& points, const StageConstants& constants,
                       std::size_t m);

}  // namespace wf
