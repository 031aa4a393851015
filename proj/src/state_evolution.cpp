#include "wf/state_evolution.hpp"

#include <cmath>
#include <string>

namespace wf {

SEPoint population_step(SEPoint p, double eta) {
  const double r2 = p.alpha * p.alpha + p.beta * p.beta;
  return {(1.0 + 3.0 * eta * (1.0 - r2)) * p.alpha, (1.0 + eta * (1.0 - 3.0 * r2)) * p.beta};
}

bool in_local_region(SEPoint p, double gamma) {
  return std::abs(p.alpha - 1.0) <= gamma / 2 && p.beta <= gamma / 2;
}

SETrace population_run(SEPoint p0, double eta, std::size_t max_iters, double gamma) {
  SETrace trace;
  trace.eta = eta;
  trace.points.push_back(p0);
  SEPoint p = p0;
  for (std::size_t t = 0;; ++t) {
    if (in_local_region(p, gamma)) {
      trace.stage_times.t_gamma = t;
      break;
    }
    if (t == max_iters) break;
    p = population_step(p, eta);
    trace.points.push_back(p);
  }
  return trace;
}

SETrace extract_perturbations(const std::vector<SEPoint>& points, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("step size must be positive to extract perturbations");
  SETrace trace;
  trace.eta = eta;
  if (points.empty()) return trace;
  trace.points.push_back(points.front());
  for (std::size_t t = 0; t + 1 < points.size(); ++t) {
    const SEPoint p = points[t];
    if (p.beta == 0.0) break;
    if (p.alpha == 0.0) {
      throw DegenerateStep(t, "alpha vanishes at step " + std::to_string(t));
    }
    const double r2 = p.alpha * p.alpha + p.beta * p.beta;
    const SEPoint next = points[t + 1];
    trace.zetas.push_back((next.alpha / p.alpha - 1.0 - 3.0 * eta * (1.0 - r2)) / eta);
    trace.rhos.push_back((next.beta / p.beta - 1.0 - eta * (1.0 - 3.0 * r2)) / eta);
    trace.points.push_back(next);
  }
  return trace;
}

std::vector<SEPoint> apply_perturbations(SEPoint p0, double eta, const std::vector<double>& zetas,
                                         const std::vector<double>& rhos) {
  if (zetas.size() != rhos.size()) throw std::invalid_argument("perturbation lengths differ");
  std::vector<SEPoint> points{p0};
  points.reserve(zetas.size() + 1);
  SEPoint p = p0;
  for (std::size_t t = 0; t < zetas.size(); ++t) {
    const double r2 = p.alpha * p.alpha + p.beta * p.beta;
    p = {(1.0 + 3.0 * eta * (1.0 - r2) + eta * zetas[t]) * p.alpha,
         (1.0 + eta * (1.0 - 3.0 * r2) + eta * rhos[t]) * p.beta};
    points.push_back(p);
  }
  return points;
}

StageTimes stage_times(const std::vector<SEPoint>& points, const StageConstants& constants,
                       std::size_t m) {
  if (points.empty()) throw std::invalid_argument("stage times need a nonempty trace");
  double t0_threshold = 0.0;
  if (m > 1) t0_threshold = constants.c6 / std::pow(std::log(static_cast<double>(m)), 5);

  StageTimes times;
  for (std::size_t t = 0; t < points.size(); ++t) {
    if (t + 1 < points.size()) {
      const double next_alpha = points[t + 1].alpha;
      if (!times.t0 && next_alpha >= t0_threshold) times.t0 = t;
      if (!times.t1 && next_alpha > constants.c4) times.t1 = t;
    }
    if (!times.t_gamma && in_local_region(points[t], constants.gamma)) times.t_gamma = t;
  }
  return times;
}

}  // namespace wf
