#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wf/model.hpp"
#include "wf/state_evolution.hpp"

namespace wf {

enum class InitMode { GaussianRandom, DataDependent, Fixed };

std::string to_string(InitMode mode);
InitMode parse_init_mode(const std::string& name);

struct Diagnostics {
  bool incoherence = true;
  bool residuals = false;     // |r1| per recorded step
  bool hessian_norm = false;  // power iteration per recorded step
};

struct RunConfig {
  std::size_t n = 100;
  std::size_t m = 1000;
  double eta = 0.1;
  std::size_t max_iters = 500;
  double tol = 1e-5;  // on dist / ||x_nat||
  DesignKind design_kind = DesignKind::Gaussian;
  InitMode init_mode = InitMode::GaussianRandom;
  Vector fixed_init;  // used when init_mode == Fixed
  std::uint64_t seed = 0;
  std::size_t record_every = 1;
  Diagnostics diagnostics;
  bool keep_snapshots = false;
  double divergence_factor = 10.0;  // abort once ||x^t|| exceeds this times ||x_nat||
  bool stop_at_tol = true;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t last_finite_t, const std::string& what)
      : std::runtime_error(what), last_finite_t_(last_finite_t) {}
  std::size_t last_finite_step() const noexcept { return last_finite_t_; }

 private:
  std::size_t last_finite_t_;
};

struct TraceRow {
  std::size_t t = 0;
  double dist = 0.0;
  double alpha = 0.0;  // |<x^t, u>|
  double beta = 0.0;   // ||x_perp^t||
  double ratio = 0.0;  // alpha / beta
  double loss = 0.0;
  double grad_norm = 0.0;
  double incoherence = std::numeric_limits<double>::quiet_NaN();
  double r1_abs = std::numeric_limits<double>::quiet_NaN();
  double hessian_norm = std::numeric_limits<double>::quiet_NaN();
};

struct TrajectoryRecord {
  std::vector<TraceRow> rows;
  std::vector<Vector> snapshots;  // parallel to rows when kept
  double signal_norm = 1.0;
  std::size_t iterations_run = 0;
  bool converged = false;
  std::optional<StageTimes> stage_times;

  double relative_dist(std::size_t row) const { return rows.at(row).dist / signal_norm; }
};

Vector random_init(std::size_t n, double signal_norm, std::uint64_t seed);
Vector data_dependent_init(const DesignEnsemble& design, std::uint64_t seed);
Vector initial_point(const RunConfig& config, const DesignEnsemble& design, const Signal& signal);

// min(||x - x_nat||, ||x + x_nat||)
double dist(const Vector& x, const Signal& signal);

// Gradient descent x^{t+1} = x^t - eta grad f(x^t). With `skip_row` the
// leave-one-out loss (row never read, 1/m kept) is minimized instead.
TrajectoryRecord run(const RunConfig& config, const DesignEnsemble& design, const Signal& signal,
                     const Vector& x0, std::optional<std::size_t> skip_row = std::nullopt);

// Same loop driven by the population gradient.
TrajectoryRecord run_population(const Vector& x0, const Signal& signal, double eta,
                                std::size_t max_iters, double tol = 1e-5,
                                bool keep_snapshots = false);

// (alpha_t, beta_t) of a record; rows must be consecutive in t.
std::vector<SEPoint> se_points(const TrajectoryRecord& record);

// Fills record.stage_times from its rows.
void attach_stage_times(TrajectoryRecord& record, const StageConstants& constants, std::size_t m);

}  // namespace wf
