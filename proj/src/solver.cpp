#include "wf/solver.hpp"

#include <cmath>
#include <limits>

#include "wf/objective.hpp"
#include "wf/rng.hpp"
#include "wf/spectral.hpp"

namespace wf {

std::string to_string(InitMode mode) {
  switch (mode) {
    case InitMode::GaussianRandom:
      return "random";
    case InitMode::DataDependent:
      return "data";
    case InitMode::Fixed:
      return "fixed";
  }
  return "unknown";
}

InitMode parse_init_mode(const std::string& name) {
  if (name == "random") return InitMode::GaussianRandom;
  if (name == "data") return InitMode::DataDependent;
  if (name == "fixed") return InitMode::Fixed;
  throw std::invalid_argument("unknown init mode: " + name);
}

void RunConfig::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (m < 1) throw std::invalid_argument("m must be positive");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be nonnegative");
  if (!(tol >= 0.0)) throw std::invalid_argument("tol must be nonnegative");
  if (record_every < 1) throw std::invalid_argument("record_every must be positive");
  if (init_mode == InitMode::Fixed && static_cast<std::size_t>(fixed_init.size()) != n) {
    throw std::invalid_argument("fixed_init must have length n");
  }
}

Vector random_init(std::size_t n, double signal_norm, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  RandomStream rng(seed, streams::kInit);
  const double scale = signal_norm / std::sqrt(static_cast<double>(n));
  Vector x(static_cast<Eigen::Index>(n));
  for (auto& x_j : x) x_j = scale * rng.normal();
  return x;
}

Vector data_dependent_init(const DesignEnsemble& design, std::uint64_t seed) {
  RandomStream rng(seed, streams::kInit);
  Vector u(static_cast<Eigen::Index>(design.n()));
  for (auto& u_j : u) u_j = rng.normal();
  u.normalize();
  return std::sqrt(design.measurements().mean()) * u;
}

Vector initial_point(const RunConfig& config, const DesignEnsemble& design, const Signal& signal) {
  switch (config.init_mode) {
    case InitMode::GaussianRandom:
      return random_init(config.n, signal.norm(), config.seed);
    case InitMode::DataDependent:
      return data_dependent_init(design, config.seed);
    case InitMode::Fixed:
      return config.fixed_init;
  }
  throw std::invalid_argument("unknown init mode");
}

double dist(const Vector& x, const Signal& signal) {
  require_same_size(signal.size(), static_cast<std::size_t>(x.size()), "iterate");
  return std::min((x - signal.entries()).norm(), (x + signal.entries()).norm());
}

namespace {

struct LoopSettings {
  double eta;
  std::size_t max_iters;
  double tol;
  std::size_t record_every;
  bool keep_snapshots;
  bool stop_at_tol;
  double divergence_factor;
};

template <class Evaluate, class Annotate>
TrajectoryRecord descend(const LoopSettings& settings, const Signal& signal, const Vector& x0,
                         Evaluate&& evaluate_at, Annotate&& annotate) {
  require_same_size(signal.size(), static_cast<std::size_t>(x0.size()), "initial point");
  if (!x0.allFinite()) throw std::invalid_argument("initial point has non-finite entries");

  TrajectoryRecord record;
  record.signal_norm = signal.norm();
  const double scale = signal.norm() > 0.0 ? signal.norm() : 1.0;
  const Vector u = signal.norm() > 0.0 ? signal.direction() : Vector::Zero(x0.size());
  const double bound = settings.divergence_factor * signal.norm();

  Vector x = x0;
  for (std::size_t t = 0;; ++t) {
    const Evaluation ev = evaluate_at(x);
    const double d = dist(x, signal);
    const bool converged = settings.stop_at_tol && d / scale <= settings.tol;
    const bool last = converged || t == settings.max_iters;

    if (t % settings.record_every == 0 || last) {
      TraceRow row;
      row.t = t;
      row.dist = d;
      const double par = x.dot(u);
      row.alpha = std::abs(par);
      row.beta = (x - par * u).norm();
      row.ratio = row.beta > 0.0 ? row.alpha / row.beta : std::numeric_limits<double>::infinity();
      row.loss = ev.loss;
      row.grad_norm = ev.gradient.norm();
      annotate(row, x, ev);
      record.rows.push_back(row);
      if (settings.keep_snapshots) record.snapshots.push_back(x);
    }
    if (last) {
      record.iterations_run = t;
      record.converged = converged;
      break;
    }

    x.noalias() -= settings.eta * ev.gradient;
    if (!x.allFinite() || (bound > 0.0 && x.norm() > bound)) {
      throw DivergenceError(t, "iterate diverged after step " + std::to_string(t) +
                                   "; step size too large");
    }
  }
  return record;
}

}  // namespace

TrajectoryRecord run(const RunConfig& config, const DesignEnsemble& design, const Signal& signal,
                     const Vector& x0, std::optional<std::size_t> skip_row) {
  config.validate();
  require_same_size(config.n, design.n(), "design dimension");
  require_same_size(design.n(), signal.size(), "signal");

  const LoopSettings settings{config.eta,          config.max_iters,   config.tol,
                              config.record_every, config.keep_snapshots, config.stop_at_tol,
                              config.divergence_factor};
  const Vector u = signal.norm() > 0.0 ? signal.direction() : Vector::Zero(signal.size());
  const auto& diag = config.diagnostics;

  return descend(
      settings, signal, x0, [&](const Vector& x) { return evaluate(design, x, skip_row); },
      [&](TraceRow& row, const Vector& x, const Evaluation& ev) {
        if (diag.incoherence) {
          const double xn = x.norm();
          row.incoherence = xn > 0.0 ? ev.max_projection / xn
                                     : std::numeric_limits<double>::quiet_NaN();
        }
        if (diag.residuals) {
          row.r1_abs = std::abs((ev.gradient - population_gradient(x, signal)).dot(u));
        }
        if (diag.hessian_norm) {
          const HessianOperator op(design, x);
          row.hessian_norm =
              power_iteration([&](const Vector& v) { return op.apply(v); }, design.n(),
                              config.seed)
                  .norm;
        }
      });
}

TrajectoryRecord run_population(const Vector& x0, const Signal& signal, double eta,
                                std::size_t max_iters, double tol, bool keep_snapshots) {
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  const LoopSettings settings{eta, max_iters, tol, 1, keep_snapshots, true, 10.0};
  return descend(
      settings, signal, x0,
      [&](const Vector& x) {
        Evaluation ev;
        ev.loss = population_loss(x, signal);
        ev.gradient = population_gradient(x, signal);
        return ev;
      },
      [](TraceRow&, const Vector&, const Evaluation&) {});
}

std::vector<SEPoint> se_points(const TrajectoryRecord& record) {
  std::vector<SEPoint> points;
  points.reserve(record.rows.size());
  for (std::size_t k = 0; k < record.rows.size(); ++k) {
    if (record.rows[k].t != k) {
      throw std::invalid_argument("state-evolution points need a record with every step kept");
    }
    points.push_back({record.rows[k].alpha, record.rows[k].beta});
  }
  return points;
}

void attach_stage_times(TrajectoryRecord& record, const StageConstants& constants, std::size_t m) {
  record.stage_times = stage_times(se_points(record), constants, m);
}

}  // namespace wf
