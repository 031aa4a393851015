#include "wf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "wf/rng.hpp"

namespace wf {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(FigureId id) {
  switch (id) {
    case FigureId::Fig1: return "fig1";
    case FigureId::Fig2a: return "fig2a";
    case FigureId::Fig2b: return "fig2b";
    case FigureId::Fig3a: return "fig3a";
    case FigureId::Fig3b: return "fig3b";
    case FigureId::Population: return "population";
    case FigureId::Fig4a: return "fig4a";
    case FigureId::Fig4b: return "fig4b";
    case FigureId::Fig5: return "fig5";
    case FigureId::Custom: return "custom";
  }
  return "custom";
}

FigureId parse_figure_id(const std::string& name) {
  for (FigureId id : {FigureId::Fig1, FigureId::Fig2a, FigureId::Fig2b, FigureId::Fig3a,
                      FigureId::Fig3b, FigureId::Population, FigureId::Fig4a, FigureId::Fig4b,
                      FigureId::Fig5, FigureId::Custom}) {
    if (to_string(id) == name) return id;
  }
  throw std::invalid_argument("unknown figure id: " + name);
}

Signal default_signal(DesignKind kind, std::size_t n, std::uint64_t seed) {
  return kind == DesignKind::Gaussian ? Signal::basis(n) : Signal::random(n, seed);
}

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json config_json(const RunConfig& c) {
  json j = {{"n", c.n},
            {"m", c.m},
            {"eta", c.eta},
            {"max_iters", c.max_iters},
            {"tol", c.tol},
            {"design", to_string(c.design_kind)},
            {"init", to_string(c.init_mode)},
            {"seed", c.seed},
            {"record_every", c.record_every},
            {"divergence_factor", c.divergence_factor},
            {"diagnostics",
             {{"incoherence", c.diagnostics.incoherence},
              {"residuals", c.diagnostics.residuals},
              {"hessian_norm", c.diagnostics.hessian_norm}}}};
  if (c.init_mode == InitMode::Fixed) {
    j["fixed_init"] = std::vector<double>(c.fixed_init.begin(), c.fixed_init.end());
  }
  return j;
}

json stage_json(const std::optional<StageTimes>& st) {
  if (!st) return nullptr;
  auto opt = [](const std::optional<std::size_t>& v) -> json {
    return v ? json(*v) : json(nullptr);
  };
  return {{"t0", opt(st->t0)}, {"t1", opt(st->t1)}, {"t_gamma", opt(st->t_gamma)}};
}

json spec_json(const ExperimentSpec& spec) {
  const Overrides& o = spec.overrides;
  json ov = json::object();
  if (o.n) ov["n"] = *o.n;
  if (o.m) ov["m"] = *o.m;
  if (o.eta) ov["eta"] = *o.eta;
  if (o.max_iters) ov["max_iters"] = *o.max_iters;
  if (o.tol) ov["tol"] = *o.tol;
  if (o.design_kind) ov["design"] = to_string(*o.design_kind);
  if (o.init_mode) ov["init"] = to_string(*o.init_mode);
  if (o.record_every) ov["record_every"] = *o.record_every;
  if (o.loo_count) ov["loo_count"] = *o.loo_count;
  return {{"figure", to_string(spec.figure)},
          {"overrides", ov},
          {"seeds", spec.seeds},
          {"output_dir", spec.output_dir.string()}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunConfig base_config(const Overrides& o, std::size_t default_n, std::uint64_t seed) {
  RunConfig c;
  c.n = o.n.value_or(default_n);
  c.m = o.m.value_or(10 * c.n);
  c.eta = o.eta.value_or(0.1);
  c.max_iters = o.max_iters.value_or(500);
  c.tol = o.tol.value_or(1e-5);
  c.design_kind = o.design_kind.value_or(DesignKind::Gaussian);
  c.init_mode = o.init_mode.value_or(InitMode::GaussianRandom);
  c.record_every = o.record_every.value_or(1);
  c.seed = seed;
  return c;
}

std::vector<double> step_sizes(const Overrides& o) {
  if (o.eta) return {*o.eta};
  return {0.01, 0.05, 0.1};
}

}  // namespace

std::vector<RunPlan> plan_experiment(const ExperimentSpec& spec) {
  if (spec.seeds.empty()) throw std::invalid_argument("experiment needs at least one seed");
  const Overrides& o = spec.overrides;
  const std::string fig = to_string(spec.figure);
  std::vector<RunPlan> plans;

  auto stem = [&](const RunConfig& c, bool with_eta) {
    std::string s = fig + "_n" + std::to_string(c.n);
    if (with_eta) s += "_eta" + short_number(c.eta);
    return s + "_seed" + std::to_string(c.seed);
  };

  for (std::uint64_t seed : spec.seeds) {
    switch (spec.figure) {
      case FigureId::Fig1:
      case FigureId::Fig2a:
      case FigureId::Fig2b: {
        std::vector<std::size_t> ns{100, 200, 500, 800, 1000};
        if (o.n) ns = {*o.n};
        for (std::size_t n : ns) {
          Overrides per_n = o;
          per_n.n = n;
          RunPlan p;
          p.config = base_config(per_n, n, seed);
          p.stem = stem(p.config, false);
          plans.push_back(std::move(p));
        }
        break;
      }
      case FigureId::Fig3a:
      case FigureId::Fig3b:
        for (double eta : step_sizes(o)) {
          Overrides per_eta = o;
          per_eta.eta = eta;
          if (!o.max_iters) per_eta.max_iters = static_cast<std::size_t>(std::ceil(50.0 / eta));
          RunPlan p;
          p.kind = spec.figure == FigureId::Fig3a ? RunPlan::Kind::Descent
                                                  : RunPlan::Kind::Population;
          p.config = base_config(per_eta, 1000, seed);
          p.stem = stem(p.config, true);
          plans.push_back(std::move(p));
        }
        break;
      case FigureId::Population: {
        RunPlan p;
        p.kind = RunPlan::Kind::Population;
        p.config = base_config(o, 1000, seed);
        p.stem = stem(p.config, false);
        plans.push_back(std::move(p));
        break;
      }
      case FigureId::Fig4a:
      case FigureId::Fig4b: {
        RunPlan p;
        p.kind = RunPlan::Kind::Bundle;
        p.config = base_config(o, 1000, seed);
        p.loo_count = o.loo_count.value_or(5);
        p.truncate_at_t_gamma = spec.figure == FigureId::Fig4a;
        p.stem = stem(p.config, false);
        plans.push_back(std::move(p));
        break;
      }
      case FigureId::Fig5: {
        Overrides rad = o;
        if (!rad.design_kind) rad.design_kind = DesignKind::Rademacher;
        RunPlan p;
        p.config = base_config(rad, 1000, seed);
        p.stem = stem(p.config, false);
        plans.push_back(std::move(p));
        break;
      }
      case FigureId::Custom: {
        RunPlan p;
        p.config = base_config(o, 100, seed);
        p.stem = stem(p.config, false);
        plans.push_back(std::move(p));
        break;
      }
    }
  }
  return plans;
}

void write_trace_csv(const fs::path& path, const TrajectoryRecord& record,
                     const DifferenceCurves* curves, std::optional<std::size_t> last_t) {
  std::string text = "t,dist_rel,alpha,beta,ratio,loss,grad_norm,incoherence";
  if (curves) text += ",d_loo,d_loo_par,d_sgn,d_double";
  text += '\n';
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < record.rows.size(); ++k) {
    const TraceRow& r = record.rows[k];
    if (last_t && r.t > *last_t) break;
    text += std::to_string(r.t);
    for (double v : {record.relative_dist(k), r.alpha, r.beta, r.ratio, r.loss, r.grad_norm,
                     r.incoherence}) {
      text += ',';
      text += format_number(v);
    }
    if (curves) {
      const bool loo = curves->has_loo;
      for (double v : {loo ? curves->d_loo[k] : nan, loo ? curves->d_loo_par[k] : nan,
                       curves->d_sgn[k], loo ? curves->d_double[k] : nan}) {
        text += ',';
        text += format_number(v);
      }
    }
    text += '\n';
  }
  write_text(path, text);
}

RunOutcome execute_plan(const RunPlan& plan, const fs::path& dir) {
  const RunConfig& c = plan.config;
  c.validate();
  RunOutcome outcome;
  outcome.csv = dir / (plan.stem + ".csv");
  outcome.sidecar = dir / (plan.stem + ".json");

  const Signal signal = default_signal(c.design_kind, c.n, c.seed);
  json side = {{"config", config_json(c)},
               {"signal", c.design_kind == DesignKind::Gaussian ? "e1" : "random_unit"},
               {"version", kVersion},
               {"csv", outcome.csv.filename().string()}};

  try {
    switch (plan.kind) {
      case RunPlan::Kind::Descent: {
        side["kind"] = "descent";
        const DesignEnsemble design =
            generate_design(c.n, c.m, c.design_kind, signal, c.seed, streams::kDesign);
        TrajectoryRecord record = run(c, design, signal, initial_point(c, design, signal));
        if (c.record_every == 1) attach_stage_times(record, StageConstants{}, c.m);
        write_trace_csv(outcome.csv, record);
        outcome.converged = record.converged;
        outcome.iterations_run = record.iterations_run;
        outcome.stage_times = record.stage_times;
        break;
      }
      case RunPlan::Kind::Population: {
        side["kind"] = "population";
        if (c.init_mode == InitMode::DataDependent) {
          throw std::invalid_argument("population runs support random or fixed init only");
        }
        const Vector x0 = c.init_mode == InitMode::Fixed ? c.fixed_init
                                                          : random_init(c.n, signal.norm(), c.seed);
        TrajectoryRecord record = run_population(x0, signal, c.eta, c.max_iters, c.tol);
        attach_stage_times(record, StageConstants{}, 0);
        write_trace_csv(outcome.csv, record);
        outcome.converged = record.converged;
        outcome.iterations_run = record.iterations_run;
        outcome.stage_times = record.stage_times;
        break;
      }
      case RunPlan::Kind::Bundle: {
        side["kind"] = "bundle";
        const DesignEnsemble design =
            generate_design(c.n, c.m, c.design_kind, signal, c.seed, streams::kDesign);
        const auto indices = sample_loo_indices(c.m, plan.loo_count, c.seed);
        side["loo_indices"] = indices;
        AuxiliaryBundle bundle =
            run_bundle(c, design, signal, initial_point(c, design, signal), indices, c.seed);
        attach_stage_times(bundle.base, StageConstants{}, c.m);
        const DifferenceCurves curves = difference_curves(bundle, signal);
        std::optional<std::size_t> last;
        if (plan.truncate_at_t_gamma) last = bundle.base.stage_times->t_gamma;
        write_trace_csv(outcome.csv, bundle.base, &curves, last);
        outcome.converged = bundle.base.converged;
        outcome.iterations_run = bundle.base.iterations_run;
        outcome.stage_times = bundle.base.stage_times;
        break;
      }
    }
  } catch (const DivergenceError& e) {
    outcome.diverged = true;
    outcome.error = e.what();
    side["last_finite_t"] = e.last_finite_step();
  }

  side["converged"] = outcome.converged;
  side["iterations_run"] = outcome.iterations_run;
  side["stage_times"] = stage_json(outcome.stage_times);
  if (outcome.diverged) side["error"] = outcome.error;
  write_text(outcome.sidecar, side.dump(2) + "\n");
  return outcome;
}

std::size_t thread_count_from_env() {
  if (const char* env = std::getenv("WF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<fs::path> run_experiment(const ExperimentSpec& spec) {
  const std::vector<RunPlan> plans = plan_experiment(spec);
  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  if (ec || !fs::is_directory(spec.output_dir)) {
    throw IoError("cannot create output directory " + spec.output_dir.string());
  }

  std::vector<RunOutcome> outcomes(plans.size());
  std::vector<std::exception_ptr> failures(plans.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < plans.size(); k = next++) {
      try {
        outcomes[k] = execute_plan(plans[k], spec.output_dir);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(thread_count_from_env(), plans.size());
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::vector<std::size_t> order(plans.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return outcomes[a].csv < outcomes[b].csv; });

  json outputs = json::array();
  std::vector<fs::path> csvs;
  for (std::size_t k : order) {
    const RunOutcome& o = outcomes[k];
    json entry = {{"csv", o.diverged ? json(nullptr) : json(o.csv.filename().string())},
                  {"sidecar", o.sidecar.filename().string()},
                  {"converged", o.converged},
                  {"iterations_run", o.iterations_run},
                  {"diverged", o.diverged}};
    if (o.diverged) entry["error"] = o.error;
    outputs.push_back(entry);
    if (!o.diverged) csvs.push_back(o.csv);
  }
  const json manifest = {{"spec", spec_json(spec)},
                         {"outputs", outputs},
                         {"version", kVersion},
                         {"timestamp", utc_timestamp()}};
  write_text(spec.output_dir / "manifest.json", manifest.dump(2) + "\n");
  return csvs;
}

}  // namespace wf
