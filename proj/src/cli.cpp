#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wf/harness.hpp"
#include "wf/verification.hpp"

namespace wf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum Exit { kOk = 0, kUsage = 1, kDiverged = 2, kIo = 3 };

struct RunFlags {
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<double> eta;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iters;
  std::optional<double> tol;
  std::optional<std::string> design;
  std::optional<std::string> init;
  std::optional<std::size_t> record_every;
  std::optional<std::size_t> loo_count;
  std::string x0_file;
  std::string out = ".";
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--n", f.n, "signal dimension")->check(CLI::Range(2ul, 1ul << 40));
  cmd->add_option("--m", f.m, "number of samples (default 10n)")->check(CLI::PositiveNumber);
  cmd->add_option("--eta", f.eta, "step size")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--iters", f.iters, "maximum iterations")->check(CLI::NonNegativeNumber);
  cmd->add_option("--tol", f.tol, "relative dist threshold")->check(CLI::NonNegativeNumber);
  cmd->add_option("--design", f.design, "design distribution")
      ->check(CLI::IsMember({"gaussian", "rademacher"}));
  cmd->add_option("--init", f.init, "initialization")->check(CLI::IsMember({"random", "data", "fixed"}));
  cmd->add_option("--x0-file", f.x0_file, "whitespace-separated initial point for --init fixed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--record-every", f.record_every, "record every K iterations")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--loo-count", f.loo_count, "number of leave-one-out indices")
      ->check(CLI::NonNegativeNumber);
}

Overrides to_overrides(const RunFlags& f) {
  Overrides o;
  o.n = f.n;
  o.m = f.m;
  o.eta = f.eta;
  o.max_iters = f.iters;
  o.tol = f.tol;
  if (f.design) o.design_kind = parse_design_kind(*f.design);
  if (f.init) o.init_mode = parse_init_mode(*f.init);
  o.record_every = f.record_every;
  o.loo_count = f.loo_count;
  return o;
}

Vector read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

int single_run(RunPlan::Kind kind, const std::string& prefix, const RunFlags& f) {
  const Overrides o = to_overrides(f);
  RunPlan plan;
  plan.kind = kind;
  plan.config.n = o.n.value_or(kind == RunPlan::Kind::Descent ? 100 : 1000);
  if (kind == RunPlan::Kind::Bundle) plan.config.n = o.n.value_or(300);
  plan.config.m = o.m.value_or(10 * plan.config.n);
  plan.config.eta = o.eta.value_or(0.1);
  plan.config.max_iters = o.max_iters.value_or(500);
  plan.config.tol = o.tol.value_or(1e-5);
  plan.config.design_kind = o.design_kind.value_or(DesignKind::Gaussian);
  plan.config.init_mode = o.init_mode.value_or(InitMode::GaussianRandom);
  plan.config.record_every = o.record_every.value_or(1);
  plan.config.seed = f.seed.value_or(0);
  plan.loo_count = o.loo_count.value_or(5);
  if (plan.config.init_mode == InitMode::Fixed) {
    if (f.x0_file.empty()) throw CLI::ValidationError("--init", "fixed init requires --x0-file");
    plan.config.fixed_init = read_vector(f.x0_file);
  }
  plan.stem = prefix + "_n" + std::to_string(plan.config.n) + "_seed" +
              std::to_string(plan.config.seed);
  ensure_dir(f.out);
  const RunOutcome outcome = execute_plan(plan, f.out);
  if (outcome.diverged) {
    std::cerr << "diverged: " << outcome.error << "\n";
    return kDiverged;
  }
  std::cout << outcome.csv.string() << "\n";
  return kOk;
}

json report_json(const ConcentrationReport& r) {
  json j = {{"statistic", r.statistic_name},
            {"trials", r.trials},
            {"observed", r.observed},
            {"violation_rate", r.violation_rate},
            {"discarded", r.discarded}};
  j["bound"] = std::isfinite(r.bound) ? json(r.bound) : json(nullptr);
  if (!r.envelopes.empty()) j["envelopes"] = r.envelopes;
  if (!r.observed.empty()) j["median"] = r.median();
  if (r.scaling_slope) j["scaling_slope"] = *r.scaling_slope;
  return j;
}

struct VerifyFlags {
  std::string suite = "all";
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::vector<std::size_t> m_list;
  std::optional<std::size_t> trials;
  std::uint64_t seed = 0;
  int which = 3;
  double epsilon = 0.05;
  std::string out = ".";
};

int verify(const VerifyFlags& f) {
  json result = {{"version", kVersion}, {"seed", f.seed}};
  const bool all = f.suite == "all";
  if (all || f.suite == "maxima") {
    const auto r = check_design_maxima(f.n.value_or(100), f.m.value_or(10000),
                                       f.trials.value_or(50), f.seed);
    result["maxima"] = {{"first_entry", report_json(r.first_entry)},
                        {"row_norm", report_json(r.row_norm)}};
  }
  if (all || f.suite == "hessian") {
    const std::vector<std::size_t> ms =
        f.m_list.empty() ? std::vector<std::size_t>{2000, 8000, 32000} : f.m_list;
    const auto r = check_hessian_concentration(f.n.value_or(50), ms, f.trials.value_or(10), f.seed);
    json per = json::array();
    for (const auto& p : r.per_m) per.push_back(report_json(p));
    result["hessian"] = {{"m_values", r.m_values}, {"per_m", per}, {"slope", r.slope}};
  }
  if (all || f.suite == "smoothness") {
    result["smoothness"] = report_json(
        check_local_smoothness(f.n.value_or(100), f.m.value_or(10000), f.trials.value_or(50), f.seed));
  }
  if (all || f.suite == "poly") {
    const auto r = check_polynomial_concentration(f.which, f.n.value_or(50), f.m.value_or(100000),
                                                  f.trials.value_or(50), f.seed, f.epsilon);
    result["poly"] = {{"case", f.which},
                      {"deviations", report_json(r.deviations)},
                      {"normalized_means", r.normalized_means}};
  }
  ensure_dir(f.out);
  const fs::path path = fs::path(f.out) / ("verify_" + f.suite + ".json");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out << result.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
  std::cout << path.string() << "\n";
  return kOk;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Gradient descent with random initialization for Gaussian phase retrieval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunFlags sim_flags, pop_flags, bundle_flags, fig_flags;
  auto* simulate = app.add_subcommand("simulate", "run gradient descent on one random instance");
  add_run_flags(simulate, sim_flags);
  auto* population = app.add_subcommand("population", "run the population-gradient dynamics");
  add_run_flags(population, pop_flags);
  auto* bundle = app.add_subcommand("bundle", "run the leave-one-out and random-sign sequences");
  add_run_flags(bundle, bundle_flags);

  VerifyFlags vf;
  auto* verify_cmd = app.add_subcommand("verify", "Monte-Carlo concentration checks");
  verify_cmd->add_option("--suite", vf.suite)
      ->check(CLI::IsMember({"all", "maxima", "hessian", "smoothness", "poly"}));
  verify_cmd->add_option("--n", vf.n)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--m", vf.m)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--m-list", vf.m_list)->delimiter(',');
  verify_cmd->add_option("--trials", vf.trials)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", vf.seed);
  verify_cmd->add_option("--case", vf.which)->check(CLI::Range(1, 6));
  verify_cmd->add_option("--epsilon", vf.epsilon)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--out", vf.out);

  std::string figure_id;
  std::vector<std::uint64_t> seeds;
  auto* figure = app.add_subcommand("figure", "reproduce one figure's traces");
  figure->add_option("id", figure_id, "figure id")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2a", "fig2b", "fig3a", "fig3b", "population", "fig4a",
                             "fig4b", "fig5", "custom"}));
  add_run_flags(figure, fig_flags);
  figure->add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (simulate->parsed()) return single_run(RunPlan::Kind::Descent, "simulate", sim_flags);
    if (population->parsed()) return single_run(RunPlan::Kind::Population, "population", pop_flags);
    if (bundle->parsed()) return single_run(RunPlan::Kind::Bundle, "bundle", bundle_flags);
    if (verify_cmd->parsed()) return verify(vf);
    if (figure->parsed()) {
      ExperimentSpec spec;
      spec.figure = parse_figure_id(figure_id);
      spec.overrides = to_overrides(fig_flags);
      if (!seeds.empty()) {
        spec.seeds = seeds;
      } else {
        spec.seeds = {fig_flags.seed.value_or(0)};
      }
      spec.output_dir = fig_flags.out;
      const auto csvs = run_experiment(spec);
      for (const auto& p : csvs) std::cout << p.string() << "\n";
      return kOk;
    }
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kDiverged;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace wf
