#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wf/auxiliary.hpp"
#include "wf/solver.hpp"

namespace wf {

inline constexpr const char* kVersion = "0.1.0";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FigureId { Fig1, Fig2a, Fig2b, Fig3a, Fig3b, Population, Fig4a, Fig4b, Fig5, Custom };

std::string to_string(FigureId id);
FigureId parse_figure_id(const std::string& name);

struct Overrides {
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<double> eta;
  std::optional<std::size_t> max_iters;
  std::optional<double> tol;
  std::optional<DesignKind> design_kind;
  std::optional<InitMode> init_mode;
  std::optional<std::size_t> record_every;
  std::optional<std::size_t> loo_count;
};

struct ExperimentSpec {
  FigureId figure = FigureId::Custom;
  Overrides overrides;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = ".";
};

// One resolved run of an experiment.
struct RunPlan {
  enum class Kind { Descent, Population, Bundle };
  Kind kind = Kind::Descent;
  RunConfig config;
  std::size_t loo_count = 5;
  bool truncate_at_t_gamma = false;  // Stage-1-only output
  std::string stem;                  // file name without extension
};

struct RunOutcome {
  std::filesystem::path csv;
  std::filesystem::path sidecar;
  bool diverged = false;
  std::string error;
  bool converged = false;
  std::size_t iterations_run = 0;
  std::optional<StageTimes> stage_times;
};

// Signal used by the harness: e_1 for Gaussian designs, a seeded random
// unit vector for Rademacher designs (e_1 is not identifiable there).
Signal default_signal(DesignKind kind, std::size_t n, std::uint64_t seed);

std::vector<RunPlan> plan_experiment(const ExperimentSpec& spec);

// Executes a plan and writes its CSV and sidecar into `dir`. Divergence is
// captured in the outcome; I/O failures throw IoError.
RunOutcome execute_plan(const RunPlan& plan, const std::filesystem::path& dir);

// Runs every plan (in parallel per WF_THREADS) and writes manifest.json.
// Returns the CSV paths in manifest order.
std::vector<std::filesystem::path> run_experiment(const ExperimentSpec& spec);

// CSV with header t,dist_rel,alpha,beta,ratio,loss,grad_norm,incoherence and
// the four difference columns when `curves` is given. 17 significant digits.
void write_trace_csv(const std::filesystem::path& path, const TrajectoryRecord& record,
                     const DifferenceCurves* curves = nullptr,
                     std::optional<std::size_t> last_t = std::nullopt);

std::size_t thread_count_from_env();

int cli_main(int argc, char** argv);

}  // namespace wf
