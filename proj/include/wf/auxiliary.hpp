#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "wf/model.hpp"
#include "wf/solver.hpp"

namespace wf {

// Gradient of the leave-one-out loss (1/4m) sum_{i != l} [...]^2. Row l is never read.
Vector loo_gradient(const DesignEnsemble& design, const Vector& x, std::size_t l);

enum class FlipMode {
  Random,    // fair coin per sample
  Matching,  // xi_i = sgn(a_{i,1}); the random-sign design equals the original
};

// Original, leave-one-out, random-sign and combined sequences, all started
// from the same x0 and advanced for the same number of steps as the base run.
struct AuxiliaryBundle {
  TrajectoryRecord base;
  std::map<std::size_t, TrajectoryRecord> loo;
  TrajectoryRecord sgn;
  std::map<std::size_t, TrajectoryRecord> sgn_loo;
  SignFlipVector flips = SignFlipVector::ones(0);
};

// Sorted sample of `count` distinct row indices (0-based) in [0, m).
std::vector<std::size_t> sample_loo_indices(std::size_t m, std::size_t count, std::uint64_t seed);

// Divergence in any sequence rethrows DivergenceError naming that sequence.
AuxiliaryBundle run_bundle(const RunConfig& config, const DesignEnsemble& design,
                           const Signal& signal, const Vector& x0,
                           const std::vector<std::size_t>& loo_indices, std::uint64_t flips_seed,
                           FlipMode flip_mode = FlipMode::Random);

struct DifferenceCurves {
  std::vector<std::size_t> t;
  bool has_loo = false;
  std::vector<double> d_loo;      // max_l ||x^t - x^{t,(l)}||
  std::vector<double> d_loo_par;  // max_l |x_par^t - x_par^{t,(l)}|
  std::vector<double> d_sgn;      // ||x^t - x^{t,sgn}||
  std::vector<double> d_double;   // max_l ||x^t - x^{t,sgn} - x^{t,(l)} + x^{t,sgn,(l)}||
  std::vector<double> d_loo_over_beta;
  std::vector<double> d_loo_par_over_alpha;
  std::vector<double> d_sgn_over_alpha;
  std::vector<double> d_double_over_alpha;
};

DifferenceCurves difference_curves(const AuxiliaryBundle& bundle, const Signal& signal);

// max_i |a_i^T x^t| / ||x^t|| per snapshot; NaN marks a zero iterate.
std::vector<double> incoherence_profile(const DesignEnsemble& design,
                                        const std::vector<Vector>& snapshots);

}  // namespace wf
