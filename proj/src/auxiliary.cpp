#include "wf/auxiliary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wf/objective.hpp"
#include "wf/rng.hpp"

namespace wf {

Vector loo_gradient(const DesignEnsemble& design, const Vector& x, std::size_t l) {
  if (l >= design.m()) throw std::out_of_range("left-out index out of range");
  return evaluate(design, x, l).gradient;
}

std::vector<std::size_t> sample_loo_indices(std::size_t m, std::size_t count, std::uint64_t seed) {
  count = std::min(count, m);
  std::vector<std::size_t> pool(m);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates.
  RandomStream rng(seed, streams::kLooIndices);
  for (std::size_t k = 0; k < count; ++k) {
    const auto span = static_cast<double>(m - k);
    auto offset = static_cast<std::size_t>((1.0 - rng.uniform()) * span);
    offset = std::min(offset, m - k - 1);
    std::swap(pool[k], pool[k + offset]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

namespace {

TrajectoryRecord run_named(const RunConfig& config, const DesignEnsemble& design,
                           const Signal& signal, const Vector& x0,
                           std::optional<std::size_t> skip_row, const std::string& name) {
  try {
    return run(config, design, signal, x0, skip_row);
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.last_finite_step(), name + " sequence: " + e.what());
  }
}

}  // namespace

AuxiliaryBundle run_bundle(const RunConfig& config, const DesignEnsemble& design,
                           const Signal& signal, const Vector& x0,
                           const std::vector<std::size_t>& loo_indices, std::uint64_t flips_seed,
                           FlipMode flip_mode) {
  for (std::size_t l : loo_indices) {
    if (l >= design.m()) throw std::out_of_range("left-out index out of range");
  }
  RunConfig base_config = config;
  base_config.keep_snapshots = true;
  base_config.record_every = 1;

  AuxiliaryBundle bundle;
  bundle.base = run_named(base_config, design, signal, x0, std::nullopt, "base");

  RunConfig aux_config = base_config;
  aux_config.max_iters = bundle.base.iterations_run;
  aux_config.stop_at_tol = false;

  bundle.flips = flip_mode == FlipMode::Matching ? SignFlipVector::matching(design)
                                                 : SignFlipVector::random(design.m(), flips_seed);
  const DesignEnsemble sgn_design = flip_first_entry(design, bundle.flips);

  for (std::size_t l : loo_indices) {
    bundle.loo.emplace(l, run_named(aux_config, design, signal, x0, l,
                                    "leave-one-out (l=" + std::to_string(l) + ")"));
  }
  bundle.sgn = run_named(aux_config, sgn_design, signal, x0, std::nullopt, "random-sign");
  for (std::size_t l : loo_indices) {
    bundle.sgn_loo.emplace(l, run_named(aux_config, sgn_design, signal, x0, l,
                                        "random-sign leave-one-out (l=" + std::to_string(l) + ")"));
  }
  return bundle;
}

DifferenceCurves difference_curves(const AuxiliaryBundle& bundle, const Signal& signal) {
  const auto& base = bundle.base.snapshots;
  if (base.empty() || bundle.sgn.snapshots.size() != base.size()) {
    throw std::invalid_argument("difference curves need snapshots of every sequence");
  }
  for (const auto& [l, rec] : bundle.loo) {
    if (rec.snapshots.size() != base.size()) {
      throw std::invalid_argument("leave-one-out sequence is missing snapshots");
    }
  }
  for (const auto& [l, rec] : bundle.sgn_loo) {
    if (rec.snapshots.size() != base.size()) {
      throw std::invalid_argument("random-sign leave-one-out sequence is missing snapshots");
    }
  }

  const Vector u = signal.direction();
  DifferenceCurves curves;
  curves.has_loo = !bundle.loo.empty();
  for (std::size_t k = 0; k < base.size(); ++k) {
    const Vector& x = base[k];
    const Vector& xs = bundle.sgn.snapshots[k];
    const double alpha = bundle.base.rows[k].alpha;
    const double beta = bundle.base.rows[k].beta;
    curves.t.push_back(bundle.base.rows[k].t);
    const double d_sgn = (x - xs).norm();
    curves.d_sgn.push_back(d_sgn);
    curves.d_sgn_over_alpha.push_back(d_sgn / alpha);
    if (!curves.has_loo) continue;

    double d_loo = 0.0, d_par = 0.0, d_double = 0.0;
    for (const auto& [l, rec] : bundle.loo) {
      const Vector& xl = rec.snapshots[k];
      d_loo = std::max(d_loo, (x - xl).norm());
      d_par = std::max(d_par, std::abs((x - xl).dot(u)));
      const auto it = bundle.sgn_loo.find(l);
      if (it != bundle.sgn_loo.end()) {
        d_double = std::max(d_double, (x - xs - xl + it->second.snapshots[k]).norm());
      }
    }
    curves.d_loo.push_back(d_loo);
    curves.d_loo_par.push_back(d_par);
    curves.d_double.push_back(d_double);
    curves.d_loo_over_beta.push_back(d_loo / beta);
    curves.d_loo_par_over_alpha.push_back(d_par / alpha);
    curves.d_double_over_alpha.push_back(d_double / alpha);
  }
  return curves;
}

std::vector<double> incoherence_profile(const DesignEnsemble& design,
                                        const std::vector<Vector>& snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("incoherence profile needs snapshots");
  std::vector<double> profile;
  profile.reserve(snapshots.size());
  for (const Vector& x : snapshots) {
    require_same_size(design.n(), static_cast<std::size_t>(x.size()), "snapshot");
    const double xn = x.norm();
    if (xn == 0.0) {
      profile.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    profile.push_back((design.rows() * x).cwiseAbs().maxCoeff() / xn);
  }
  return profile;
}

}  // namespace wf
