#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wf/auxiliary.hpp"
#include "wf/harness.hpp"
#include "wf/objective.hpp"
#include "wf/solver.hpp"
#include "wf/state_evolution.hpp"
#include "wf/verification.hpp"

namespace py = pybind11;
using namespace wf;

namespace {

// Columnar view of a trajectory, one list per CSV column.
py::dict record_to_dict(const TrajectoryRecord& rec) {
  std::vector<std::size_t> t;
  std::vector<double> dist, alpha, beta, ratio, loss_v, grad, inc;
  for (const auto& r : rec.rows) {
    t.push_back(r.t);
    dist.push_back(r.dist / rec.signal_norm);
    alpha.push_back(r.alpha);
    beta.push_back(r.beta);
    ratio.push_back(r.ratio);
    loss_v.push_back(r.loss);
    grad.push_back(r.grad_norm);
    inc.push_back(r.incoherence);
  }
  py::dict d;
  d["t"] = t;
  d["dist_rel"] = dist;
  d["alpha"] = alpha;
  d["beta"] = beta;
  d["ratio"] = ratio;
  d["loss"] = loss_v;
  d["grad_norm"] = grad;
  d["incoherence"] = inc;
  d["iterations_run"] = rec.iterations_run;
  d["converged"] = rec.converged;
  if (!rec.snapshots.empty()) d["snapshots"] = rec.snapshots;
  if (rec.stage_times) {
    d["stage_times"] = py::dict(py::arg("t0") = rec.stage_times->t0, py::arg("t1") = rec.stage_times->t1,
                                py::arg("t_gamma") = rec.stage_times->t_gamma);
  }
  return d;
}

py::dict report_to_dict(const ConcentrationReport& r) {
  py::dict d;
  d["statistic"] = r.statistic_name;
  d["trials"] = r.trials;
  d["observed"] = r.observed;
  d["bound"] = r.bound;
  d["envelopes"] = r.envelopes;
  d["violation_rate"] = r.violation_rate;
  d["scaling_slope"] = r.scaling_slope;
  d["discarded"] = r.discarded;
  d["median"] = r.observed.empty() ? py::none() : py::cast(r.median());
  return d;
}

}  // namespace

PYBIND11_MODULE(_wfcore, m) {
  m.doc() = "Gradient descent with random initialization for phase retrieval";
  m.attr("__version__") = kVersion;

  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<UnsupportedConvention>(m, "UnsupportedConvention", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::enum_<DesignKind>(m, "DesignKind")
      .value("Gaussian", DesignKind::Gaussian)
      .value("Rademacher", DesignKind::Rademacher);
  py::enum_<InitMode>(m, "InitMode")
      .value("GaussianRandom", InitMode::GaussianRandom)
      .value("DataDependent", InitMode::DataDependent)
      .value("Fixed", InitMode::Fixed);

  py::class_<Signal>(m, "Signal")
      .def(py::init<Vector>(), py::arg("entries"))
      .def_static("basis", &Signal::basis, py::arg("n"), py::arg("norm") = 1.0)
      .def_static("random", &Signal::random, py::arg("n"), py::arg("seed"), py::arg("norm") = 1.0)
      .def_property_readonly("entries", &Signal::entries)
      .def_property_readonly("norm", &Signal::norm)
      .def("__len__", &Signal::size);

  py::class_<DesignEnsemble>(m, "DesignEnsemble")
      .def(py::init<RowMatrix, DesignKind, Vector, std::uint64_t, std::uint64_t>(), py::arg("rows"),
           py::arg("kind"), py::arg("measurements"), py::arg("seed") = 0, py::arg("stream_id") = 0)
      .def_property_readonly("rows", &DesignEnsemble::rows)
      .def_property_readonly("measurements", &DesignEnsemble::measurements)
      .def_property_readonly("kind", &DesignEnsemble::kind)
      .def_property_readonly("m", &DesignEnsemble::m)
      .def_property_readonly("n", &DesignEnsemble::n);

  m.def("generate_design", &generate_design, py::arg("n"), py::arg("m"), py::arg("kind"),
        py::arg("signal"), py::arg("seed"), py::arg("stream_id") = 1);
  m.def("measure", &measure, py::arg("rows"), py::arg("signal"));

  m.def("loss", &loss, py::arg("design"), py::arg("x"));
  m.def("gradient", &gradient, py::arg("design"), py::arg("x"));
  m.def("hessian", &hessian, py::arg("design"), py::arg("x"));
  m.def("loo_gradient", &loo_gradient, py::arg("design"), py::arg("x"), py::arg("l"));
  m.def("population_gradient", &population_gradient, py::arg("x"), py::arg("signal"));
  m.def("population_loss", &population_loss, py::arg("x"), py::arg("signal"));
  m.def(
      "fluctuation",
      [](const DesignEnsemble& d, const Vector& x, const Signal& s, bool terms) {
        const auto r = fluctuation(d, x, s, terms ? ResidualTerms::Compute : ResidualTerms::Skip);
        py::dict out;
        out["r1"] = r.r1;
        out["fluctuation"] = r.fluctuation;
        if (r.has_terms) {
          out["i1"] = r.i1;
          out["i2"] = r.i2;
          out["i3"] = r.i3;
          out["i4"] = r.i4;
        }
        return out;
      },
      py::arg("design"), py::arg("x"), py::arg("signal"), py::arg("terms") = true);

  m.def("random_init", &random_init, py::arg("n"), py::arg("signal_norm"), py::arg("seed"));
  m.def("data_dependent_init", &data_dependent_init, py::arg("design"), py::arg("seed"));
  m.def("dist", &dist, py::arg("x"), py::arg("signal"));

  m.def(
      "run",
      [](const DesignEnsemble& design, const Signal& signal, const Vector& x0, double eta,
         std::size_t max_iters, double tol, std::size_t record_every, bool keep_snapshots) {
        RunConfig cfg;
        cfg.n = design.n();
        cfg.m = design.m();
        cfg.eta = eta;
        cfg.max_iters = max_iters;
        cfg.tol = tol;
        cfg.record_every = record_every;
        cfg.keep_snapshots = keep_snapshots;
        TrajectoryRecord rec;
        {
          py::gil_scoped_release release;
          rec = run(cfg, design, signal, x0);
          if (record_every == 1) attach_stage_times(rec, StageConstants{}, cfg.m);
        }
        return record_to_dict(rec);
      },
      py::arg("design"), py::arg("signal"), py::arg("x0"), py::arg("eta") = 0.1,
      py::arg("max_iters") = 500, py::arg("tol") = 1e-5, py::arg("record_every") = 1,
      py::arg("keep_snapshots") = false);
  m.def(
      "run_population",
      [](const Vector& x0, const Signal& signal, double eta, std::size_t max_iters, double tol) {
        return record_to_dict(run_population(x0, signal, eta, max_iters, tol));
      },
      py::arg("x0"), py::arg("signal"), py::arg("eta") = 0.1, py::arg("max_iters") = 500,
      py::arg("tol") = 1e-5);

  m.def(
      "population_step",
      [](double alpha, double beta, double eta) {
        const auto p = population_step({alpha, beta}, eta);
        return std::pair{p.alpha, p.beta};
      },
      py::arg("alpha"), py::arg("beta"), py::arg("eta"));
  m.def(
      "population_run",
      [](double alpha0, double beta0, double eta, std::size_t max_iters, double gamma) {
        const auto tr = population_run({alpha0, beta0}, eta, max_iters, gamma);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : tr.points) pts.emplace_back(p.alpha, p.beta);
        return py::dict(py::arg("points") = pts, py::arg("t_gamma") = tr.stage_times.t_gamma);
      },
      py::arg("alpha0"), py::arg("beta0"), py::arg("eta") = 0.1, py::arg("max_iters") = 10000,
      py::arg("gamma") = 0.1);
  m.def(
      "extract_perturbations",
      [](const std::vector<std::pair<double, double>>& points, double eta) {
        std::vector<SEPoint> pts;
        for (const auto& [a, b] : points) pts.push_back({a, b});
        const auto tr = extract_perturbations(pts, eta);
        return py::dict(py::arg("zetas") = tr.zetas, py::arg("rhos") = tr.rhos);
      },
      py::arg("points"), py::arg("eta"));

  m.def(
      "run_bundle",
      [](const DesignEnsemble& design, const Signal& signal, const Vector& x0,
         const std::vector<std::size_t>& loo_indices, std::uint64_t flips_seed, double eta,
         std::size_t max_iters, bool matching_flips) {
        RunConfig cfg;
        cfg.n = design.n();
        cfg.m = design.m();
        cfg.eta = eta;
        cfg.max_iters = max_iters;
        const auto bundle = run_bundle(cfg, design, signal, x0, loo_indices, flips_seed,
                                       matching_flips ? FlipMode::Matching : FlipMode::Random);
        const auto c = difference_curves(bundle, signal);
        py::dict d;
        d["t"] = c.t;
        d["d_sgn"] = c.d_sgn;
        if (c.has_loo) {
          d["d_loo"] = c.d_loo;
          d["d_loo_par"] = c.d_loo_par;
          d["d_double"] = c.d_double;
        }
        d["base"] = record_to_dict(bundle.base);
        return d;
      },
      py::arg("design"), py::arg("signal"), py::arg("x0"), py::arg("loo_indices"),
      py::arg("flips_seed") = 0, py::arg("eta") = 0.1, py::arg("max_iters") = 500,
      py::arg("matching_flips") = false);
  m.def("sample_loo_indices", &sample_loo_indices, py::arg("m"), py::arg("count"), py::arg("seed"));

  m.def(
      "check_design_maxima",
      [](std::size_t n, std::size_t mm, std::size_t trials, std::uint64_t seed) {
        const auto r = check_design_maxima(n, mm, trials, seed);
        return py::dict(py::arg("first_entry") = report_to_dict(r.first_entry),
                        py::arg("row_norm") = report_to_dict(r.row_norm));
      },
      py::arg("n"), py::arg("m"), py::arg("trials"), py::arg("seed") = 0);
  m.def(
      "check_hessian_concentration",
      [](std::size_t n, const std::vector<std::size_t>& ms, std::size_t trials, std::uint64_t seed) {
        const auto r = check_hessian_concentration(n, ms, trials, seed);
        py::list per;
        for (const auto& p : r.per_m) per.append(report_to_dict(p));
        return py::dict(py::arg("m_values") = r.m_values, py::arg("per_m") = per,
                        py::arg("slope") = r.slope);
      },
      py::arg("n"), py::arg("m_list"), py::arg("trials"), py::arg("seed") = 0);
  m.def(
      "check_local_smoothness",
      [](std::size_t n, std::size_t mm, std::size_t samples, std::uint64_t seed) {
        return report_to_dict(check_local_smoothness(n, mm, samples, seed));
      },
      py::arg("n"), py::arg("m"), py::arg("z_samples"), py::arg("seed") = 0);
  m.def(
      "check_polynomial_concentration",
      [](int which, std::size_t n, std::size_t mm, std::size_t trials, std::uint64_t seed,
         double epsilon) {
        const auto r = check_polynomial_concentration(which, n, mm, trials, seed, epsilon);
        return py::dict(py::arg("deviations") = report_to_dict(r.deviations),
                        py::arg("normalized_means") = r.normalized_means);
      },
      py::arg("case"), py::arg("n"), py::arg("m"), py::arg("trials"), py::arg("seed") = 0,
      py::arg("epsilon") = 0.05);

  m.def(
      "run_experiment",
      [](const std::string& figure, const std::vector<std::uint64_t>& seeds,
         const std::filesystem::path& output_dir, std::optional<std::size_t> n,
         std::optional<std::size_t> max_iters) {
        ExperimentSpec spec;
        spec.figure = parse_figure_id(figure);
        spec.seeds = seeds;
        spec.output_dir = output_dir;
        spec.overrides.n = n;
        spec.overrides.max_iters = max_iters;
        py::gil_scoped_release release;
        return run_experiment(spec);
      },
      py::arg("figure"), py::arg("seeds") = std::vector<std::uint64_t>{0},
      py::arg("output_dir") = ".", py::arg("n") = py::none(), py::arg("max_iters") = py::none());
}
