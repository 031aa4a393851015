import math

import numpy as np
import pytest

import wirtinger as wf


def small_problem(n=20, m=200, seed=1):
    signal = wf.Signal.basis(n)
    design = wf.generate_design(n, m, wf.DesignKind.Gaussian, signal, seed)
    return signal, design


def test_version():
    assert wf.__version__.count(".") == 2


def test_single_sample_values():
    rows = np.array([[1.0, 0.0]])
    design = wf.DesignEnsemble(rows, wf.DesignKind.Gaussian, np.array([1.0]))
    x = np.array([2.0, 0.0])
    assert wf.loss(design, x) == pytest.approx(2.25)
    np.testing.assert_allclose(wf.gradient(design, x), [6.0, 0.0])
    np.testing.assert_allclose(wf.hessian(design, x), [[11.0, 0.0], [0.0, 0.0]])


def test_gradient_matches_numpy():
    signal, design = small_problem()
    a = np.asarray(design.rows)
    y = np.asarray(design.measurements)
    x = np.linspace(-0.5, 0.5, 20)
    p = a @ x
    expected = a.T @ ((p**2 - y) * p) / a.shape[0]
    np.testing.assert_allclose(wf.gradient(design, x), expected, rtol=1e-12)
    np.testing.assert_allclose(y, a[:, 0] ** 2)


def test_run_converges():
    signal, design = small_problem(n=50, m=500, seed=3)
    x0 = wf.random_init(50, 1.0, 3)
    rec = wf.run(design, signal, x0)
    assert rec["converged"]
    assert rec["dist_rel"][-1] <= 1e-5
    assert rec["t"][0] == 0
    assert rec["stage_times"]["t_gamma"] is not None


def test_population_dynamics():
    a, b = wf.population_step(0.01, 1.0, 0.1)
    assert a == pytest.approx(0.0099997, abs=1e-12)
    assert b == pytest.approx(0.79997, abs=1e-12)
    n = 1000
    tr = wf.population_run(1 / math.sqrt(n * math.log(n)), 1.0)
    assert tr["t_gamma"] is not None and tr["t_gamma"] <= 60 * math.log(n)
    ex = wf.extract_perturbations(tr["points"], 0.1)
    assert max(abs(z) for z in ex["zetas"]) <= 1e-12


def test_divergence_raises():
    signal, design = small_problem()
    with pytest.raises(wf.DivergenceError):
        wf.run(design, signal, wf.random_init(20, 1.0, 1), eta=5.0)


def test_residual_terms_need_first_axis():
    signal = wf.Signal.random(6, 1)
    design = wf.generate_design(6, 60, wf.DesignKind.Gaussian, signal, 1)
    with pytest.raises(wf.UnsupportedConvention):
        wf.fluctuation(design, np.ones(6), signal)
    r = wf.fluctuation(design, np.ones(6), signal, terms=False)
    assert "i1" not in r


def test_bundle_curves_start_at_zero():
    signal, design = small_problem(n=30, m=300, seed=2)
    out = wf.run_bundle(design, signal, wf.random_init(30, 1.0, 2), [0, 5])
    for key in ("d_loo", "d_loo_par", "d_sgn", "d_double"):
        assert out[key][0] == 0.0


def test_experiment_writes_files(tmp_path):
    csvs = wf.run_experiment("custom", [0], str(tmp_path), n=20, max_iters=3)
    assert len(csvs) == 1
    lines = open(csvs[0]).read().splitlines()
    assert lines[0].startswith("t,dist_rel,alpha,beta")
    assert len(lines) == 5
    assert (tmp_path / "manifest.json").exists()


def test_design_maxima_report():
    r = wf.check_design_maxima(10, 100, 5, 0)
    assert r["first_entry"]["trials"] == 5
    assert len(r["row_norm"]["observed"]) == 5
