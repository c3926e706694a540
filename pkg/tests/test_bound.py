import numpy as np
import pytest

import odeforms as of
from odeforms import bound as B
from odeforms import grids, trial
from odeforms.train import TrainConfig, condition_violation, error_nf, train
from odeforms.trial import join_params, split_params, trial_eval


def trained_tp1(budget=4000, seed=0, params=18):
    p = of.registry("tp1")
    g = grids.chebyshev(*p.domain, 20)
    template = trial.build_form(p, of.AUGMENTED, params, np.random.default_rng(0))
    tr = train(p, template, g, TrainConfig(budget=budget, seed=seed))
    return p, g, tr


def test_perturbation_is_zero_at_initialization():
    p, g, tr = trained_tp1()
    eta0 = B.perturbation_template(tr.form, 4, np.random.default_rng(1))
    t = trial_eval(eta0, np.linspace(0, 1.5, 50))
    assert np.max(np.abs(t.value)) <= 1e-14
    assert np.max(np.abs(t.d1)) <= 1e-14
    assert np.max(np.abs(t.d2)) <= 1e-14


def test_perturbed_trial_keeps_conditions():
    p, g, tr = trained_tp1()
    br = B.estimate_bound(p, tr, 4, g, grids.test_grid(*p.domain), budget=800)
    pert = B.perturbation_template(tr.form, 4, np.random.default_rng(2))
    # any gamma: perturbed value at the anchor equals the prescribed value
    rng = np.random.default_rng(3)
    for _ in range(30):
        eta = B._with_gamma(pert, rng.uniform(-2, 2, B._gamma(pert).size))
        v = float(trial_eval(tr.form, 0.0).value) + float(trial_eval(eta, 0.0).value)
        assert v == pytest.approx(0.15, abs=1e-9)
    # and for the actually trained eta too
    v = float(trial_eval(tr.form, 0.0).value) + float(trial_eval(br.eta_form, 0.0).value)
    assert v == pytest.approx(0.15, abs=1e-9)


def test_delta2_never_exceeds_s2():
    for seed in range(4):
        p, g, tr = trained_tp1(budget=1500, seed=seed)
        br = B.estimate_bound(p, tr, 3, g, grids.test_grid(*p.domain), budget=600, seed=seed)
        assert br.delta2 <= br.s2
        assert br.s2 == pytest.approx(error_nf(p, tr.form, g), rel=1e-15)


def test_amplification_factor_at_least_one():
    p, g, tr = trained_tp1()
    br = B.estimate_bound(p, tr, 4, g, grids.test_grid(*p.domain), budget=2000)
    if br.valid:
        assert np.all(br.bound_abs >= br.eta_abs)
        assert np.allclose(br.bound_abs * (1.0 - br.ratio), br.eta_abs, rtol=1e-12)


def test_bound_rejects_baseline_forms():
    p = of.registry("tp1")
    g = grids.chebyshev(*p.domain, 10)
    template = trial.build_form(p, trial.BASELINE, 12, np.random.default_rng(0))
    tr = train(p, template, g, TrainConfig(budget=200, seed=0))
    with pytest.raises(ValueError):
        B.estimate_bound(p, tr, 3, g, g, budget=100)


def test_bound_rejects_zero_budget():
    p, g, tr = trained_tp1(budget=500)
    with pytest.raises(ValueError):
        B.estimate_bound(p, tr, 3, g, g, budget=0)


def test_zero_output_init_structure():
    p = B.zero_output_init(5, np.random.default_rng(0))
    assert np.all(p.a == 0.0)
    assert np.all(np.abs(p.w) <= 1.0) and np.any(p.w != 0.0)


def test_system_perturbation_per_component():
    p = of.registry("tp4")
    g = grids.chebyshev(*p.domain, 25)
    template = trial.build_form(p, of.AUGMENTED, 60, np.random.default_rng(0))
    tr = train(p, template, g, TrainConfig(budget=2000, seed=0))
    br = B.estimate_bound(p, tr, 3, g, grids.test_grid(*p.domain), budget=800)
    assert br.eta_abs.shape == (2, 1000)
    assert br.delta2 <= br.s2
    # conditions survive the perturbation on every component
    t = trial.system_trial_eval(tr.form, 0.0)
    e = trial.system_trial_eval(br.eta_form, 0.0)
    assert float(t[0].value) + float(e[0].value) == pytest.approx(0.0, abs=1e-9)
    assert float(t[1].value) + float(e[1].value) == pytest.approx(1.0, abs=1e-9)


def test_bound_deterministic():
    p, g, tr = trained_tp1(budget=1200)
    b1 = B.estimate_bound(p, tr, 3, g, grids.test_grid(*p.domain), budget=500, seed=7)
    b2 = B.estimate_bound(p, tr, 3, g, grids.test_grid(*p.domain), budget=500, seed=7)
    assert b1.s2 == b2.s2 and b1.delta2 == b2.delta2
    assert np.array_equal(b1.eta_abs, b2.eta_abs)
