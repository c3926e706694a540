import numpy as np
import pytest

from odeforms import optimize


def rosenbrock(v):
    return (1.0 - v[0]) ** 2 + 100.0 * (v[1] - v[0] ** 2) ** 2


def sphere_shifted(v):
    return float(np.sum((v - 1.0) ** 2))


# ---------------------------------------------------------------------------
# fd_gradient
# ---------------------------------------------------------------------------

def test_fd_gradient_univariate():
    g = optimize.fd_gradient(lambda v: v[0] ** 2, np.array([3.0]))
    assert g[0] == pytest.approx(6.0, abs=1e-6)


def test_fd_gradient_bilinear():
    g = optimize.fd_gradient(lambda v: v[0] * v[1], np.array([2.0, 5.0]))
    assert g[0] == pytest.approx(5.0, abs=1e-6)
    assert g[1] == pytest.approx(2.0, abs=1e-6)


def test_fd_gradient_richardson_self_consistency_on_training_error():
    # half-step estimate agrees to ~1e-4 relative on the collocation error
    import odeforms as of
    from odeforms import grids
    from odeforms.train import make_objective

    p = of.registry("tp1")
    g = grids.chebyshev(*p.domain, 20)
    template = of.build_form(p, of.AUGMENTED, 12, np.random.default_rng(3))
    obj = make_objective(p, template, g)
    x = of.split_params(template)
    g1 = optimize.fd_gradient(obj, x, optimize.DEFAULT_FD_STEP)
    g2 = optimize.fd_gradient(obj, x, optimize.DEFAULT_FD_STEP / 2.0)
    scale = np.maximum(1.0, np.abs(g2))
    assert np.max(np.abs(g1 - g2) / scale) < 1e-4


# ---------------------------------------------------------------------------
# pattern search
# ---------------------------------------------------------------------------

def test_pattern_search_separable_quadratic():
    res = optimize.pattern_search(sphere_shifted, np.zeros(3), optimize.OptConfig(budget=20000))
    assert np.allclose(res.x_best, 1.0, atol=1e-6)


def test_pattern_search_budget_one_returns_start():
    res = optimize.pattern_search(sphere_shifted, np.zeros(3), optimize.OptConfig(budget=1))
    assert res.evals == 1
    assert np.array_equal(res.x_best, np.zeros(3))
    assert res.reason == optimize.BUDGET


def test_pattern_search_nonsmooth_absolute_value():
    res = optimize.pattern_search(lambda v: abs(v[0]), np.array([5.0]),
                                  optimize.OptConfig(budget=20000))
    assert res.f_best <= 1e-6


# ---------------------------------------------------------------------------
# Nelder-Mead
# ---------------------------------------------------------------------------

def test_nelder_mead_quadratic():
    res = optimize.nelder_mead(sphere_shifted, np.zeros(2), optimize.OptConfig(budget=5000))
    assert np.allclose(res.x_best, 1.0, atol=1e-6)


def test_nelder_mead_rosenbrock_within_budget():
    res = optimize.nelder_mead(rosenbrock, np.array([-1.2, 1.0]), optimize.OptConfig(budget=2000))
    assert res.f_best <= 1e-8
    assert res.evals <= 2000


def test_nelder_mead_one_dimensional():
    res = optimize.nelder_mead(lambda v: v[0] ** 2, np.array([3.0]),
                               optimize.OptConfig(budget=2000, f_tol=1e-14))
    assert abs(res.x_best[0]) <= 1e-6


# ---------------------------------------------------------------------------
# BFGS
# ---------------------------------------------------------------------------

def test_bfgs_quadratic_fast():
    res = optimize.bfgs(lambda v: float(v @ v), np.array([3.0, 4.0]),
                        optimize.OptConfig(budget=60))
    assert res.f_best <= 1e-12
    assert res.evals <= 60


def test_bfgs_rosenbrock():
    res = optimize.bfgs(rosenbrock, np.array([-1.2, 1.0]), optimize.OptConfig(budget=500))
    assert np.allclose(res.x_best, 1.0, atol=1e-5)
    assert res.evals <= 500


def test_bfgs_flat_objective_terminates():
    res = optimize.bfgs(lambda v: 7.5, np.zeros(4), optimize.OptConfig(budget=5000))
    assert res.f_best == 7.5
    assert res.converged
    assert res.reason in (optimize.FTOL, optimize.XTOL)


# ---------------------------------------------------------------------------
# Levenberg-Marquardt
# ---------------------------------------------------------------------------

def test_lm_linear_least_squares_exact():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(12, 4))
    target = rng.normal(size=12)
    res = optimize.levenberg_marquardt(lambda v: a @ v - target, np.zeros(4),
                                       optimize.OptConfig(budget=2000))
    lstsq = np.linalg.lstsq(a, target, rcond=None)[0]
    assert np.allclose(res.x_best, lstsq, atol=1e-6)


def test_lm_rosenbrock_residual_form():
    res_fn = lambda v: np.array([1.0 - v[0], 10.0 * (v[1] - v[0] ** 2)])
    res = optimize.levenberg_marquardt(res_fn, np.array([-1.2, 1.0]),
                                       optimize.OptConfig(budget=500))
    assert res.f_best <= 1e-12


# ---------------------------------------------------------------------------
# shared contracts
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("method", [optimize.pattern_search, optimize.nelder_mead, optimize.bfgs])
def test_budget_accounting_is_exact(method):
    calls = [0]

    def f(v):
        calls[0] += 1
        return rosenbrock(v)

    res = method(f, np.array([-1.2, 1.0]), optimize.OptConfig(budget=137))
    assert res.evals == calls[0]
    assert res.evals <= 137


@pytest.mark.parametrize("method", [optimize.pattern_search, optimize.nelder_mead, optimize.bfgs])
def test_determinism(method):
    cfg = optimize.OptConfig(budget=400)
    r1 = method(rosenbrock, np.array([-1.2, 1.0]), cfg)
    r2 = method(rosenbrock, np.array([-1.2, 1.0]), cfg)
    assert r1.f_best == r2.f_best
    assert np.array_equal(r1.x_best, r2.x_best)
    assert r1.evals == r2.evals


@pytest.mark.parametrize("method", [optimize.pattern_search, optimize.nelder_mead, optimize.bfgs])
def test_best_seen_is_returned(method):
    seen = []

    def f(v):
        val = rosenbrock(v)
        seen.append(val)
        return val

    res = method(f, np.array([-1.2, 1.0]), optimize.OptConfig(budget=300))
    assert res.f_best == min(seen)
    assert res.f_best == rosenbrock(res.x_best)


def test_pipeline_quadratic_dim36():
    # separable quadratic through the pattern -> bfgs chain
    f = lambda v: float(np.sum((v - 1.0) ** 2))
    r1 = optimize.pattern_search(f, np.zeros(36), optimize.OptConfig(budget=10000))
    r2 = optimize.bfgs(f, r1.x_best, optimize.OptConfig(budget=40000))
    assert min(r1.f_best, r2.f_best) <= 1e-10


def test_invalid_config_rejected():
    with pytest.raises(ValueError):
        optimize.OptConfig(budget=0)
    with pytest.raises(ValueError):
        optimize.OptConfig(f_tol=0.0)
    with pytest.raises(ValueError):
        optimize.OptConfig(x_tol=-1.0)
