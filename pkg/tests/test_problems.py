import numpy as np
import pytest

from odeforms import conditions as C
from odeforms import grids, problems
from odeforms.net import EvalTriple


def exact_triples(p, x):
    if p.is_system:
        v, d1 = p.exact(x), p.exact_d1(x)
        return [EvalTriple(v[i], d1[i], np.zeros_like(x)) for i in range(p.n_components)]
    d2 = p.exact_d2(x) if p.exact_d2 is not None else np.zeros_like(x)
    return EvalTriple(p.exact(x), p.exact_d1(x), d2)


def test_stiff_first_order_residual_at_rest():
    p = problems.registry("tp1")
    r = p.residual(np.asarray(0.0), EvalTriple(0.0, 0.0, 0.0))
    assert float(r) == -50.0


def test_nonlinear_second_order_residual_vanishes_on_exact():
    p = problems.registry("tp2", "D-D")
    x = np.linspace(0, 9.5, 33)
    r = p.residual(x, exact_triples(p, x))
    assert np.max(np.abs(r)) < 1e-12


def test_bessel_residual_vanishes_at_origin():
    p = problems.registry("tp3")
    r = p.residual(np.asarray(0.0), EvalTriple(0.77, -0.3, 1.9))
    assert float(r) == 0.0


def test_exact_values():
    assert float(problems.registry("tp1").exact(0.0)) == pytest.approx(0.15, abs=1e-15)
    p2 = problems.registry("tp2", "D-D")
    assert float(p2.exact(0.0)) == pytest.approx(0.1, abs=1e-15)
    assert float(p2.exact(9.5)) == pytest.approx(2.0, abs=1e-14)
    p4 = problems.registry("tp4")
    v = p4.exact(np.asarray(0.0))
    assert float(v[0]) == 0.0 and float(v[1]) == 1.0


def test_registry_condition_specs():
    spec = problems.registry("tp2", "D-D").conditions
    assert isinstance(spec, C.Dirichlet)
    assert (spec.a, spec.b) == (0.0, 9.5)
    assert spec.ya == pytest.approx(0.1) and spec.yb == pytest.approx(2.0)

    rob = problems.registry("tp2", "R").conditions
    assert isinstance(rob, C.Robin)
    assert (rob.lam, rob.mu, rob.gam, rob.delta) == (1.0, 1.0, 1.0, 1.0)
    assert rob.ya == pytest.approx(0.11, abs=1e-15)
    assert rob.yb == pytest.approx(6.0, abs=1e-13)

    tp5 = problems.registry("tp5").conditions
    assert isinstance(tp5, C.SystemInitial)
    assert tp5.values[0] == pytest.approx(4.0 / 3.0 * np.e, abs=1e-12)
    assert tp5.values[1] == 0.0


def test_registry_rejects_unknown():
    with pytest.raises(ValueError):
        problems.registry("tp9")
    with pytest.raises(ValueError):
        problems.registry("tp2", "X-X")
    with pytest.raises(ValueError):
        problems.registry("tp1", "R")


def test_exact_solutions_zero_residuals_on_test_grid():
    # stiff terms amplify rounding, hence the looser gate for tp1/tp5
    for name, tol in [("tp1", 1e-5), ("tp2", 1e-7), ("tp3", 1e-7),
                      ("tp4", 1e-7), ("tp5", 1e-5), ("tp6", 1e-7)]:
        p = problems.registry(name)
        x = grids.test_grid(*p.domain).points
        r = p.residual(x, exact_triples(p, x))
        assert np.max(np.abs(r)) <= tol, name


def test_prescribed_values_match_exact_at_endpoints():
    for name in problems.available():
        for variant in problems.available()[name]:
            p = problems.registry(name, variant)
            specs = p.component_specs() or (p.conditions,)
            for ci, spec in enumerate(specs):
                if spec is None:
                    continue
                pts = C.condition_points(spec)
                got = C.condition_values(spec, [exact_component_triple(p, ci, x) for x in pts])
                for g, w in zip(got, C.prescribed_values(spec)):
                    assert abs(float(g) - w) <= 1e-12, (name, variant, ci)


def exact_component_triple(p, ci, x):
    x = np.asarray(x, dtype=float)
    if p.is_system:
        return EvalTriple(p.exact(x)[ci], p.exact_d1(x)[ci], np.zeros_like(x))
    d2 = p.exact_d2(x) if p.exact_d2 is not None else np.zeros_like(x)
    return EvalTriple(p.exact(x), p.exact_d1(x), d2)


def test_tp6_reuses_tp2_solution_components():
    p = problems.registry("tp6", "D-D")
    x = np.linspace(0, 9.5, 11)
    v = p.exact(x)
    assert np.allclose(v[0], 1.0 / (10.0 - x), atol=1e-15)
    assert np.allclose(v[1], 1.0 / (10.0 - x) ** 2, atol=1e-15)


def test_component_specs_decompose_system_initial():
    p = problems.registry("tp4")
    specs = p.component_specs()
    assert len(specs) == 2
    assert all(isinstance(s, C.InitialValue) for s in specs)
    assert specs[0].value == 0.0 and specs[1].value == 1.0
    assert problems.registry("tp1").component_specs() is None
