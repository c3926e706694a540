import numpy as np
import pytest

from odeforms import conditions as C
from odeforms import net


def random_match(spec, rng, k=4):
    arity = C.match_arity(spec)
    t1 = net.random_init(k, rng)
    t2 = net.random_init(k, rng) if arity == 2 else None
    return C.MatchParams(t1, t2)


def zero_match(spec, k=3):
    z = net.NetworkParams(np.zeros(3 * k))
    return C.MatchParams(z, z if C.match_arity(spec) == 2 else None)


def fd_check(spec, mp, x, tol=1e-6, h=1e-5):
    t = C.match_eval(spec, mp, x)
    vp = float(C.match_eval(spec, mp, x + h).value)
    vm = float(C.match_eval(spec, mp, x - h).value)
    d1_fd = (vp - vm) / (2 * h)
    dp = float(C.match_eval(spec, mp, x + h).d1)
    dm = float(C.match_eval(spec, mp, x - h).d1)
    d2_fd = (dp - dm) / (2 * h)
    assert abs(float(t.d1) - d1_fd) / max(1.0, abs(d1_fd)) < tol
    assert abs(float(t.d2) - d2_fd) / max(1.0, abs(d2_fd)) < tol


def all_specs(rng):
    a, b = 0.0, float(rng.uniform(0.8, 4.0))
    xa, xb = (float(v) for v in rng.uniform(-3, 3, 2))
    coeffs = rng.uniform(0.5, 2.0, 4) * rng.choice([-1.0, 1.0], 4)
    lam, mu, gam, delta = (float(c) for c in coeffs)
    robin = C.Robin(a, b, lam, mu, gam, delta, xa, xb)
    try:
        robin.ensure_matchable()
    except ValueError:
        robin = C.Robin(a, b, 1.0, 1.0, 1.0, 1.0, xa, xb)
    return [
        C.InitialValue(a, xa),
        C.Dirichlet(a, b, xa, xb),
        C.MixedDN(a, b, xa, xb),
        C.Neumann(a, b, xa, xb),
        C.Cauchy(a, xa, xb),
        robin,
    ]


# ---------------------------------------------------------------------------
# match_eval
# ---------------------------------------------------------------------------

def test_dirichlet_zero_networks_reduce_to_linear_interpolation():
    spec = C.Dirichlet(0.0, 1.0, 0.0, 2.0)
    t = C.match_eval(spec, zero_match(spec), 0.5)
    assert float(t.value) == pytest.approx(1.0, abs=1e-14)


def test_cauchy_match_pins_value_and_slope():
    rng = np.random.default_rng(1)
    v = 0.6180339
    spec = C.Cauchy(0.0, 0.15, v)
    mp = random_match(spec, rng)
    t = C.match_eval(spec, mp, 0.0)
    assert float(t.value) == pytest.approx(0.15, abs=1e-10)
    assert float(t.d1) == pytest.approx(v, abs=1e-10)


def test_neumann_match_pins_both_slopes():
    rng = np.random.default_rng(2)
    spec = C.Neumann(0.0, 9.5, 0.01, 4.0)
    mp = random_match(spec, rng)
    assert float(C.match_eval(spec, mp, 0.0).d1) == pytest.approx(0.01, abs=1e-9)
    assert float(C.match_eval(spec, mp, 9.5).d1) == pytest.approx(4.0, abs=1e-9)


def test_exact_satisfaction_family_random_draws():
    rng = np.random.default_rng(20240817)
    for _ in range(1000):
        for spec in all_specs(rng):
            mp = random_match(spec, rng, k=int(rng.integers(1, 5)))
            pts = C.condition_points(spec)
            got = C.condition_values(spec, [C.match_eval(spec, mp, p) for p in pts])
            for g, w in zip(got, C.prescribed_values(spec)):
                assert abs(float(g) - w) <= 1e-9


def test_match_derivatives_against_finite_differences():
    rng = np.random.default_rng(3)
    for _ in range(40):
        for spec in all_specs(rng):
            mp = random_match(spec, rng)
            fd_check(spec, mp, float(rng.uniform(0.1, 0.7)))


def test_linearity_in_prescribed_values():
    rng = np.random.default_rng(4)
    c = 2.75
    for spec in all_specs(rng):
        mp = random_match(spec, rng)
        scaled = C.homogeneous(spec)
        fields = {
            C.InitialValue: ("value",),
            C.Cauchy: ("value", "slope"),
            C.Dirichlet: ("ya", "yb"),
            C.MixedDN: ("ya", "yb_prime"),
            C.Neumann: ("ya_prime", "yb_prime"),
            C.Robin: ("ya", "yb"),
        }[type(spec)]
        from dataclasses import replace
        scaled = replace(spec, **{f: c * getattr(spec, f) for f in fields})
        x = np.linspace(spec.a if hasattr(spec, "a") else spec.x0, 0.9, 7)
        t1 = C.match_eval(spec, mp, x)
        t2 = C.match_eval(scaled, mp, x)
        for u, v in zip(t1, t2):
            assert np.allclose(c * u, v, rtol=1e-12, atol=1e-12)


def test_homogeneous_zeroes_all_prescribed_values():
    rng = np.random.default_rng(5)
    for spec in all_specs(rng):
        assert all(v == 0.0 for v in C.prescribed_values(C.homogeneous(spec)))


def test_match_arity_enforced():
    spec = C.Dirichlet(0.0, 1.0, 1.0, 2.0)
    single = C.MatchParams(net.random_init(2, np.random.default_rng(0)))
    with pytest.raises(ValueError):
        C.match_eval(spec, single, 0.5)


# ---------------------------------------------------------------------------
# Robin coefficients
# ---------------------------------------------------------------------------

def test_robin_rejects_zero_mu_or_delta():
    spec = C.Robin(0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        C.robin_coeffs(spec, zero_match(spec))


def test_robin_zero_network_f1():
    # N == 0 makes the F1 numerator delta*1; D = 1*(2-9.5) + 1*(2+9.5) = 4
    spec = C.Robin(0.0, 9.5, 1.0, 1.0, 1.0, 1.0, 0.11, 6.0)
    coeffs = C.robin_coeffs(spec, zero_match(spec))
    assert coeffs.f1 == pytest.approx(0.25, abs=1e-15)


def test_robin_coefficients_enforce_their_identities():
    rng = np.random.default_rng(6)
    done = 0
    while done < 1000:
        a, b = 0.0, float(rng.uniform(0.8, 4.0))
        lam, mu, gam, delta = (float(v) for v in rng.uniform(0.5, 2.0, 4) * rng.choice([-1.0, 1.0], 4))
        spec = C.Robin(a, b, lam, mu, gam, delta, 1.0, 1.0)
        try:
            spec.ensure_matchable()
        except ValueError:
            continue
        mp = random_match(spec, rng, k=3)
        basis_a, basis_b = C.match_basis(spec, mp, np.array([a, b]))
        f_a = (basis_a.value[0], basis_a.d1[0])
        f_b = (basis_a.value[1], basis_a.d1[1])
        h_a = (basis_b.value[0], basis_b.d1[0])
        h_b = (basis_b.value[1], basis_b.d1[1])
        assert abs(lam * f_a[0] + mu * f_a[1] - 1.0) <= 1e-9
        assert abs(gam * f_b[0] + delta * f_b[1]) <= 1e-9
        assert abs(lam * h_a[0] + mu * h_a[1]) <= 1e-9
        assert abs(gam * h_b[0] + delta * h_b[1] - 1.0) <= 1e-9
        done += 1


# ---------------------------------------------------------------------------
# Rigid operator and reductions
# ---------------------------------------------------------------------------

def test_rigid_match_endpoint_values():
    spec = C.Dirichlet(0.0, 1.0, 1.0, 0.0)
    assert float(C.rigid_match_eval(spec, 0.0).value) == 1.0
    spec = C.Dirichlet(0.0, 1.0, 0.0, 1.0)
    t = C.rigid_match_eval(spec, 0.5)
    assert float(t.value) == pytest.approx(0.25, abs=1e-15)
    assert float(t.d1) == pytest.approx(1.0, abs=1e-15)
    spec = C.Dirichlet(0.0, 1.0, 1.0, 1.0)
    assert float(C.rigid_match_eval(spec, 0.5).value) == pytest.approx(0.5, abs=1e-15)


def test_reduce_mixed_zero_network():
    z = net.NetworkParams(np.zeros(9))
    assert C.reduce_mixed_to_dirichlet(z, 0.0, 1.0, 2.0) == pytest.approx(-1.0, abs=1e-15)
    assert C.reduce_mixed_to_dirichlet(z, 0.0, 1.0, 0.0) == 0.0


def test_reduce_mixed_recovers_slope_at_a():
    # assemble the rigid quadratic trial with the substituted psi(a) and
    # check the derivative condition it was built to satisfy
    rng = np.random.default_rng(7)
    a, b, slope = 0.0, 2.5, -1.3
    for _ in range(25):
        w = net.random_init(4, rng)
        psi_a = C.reduce_mixed_to_dirichlet(w, a, b, slope)
        psi_b = 0.7
        ra, rb = C.rigid_basis(a, b, np.asarray(a))
        e = net.eval(w, a)
        ca = psi_a - float(net.eval(w, a).value)
        cb = psi_b - float(net.eval(w, b).value)
        d1_at_a = float(e.d1) + ca * float(ra.d1) + cb * float(rb.d1)
        assert abs(d1_at_a - slope) <= 1e-9


def test_reduce_robin_dirichlet_degenerate_case():
    z = net.NetworkParams(np.zeros(6))
    spec = C.Robin(0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 3.0, 5.0)  # mu = delta = 0
    psi_a, psi_b = C.reduce_robin_to_dirichlet(z, spec)
    assert psi_a == pytest.approx(3.0, abs=1e-15)
    assert psi_b == pytest.approx(5.0, abs=1e-15)


def test_reduce_robin_zero_denominator_rejected():
    z = net.NetworkParams(np.zeros(6))
    spec = C.Robin(0.0, 2.0, 1.0, 1.0, 1.0, 1.0, 3.0, 1.0)  # (b-a)*lam - 2*mu = 0
    with pytest.raises(ValueError):
        C.reduce_robin_to_dirichlet(z, spec)


def test_reduce_robin_satisfies_both_conditions():
    rng = np.random.default_rng(8)
    a, b = 0.0, 9.5
    spec = C.Robin(a, b, 1.0, 1.0, 1.0, 1.0, 0.11, 6.0)
    for _ in range(25):
        w = net.random_init(5, rng)
        psi_a, psi_b = C.reduce_robin_to_dirichlet(w, spec)
        x = np.array([a, b])
        ra, rb = C.rigid_basis(a, b, x)
        t = net.eval(w, x)
        ca = psi_a - float(net.eval(w, a).value)
        cb = psi_b - float(net.eval(w, b).value)
        val = t.value + ca * ra.value + cb * rb.value
        d1 = t.d1 + ca * ra.d1 + cb * rb.d1
        assert abs(1.0 * val[0] + 1.0 * d1[0] - 0.11) <= 1e-9
        assert abs(1.0 * val[1] + 1.0 * d1[1] - 6.0) <= 1e-9


def test_spec_validation():
    with pytest.raises(ValueError):
        C.Dirichlet(1.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        C.SystemInitial(0.0, ())
