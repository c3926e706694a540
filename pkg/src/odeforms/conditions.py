"""Condition specifications and parametric condition-matching operators.

Every condition type comes with a family of basis functions Phi_j(x) such
that the matching term is A(x) = sum_j xi_j * Phi_j(x), where the xi_j are
the prescribed condition values.  The basis is built from small networks
plus polynomial scaffolding and is crafted so that applying the condition
functionals to A reproduces the xi exactly for *any* network parameters.
The same basis evaluated with a function's own condition values gives the
projection P_x f, hence G = (1 - P_x) N needs no second formula path.

All evaluations return `EvalTriple`s (value, d1, d2) computed analytically
by the chain rule; x may be a scalar or a 1-D array.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Union

import numpy as np

from . import net
from .net import EvalTriple, NetworkParams

__all__ = [
    "InitialValue",
    "Dirichlet",
    "MixedDN",
    "Neumann",
    "Cauchy",
    "Robin",
    "SystemInitial",
    "ConditionSpec",
    "MatchParams",
    "RobinCoeffs",
    "match_arity",
    "match_eval",
    "match_basis",
    "condition_points",
    "condition_values",
    "prescribed_values",
    "homogeneous",
    "robin_coeffs",
    "rigid_match_eval",
    "rigid_basis",
    "reduce_mixed_to_dirichlet",
    "reduce_robin_to_dirichlet",
]


# ---------------------------------------------------------------------------
# Condition specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InitialValue:
    """psi(x0) = value; the single-condition spec for first-order problems.

    x0 is the anchor point, normally the left endpoint; anchoring at the
    right endpoint turns this into a terminal match (used by the reduced
    second-order system under mixed conditions).
    """

    x0: float
    value: float


@dataclass(frozen=True)
class Dirichlet:
    """psi(a) = ya, psi(b) = yb."""

    a: float
    b: float
    ya: float
    yb: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")


@dataclass(frozen=True)
class MixedDN:
    """psi(a) = ya (value), psi'(b) = yb_prime (slope)."""

    a: float
    b: float
    ya: float
    yb_prime: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")


@dataclass(frozen=True)
class Neumann:
    """psi'(a) = ya_prime, psi'(b) = yb_prime."""

    a: float
    b: float
    ya_prime: float
    yb_prime: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")


@dataclass(frozen=True)
class Cauchy:
    """psi(x0) = value and psi'(x0) = slope at the same anchor point."""

    x0: float
    value: float
    slope: float


@dataclass(frozen=True)
class Robin:
    """lam*psi(a) + mu*psi'(a) = ya and gam*psi(b) + delta*psi'(b) = yb.

    The parametric match divides by mu- and delta-containing terms;
    `ensure_matchable` rejects those degeneracies and is called whenever a
    parametric Robin match is constructed.  The reductive transformation
    has weaker requirements and accepts mu = 0 or delta = 0.
    """

    a: float
    b: float
    lam: float
    mu: float
    gam: float
    delta: float
    ya: float
    yb: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")

    @property
    def denominator(self) -> float:
        w = self.b - self.a
        return self.delta * (2.0 * self.mu - self.lam * w) + self.mu * (2.0 * self.delta + self.gam * w)

    def ensure_matchable(self):
        if self.mu == 0.0 or self.delta == 0.0:
            raise ValueError("parametric Robin match requires mu != 0 and delta != 0")
        if self.denominator == 0.0:
            raise ValueError("degenerate Robin coefficients: shared denominator is zero")


@dataclass(frozen=True)
class SystemInitial:
    """psi_i(x0) = values[i] for a first-order system of n equations."""

    x0: float
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) == 0:
            raise ValueError("system needs at least one component")


ConditionSpec = Union[InitialValue, Dirichlet, MixedDN, Neumann, Cauchy, Robin, SystemInitial]


class MatchParams(NamedTuple):
    """Networks behind a parametric match: one for first-order specs, two
    (same neuron count) for all second-order specs."""

    theta1: NetworkParams
    theta2: Optional[NetworkParams] = None


class RobinCoeffs(NamedTuple):
    f1: float
    f2: float
    h1: float
    h2: float


def match_arity(spec) -> int:
    """Number of match networks the spec's operator uses."""
    if isinstance(spec, InitialValue):
        return 1
    if isinstance(spec, (Dirichlet, MixedDN, Neumann, Cauchy, Robin)):
        return 2
    raise TypeError(f"no scalar matching operator for {type(spec).__name__}")


def _check_params(spec, mp: MatchParams):
    need = match_arity(spec)
    if need == 2 and mp.theta2 is None:
        raise ValueError(f"{type(spec).__name__} match needs two networks, got one")
    if need == 1 and mp.theta2 is not None:
        raise ValueError(f"{type(spec).__name__} match needs one network, got two")


# ---------------------------------------------------------------------------
# Basis construction per condition type
# ---------------------------------------------------------------------------

def _initial_basis(spec: InitialValue, mp: MatchParams, x) -> tuple:
    # Phi = F(x) - F(x0) + 1 with F a network: Phi(x0)=1 regardless of theta.
    t, (e0,) = net.eval_with_anchors(mp.theta1, x, (spec.x0,))
    return (EvalTriple(t.value - e0.value + 1.0, t.d1, t.d2),)


def _dirichlet_basis(spec: Dirichlet, mp: MatchParams, x) -> tuple:
    a, b = spec.a, spec.b
    la = (x - b) / (a - b)          # 1 at a, 0 at b
    lb = (x - a) / (b - a)          # 0 at a, 1 at b
    dla = 1.0 / (a - b)
    dlb = 1.0 / (b - a)
    out = []
    for theta in (mp.theta1, mp.theta2):
        t, (ea, eb) = net.eval_with_anchors(theta, x, (a, b))
        na, nb = ea.value, eb.value
        out.append((t.value - na * la - nb * lb, t.d1 - na * dla - nb * dlb, t.d2))
    (f, df, d2f), (h, dh, d2h) = out
    phi_a = EvalTriple(la + f, dla + df, d2f)
    phi_b = EvalTriple(lb + h, dlb + dh, d2h)
    return (phi_a, phi_b)


def _mixed_basis(spec: MixedDN, mp: MatchParams, x) -> tuple:
    a, b = spec.a, spec.b
    t1, (e1a, e1b) = net.eval_with_anchors(mp.theta1, x, (a, b))
    phi_a = EvalTriple(1.0 + t1.value - e1a.value - (x - a) * e1b.d1, t1.d1 - e1b.d1, t1.d2)
    t2, (e2a, e2b) = net.eval_with_anchors(mp.theta2, x, (a, b))
    phi_b = EvalTriple((x - a) + t2.value - e2a.value - (x - a) * e2b.d1,
                       1.0 + t2.d1 - e2b.d1, t2.d2)
    return (phi_a, phi_b)


def _neumann_basis(spec: Neumann, mp: MatchParams, x) -> tuple:
    a, b = spec.a, spec.b
    qa = (x - b) ** 2 / (2.0 * (a - b))     # qa' is 1 at a, 0 at b
    qb = (x - a) ** 2 / (2.0 * (b - a))     # qb' is 0 at a, 1 at b
    dqa = (x - b) / (a - b)
    dqb = (x - a) / (b - a)
    d2qa = 1.0 / (a - b)
    d2qb = 1.0 / (b - a)
    out = []
    for theta in (mp.theta1, mp.theta2):
        t, (ea, eb) = net.eval_with_anchors(theta, x, (a, b))
        da, db = ea.d1, eb.d1
        out.append((t.value - da * qa - db * qb,
                    t.d1 - da * dqa - db * dqb,
                    t.d2 - da * d2qa - db * d2qb))
    (f, df, d2f), (h, dh, d2h) = out
    phi_a = EvalTriple(qa + f, dqa + df, d2qa + d2f)
    phi_b = EvalTriple(qb + h, dqb + dh, d2qb + d2h)
    return (phi_a, phi_b)


def _cauchy_basis(spec: Cauchy, mp: MatchParams, x) -> tuple:
    x0 = spec.x0
    t1, (e1,) = net.eval_with_anchors(mp.theta1, x, (x0,))
    phi_a = EvalTriple(1.0 + t1.value - e1.value - (x - x0) * e1.d1, t1.d1 - e1.d1, t1.d2)
    t2, (e2,) = net.eval_with_anchors(mp.theta2, x, (x0,))
    phi_b = EvalTriple((x - x0) + t2.value - e2.value - (x - x0) * e2.d1,
                       1.0 + t2.d1 - e2.d1, t2.d2)
    return (phi_a, phi_b)


def _robin_fh(spec: Robin, e1a, e1b, e2a, e2b) -> RobinCoeffs:
    """Coefficients from endpoint triples of the two match networks: they
    solve the 2x2 systems forcing lam*F(a)+mu*F'(a)=1, gam*F(b)+delta*F'(b)=0
    and the mirrored pair for H."""
    lam, mu, gam, delta = spec.lam, spec.mu, spec.gam, spec.delta
    w = spec.b - spec.a
    dd = spec.denominator
    f1 = (delta * (1.0 - lam * e1a.value - mu * e1a.d1)
          - mu * (gam * e1b.value + delta * e1b.d1)) / dd
    f2 = (-gam * e1b.value - delta * e1b.d1 - (2.0 * delta + gam * w) * f1) / (delta * w)
    h1 = (delta * (-lam * e2a.value - mu * e2a.d1)
          + mu * (1.0 - gam * e2b.value - delta * e2b.d1)) / dd
    h2 = (1.0 - gam * e2b.value - delta * e2b.d1 - (2.0 * delta + gam * w) * h1) / (delta * w)
    return RobinCoeffs(float(f1), float(f2), float(h1), float(h2))


def robin_coeffs(spec: Robin, mp: MatchParams) -> RobinCoeffs:
    """Polynomial-correction coefficients of the Robin basis functions."""
    _check_params(spec, mp)
    spec.ensure_matchable()
    return _robin_fh(spec,
                     net.eval(mp.theta1, spec.a), net.eval(mp.theta1, spec.b),
                     net.eval(mp.theta2, spec.a), net.eval(mp.theta2, spec.b))


def _robin_basis(spec: Robin, mp: MatchParams, x) -> tuple:
    spec.ensure_matchable()
    a, b = spec.a, spec.b
    t1, (e1a, e1b) = net.eval_with_anchors(mp.theta1, x, (a, b))
    t2, (e2a, e2b) = net.eval_with_anchors(mp.theta2, x, (a, b))
    c = _robin_fh(spec, e1a, e1b, e2a, e2b)
    lin = 2.0 * x - a - b               # derivative 2, curvature 0
    quad = (x - a) * (x - b)            # derivative lin, curvature 2
    phi_a = EvalTriple(t1.value + c.f1 * lin + c.f2 * quad,
                       t1.d1 + 2.0 * c.f1 + c.f2 * lin,
                       t1.d2 + 2.0 * c.f2)
    phi_b = EvalTriple(t2.value + c.h1 * lin + c.h2 * quad,
                       t2.d1 + 2.0 * c.h1 + c.h2 * lin,
                       t2.d2 + 2.0 * c.h2)
    return (phi_a, phi_b)


_BASIS = {
    InitialValue: _initial_basis,
    Dirichlet: _dirichlet_basis,
    MixedDN: _mixed_basis,
    Neumann: _neumann_basis,
    Cauchy: _cauchy_basis,
    Robin: _robin_basis,
}


def match_basis(spec, mp: MatchParams, x) -> tuple:
    """Basis triples Phi_j(x) with A(x) = sum_j xi_j * Phi_j(x)."""
    _check_params(spec, mp)
    x = np.asarray(x, dtype=float)
    return _BASIS[type(spec)](spec, mp, x)


def match_eval(spec, mp: MatchParams, x) -> EvalTriple:
    """The matching term A(x) and its derivatives for the prescribed values."""
    basis = match_basis(spec, mp, x)
    xi = prescribed_values(spec)
    v = xi[0] * basis[0].value
    d1 = xi[0] * basis[0].d1
    d2 = xi[0] * basis[0].d2
    for q, phi in zip(xi[1:], basis[1:]):
        v = v + q * phi.value
        d1 = d1 + q * phi.d1
        d2 = d2 + q * phi.d2
    return EvalTriple(v, d1, d2)


# ---------------------------------------------------------------------------
# Condition functionals
# ---------------------------------------------------------------------------

def condition_points(spec) -> tuple:
    """The x locations whose triples the condition functionals consume."""
    if isinstance(spec, InitialValue):
        return (spec.x0,)
    if isinstance(spec, Cauchy):
        return (spec.x0,)
    if isinstance(spec, (Dirichlet, MixedDN, Neumann, Robin)):
        return (spec.a, spec.b)
    raise TypeError(f"no condition functionals for {type(spec).__name__}")


def condition_values(spec, triples) -> tuple:
    """Apply the spec's condition functionals to a function's endpoint triples.

    `triples` holds one EvalTriple per entry of condition_points(spec).
    Applied to the trial solution, the result must equal
    prescribed_values(spec); applied to the main network it yields the
    coefficients of the projection P_x N.
    """
    if isinstance(spec, InitialValue):
        return (triples[0].value,)
    if isinstance(spec, Cauchy):
        return (triples[0].value, triples[0].d1)
    if isinstance(spec, Dirichlet):
        return (triples[0].value, triples[1].value)
    if isinstance(spec, MixedDN):
        return (triples[0].value, triples[1].d1)
    if isinstance(spec, Neumann):
        return (triples[0].d1, triples[1].d1)
    if isinstance(spec, Robin):
        ta, tb = triples
        return (spec.lam * ta.value + spec.mu * ta.d1,
                spec.gam * tb.value + spec.delta * tb.d1)
    raise TypeError(f"no condition functionals for {type(spec).__name__}")


def prescribed_values(spec) -> tuple:
    """The xi values, ordered to match the basis and the functionals."""
    if isinstance(spec, InitialValue):
        return (spec.value,)
    if isinstance(spec, Cauchy):
        return (spec.value, spec.slope)
    if isinstance(spec, Dirichlet):
        return (spec.ya, spec.yb)
    if isinstance(spec, MixedDN):
        return (spec.ya, spec.yb_prime)
    if isinstance(spec, Neumann):
        return (spec.ya_prime, spec.yb_prime)
    if isinstance(spec, Robin):
        return (spec.ya, spec.yb)
    if isinstance(spec, SystemInitial):
        return spec.values
    raise TypeError(f"no prescribed values for {type(spec).__name__}")


def homogeneous(spec):
    """Copy of the spec with every prescribed value set to zero.

    The operators are linear in the xi, so a form built on the homogeneous
    spec satisfies the zero conditions exactly; this is what perturbations
    are built from.
    """
    if isinstance(spec, InitialValue):
        return replace(spec, value=0.0)
    if isinstance(spec, Cauchy):
        return replace(spec, value=0.0, slope=0.0)
    if isinstance(spec, Dirichlet):
        return replace(spec, ya=0.0, yb=0.0)
    if isinstance(spec, MixedDN):
        return replace(spec, ya=0.0, yb_prime=0.0)
    if isinstance(spec, Neumann):
        return replace(spec, ya_prime=0.0, yb_prime=0.0)
    if isinstance(spec, Robin):
        return replace(spec, ya=0.0, yb=0.0)
    if isinstance(spec, SystemInitial):
        return replace(spec, values=tuple(0.0 for _ in spec.values))
    raise TypeError(f"cannot zero {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Rigid operator and the reductive transformation
# ---------------------------------------------------------------------------

def rigid_basis(a: float, b: float, x) -> tuple:
    """Quadratic non-parametric basis: Ra(a)=1, Ra(b)=0 and mirrored Rb."""
    w2 = (b - a) ** 2
    ra = EvalTriple((x - b) ** 2 / w2, 2.0 * (x - b) / w2, 2.0 / w2 * np.ones_like(x))
    rb = EvalTriple((x - a) ** 2 / w2, 2.0 * (x - a) / w2, 2.0 / w2 * np.ones_like(x))
    return (ra, rb)


def rigid_match_eval(spec: Dirichlet, x) -> EvalTriple:
    """Fixed quadratic match A(x) = ya*((x-b)/(b-a))^2 + yb*((x-a)/(b-a))^2."""
    x = np.asarray(x, dtype=float)
    ra, rb = rigid_basis(spec.a, spec.b, x)
    return EvalTriple(spec.ya * ra.value + spec.yb * rb.value,
                      spec.ya * ra.d1 + spec.yb * rb.d1,
                      spec.ya * ra.d2 + spec.yb * rb.d2)


def reduce_mixed_to_dirichlet(w: NetworkParams, a: float, b: float, xi_a_prime: float) -> float:
    """Boundary value psi(a) that makes the rigid quadratic trial satisfy
    psi'(a) = xi_a_prime (derivative prescribed at the left endpoint)."""
    e = net.eval(w, a)
    return float(e.value + 0.5 * (b - a) * (e.d1 - xi_a_prime))


def reduce_mixed_to_dirichlet_at_b(w: NetworkParams, a: float, b: float, xi_b_prime: float) -> float:
    """Mirrored substitution: psi(b) enforcing psi'(b) = xi_b_prime."""
    e = net.eval(w, b)
    return float(e.value + 0.5 * (b - a) * (xi_b_prime - e.d1))


def reduced_robin_pair(spec: Robin, ea: EvalTriple, eb: EvalTriple) -> tuple:
    """Boundary pair (psi(a), psi(b)) from the main network's endpoint
    triples, making the rigid quadratic trial satisfy both Robin conditions."""
    width = spec.b - spec.a
    den_a = width * spec.lam - 2.0 * spec.mu
    den_b = width * spec.gam + 2.0 * spec.delta
    if den_a == 0.0:
        raise ValueError("Robin reduction degenerate at a: (b-a)*lam - 2*mu is zero")
    if den_b == 0.0:
        raise ValueError("Robin reduction degenerate at b: (b-a)*gam + 2*delta is zero")
    psi_a = (width * (spec.ya - spec.mu * ea.d1) - 2.0 * spec.mu * ea.value) / den_a
    psi_b = (width * (spec.yb - spec.delta * eb.d1) + 2.0 * spec.delta * eb.value) / den_b
    return float(psi_a), float(psi_b)


def reduce_robin_to_dirichlet(w: NetworkParams, spec: Robin) -> tuple:
    """Boundary pair (psi(a), psi(b)) that makes the rigid quadratic trial
    satisfy both Robin conditions exactly."""
    return reduced_robin_pair(spec, net.eval(w, spec.a), net.eval(w, spec.b))
