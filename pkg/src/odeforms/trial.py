"""Trial solutions: condition match plus a projected main network.

Three assembly modes:

* ``augmented``     Psi = N + sum_j (xi_j - c_j(N)) * Phi_j, where Phi is the
                    parametric basis of the condition spec and c_j are the
                    spec's condition functionals applied to N itself.  The
                    prescribed conditions hold for any parameter values.
* ``rigid-reduced`` the fixed quadratic two-point match with the unknown
                    boundary values substituted by network-dependent
                    expressions, so mixed or Robin conditions hold exactly.
* ``baseline``      Psi = N; conditions are only penalized during training.

Systems are lists of per-component scalar forms sharing the domain.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from . import conditions, net
from .conditions import ConditionSpec, MatchParams, Robin, MixedDN
from .net import EvalTriple, NetworkParams

__all__ = [
    "AUGMENTED",
    "RIGID_REDUCED",
    "BASELINE",
    "NeuralForm",
    "SystemForm",
    "trial_eval",
    "system_trial_eval",
    "split_params",
    "join_params",
    "n_params",
    "build_form",
    "reinit",
    "split_neuron_budget",
]

AUGMENTED = "augmented"
RIGID_REDUCED = "rigid-reduced"
BASELINE = "baseline"
_MODES = (AUGMENTED, RIGID_REDUCED, BASELINE)


@dataclass(frozen=True)
class NeuralForm:
    """A scalar trial solution. spec is None only for unconstrained baseline
    components inside systems."""

    spec: Optional[ConditionSpec]
    match: Optional[MatchParams]
    main: NetworkParams
    mode: str

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == AUGMENTED:
            if self.spec is None:
                raise ValueError("augmented form needs a condition spec")
            conditions.match_arity(self.spec)  # raises for unsupported specs
            if self.match is None:
                raise ValueError("augmented form needs match networks")
            if isinstance(self.spec, Robin):
                self.spec.ensure_matchable()
        elif self.mode == RIGID_REDUCED:
            if not isinstance(self.spec, (MixedDN, Robin)):
                raise ValueError("rigid-reduced mode applies to mixed or Robin conditions only")
            if self.match is not None:
                raise ValueError("rigid-reduced form uses the fixed quadratic match, no networks")


@dataclass(frozen=True)
class SystemForm:
    """One scalar form per system component, sharing the domain."""

    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ValueError("system form needs at least one component")

    @property
    def n(self) -> int:
        return len(self.components)


Form = Union[NeuralForm, SystemForm]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def trial_eval(form: NeuralForm, x) -> EvalTriple:
    """Value, first and second x-derivative of the trial solution."""
    x = np.asarray(x, dtype=float)
    if form.mode == BASELINE or form.spec is None:
        return net.eval(form.main, x)
    if form.mode == RIGID_REDUCED:
        return _rigid_reduced_eval(form, x)
    basis = conditions.match_basis(form.spec, form.match, x)
    pts = conditions.condition_points(form.spec)
    t, anchors = net.eval_with_anchors(form.main, x, pts)
    own = conditions.condition_values(form.spec, anchors)
    xi = conditions.prescribed_values(form.spec)
    v, d1, d2 = t.value, t.d1, t.d2
    for q, c, phi in zip(xi, own, basis):
        coef = q - c
        v = v + coef * phi.value
        d1 = d1 + coef * phi.d1
        d2 = d2 + coef * phi.d2
    return EvalTriple(v, d1, d2)


def _rigid_reduced_eval(form: NeuralForm, x) -> EvalTriple:
    spec = form.spec
    t, (ea, eb) = net.eval_with_anchors(form.main, x, (spec.a, spec.b))
    if isinstance(spec, MixedDN):
        psi_a = spec.ya
        psi_b = eb.value + 0.5 * (spec.b - spec.a) * (spec.yb_prime - eb.d1)
    else:
        psi_a, psi_b = conditions.reduced_robin_pair(spec, ea, eb)
    ra, rb = conditions.rigid_basis(spec.a, spec.b, x)
    ca = psi_a - ea.value
    cb = psi_b - eb.value
    return EvalTriple(t.value + ca * ra.value + cb * rb.value,
                      t.d1 + ca * ra.d1 + cb * rb.d1,
                      t.d2 + ca * ra.d2 + cb * rb.d2)


def system_trial_eval(sf: SystemForm, x) -> list:
    """Per-component trial triples."""
    return [trial_eval(c, x) for c in sf.components]


# ---------------------------------------------------------------------------
# Flat parameter plumbing (the optimizers see one flat vector)
# ---------------------------------------------------------------------------

def _scalar_nets(form: NeuralForm) -> list:
    nets = [form.main]
    if form.match is not None:
        nets.append(form.match.theta1)
        if form.match.theta2 is not None:
            nets.append(form.match.theta2)
    return nets


def split_params(form: Form) -> np.ndarray:
    """Concatenated flat vector: main then match networks, components in order."""
    if isinstance(form, SystemForm):
        return np.concatenate([split_params(c) for c in form.components])
    return np.concatenate([p.flat for p in _scalar_nets(form)])


def n_params(form: Form) -> int:
    return split_params(form).size


def join_params(form: Form, vec: np.ndarray) -> Form:
    """Rebuild a structurally identical form from a flat vector."""
    vec = np.asarray(vec, dtype=float)
    out, used = _join(form, vec, 0)
    if used != vec.size:
        raise ValueError(f"flat vector has {vec.size} entries, form needs {used}")
    return out


def _join(form, vec, off):
    if isinstance(form, SystemForm):
        comps = []
        for c in form.components:
            built, off = _join(c, vec, off)
            comps.append(built)
        return SystemForm(tuple(comps)), off

    def take(params):
        nonlocal off
        n = params.flat.size
        if off + n > vec.size:
            raise ValueError(f"flat vector too short: needs at least {off + n} entries")
        piece = NetworkParams(vec[off:off + n])
        off += n
        return piece

    main = take(form.main)
    match = None
    if form.match is not None:
        theta1 = take(form.match.theta1)
        theta2 = take(form.match.theta2) if form.match.theta2 is not None else None
        match = MatchParams(theta1, theta2)
    return replace(form, main=main, match=match), off


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def split_neuron_budget(total_params: int, n_mains: int, n_matches: int) -> tuple:
    """Split a total parameter count into per-network neuron counts.

    Returns (mains, matches) neuron-count lists: as even as the 3-per-neuron
    granularity allows, with the remainder going to the main networks.
    """
    if total_params % 3 != 0:
        raise ValueError(f"parameter count must be a multiple of 3, got {total_params}")
    k_total = total_params // 3
    n_nets = n_mains + n_matches
    if k_total < n_nets:
        raise ValueError(f"{total_params} parameters cannot cover {n_nets} networks")
    base, rem = divmod(k_total, n_nets)
    # match networks stay equal-sized (second-order pairs must agree); the
    # remainder goes to the main network(s)
    matches = [base] * n_matches
    q, r = divmod(rem, n_mains)
    mains = [base + q + (1 if i < r else 0) for i in range(n_mains)]
    return mains, matches


def _build_scalar(spec, mode, k_main, k_match, rng) -> NeuralForm:
    main = net.random_init(k_main, rng)
    match = None
    if mode == AUGMENTED and spec is not None:
        arity = conditions.match_arity(spec)
        theta1 = net.random_init(k_match, rng)
        theta2 = net.random_init(k_match, rng) if arity == 2 else None
        match = MatchParams(theta1, theta2)
    return NeuralForm(spec=spec, match=match, main=main, mode=mode)


def _component_layout(specs, mode):
    """Per-component (effective_mode, n_match_nets) for a system."""
    layout = []
    for spec in specs:
        if spec is None or mode == BASELINE:
            layout.append((BASELINE, 0))
        else:
            layout.append((AUGMENTED, conditions.match_arity(spec)))
    return layout


def build_form(problem, mode: str, total_params: int, rng) -> Form:
    """Random-initialized trial form for a problem at a total parameter count.

    The count covers the main network(s) and all match networks combined.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")
    specs = problem.component_specs()
    if specs is not None:  # system
        if mode == RIGID_REDUCED:
            raise ValueError("rigid-reduced mode is defined for scalar mixed/Robin problems")
        layout = _component_layout(specs, mode)
        n_matches = sum(nm for _, nm in layout)
        mains, matches = split_neuron_budget(total_params, len(specs), n_matches)
        comps = []
        mi = 0
        for ci, (spec, (eff_mode, nm)) in enumerate(zip(specs, layout)):
            k_match = matches[mi] if nm else 0
            mi += nm
            comps.append(_build_scalar(spec, eff_mode, mains[ci], k_match, rng))
        return SystemForm(tuple(comps))

    spec = problem.conditions
    if mode == BASELINE:
        mains, _ = split_neuron_budget(total_params, 1, 0)
        return _build_scalar(spec, BASELINE, mains[0], 0, rng)
    if mode == RIGID_REDUCED:
        if not isinstance(spec, (MixedDN, Robin)):
            raise ValueError(f"rigid-reduced mode does not apply to {type(spec).__name__} conditions")
        mains, _ = split_neuron_budget(total_params, 1, 0)
        return _build_scalar(spec, RIGID_REDUCED, mains[0], 0, rng)
    arity = conditions.match_arity(spec)
    mains, matches = split_neuron_budget(total_params, 1, arity)
    return _build_scalar(spec, AUGMENTED, mains[0], matches[0], rng)


def reinit(form: Form, rng) -> Form:
    """Same structure, freshly drawn parameter values (used per restart)."""
    if isinstance(form, SystemForm):
        return SystemForm(tuple(reinit(c, rng) for c in form.components))
    main = net.random_init(form.main.k, rng)
    match = None
    if form.match is not None:
        theta1 = net.random_init(form.match.theta1.k, rng)
        theta2 = (net.random_init(form.match.theta2.k, rng)
                  if form.match.theta2 is not None else None)
        match = MatchParams(theta1, theta2)
    return replace(form, main=main, match=match)
