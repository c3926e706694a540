"""Benchmark ODE problems with residual operators and exact solutions.

Six problems: a stiff first-order ODE, a nonlinear second-order ODE under
five condition types, Bessel's equation with Cauchy conditions, a nonlinear
first-order system, a stiff first-order system, and the second-order ODE
rewritten as a first-order system under four condition menus.  The
prescribed condition values are always computed from the exact solution at
the endpoints, so registry output is self-consistent by construction.

Residual callables are module-level functions, which keeps Problem objects
picklable for worker pools.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import j0, j1

from .conditions import (
    Cauchy,
    Dirichlet,
    InitialValue,
    MixedDN,
    Neumann,
    Robin,
    SystemInitial,
)

__all__ = ["Problem", "registry", "available", "FIRST_ORDER", "SECOND_ORDER", "SYSTEM"]

FIRST_ORDER = "first-order"
SECOND_ORDER = "second-order"
SYSTEM = "system"


@dataclass(frozen=True)
class Problem:
    name: str
    kind: str
    domain: tuple
    residual: Callable
    conditions: object  # scalar spec, SystemInitial, or per-component tuple
    exact: Optional[Callable] = None
    exact_d1: Optional[Callable] = None
    exact_d2: Optional[Callable] = None
    n_components: int = 1
    variant: str = ""

    @property
    def is_system(self) -> bool:
        return self.kind == SYSTEM

    def component_specs(self):
        """Per-component condition specs for systems, None for scalar problems."""
        if not self.is_system:
            return None
        if isinstance(self.conditions, SystemInitial):
            x0 = self.conditions.x0
            return tuple(InitialValue(x0, v) for v in self.conditions.values)
        return tuple(self.conditions)


# ---------------------------------------------------------------------------
# Residual operators (x, trial triple(s)) -> residual array(s)
# ---------------------------------------------------------------------------

def _stiff1_residual(x, t):
    return t.d1 + 50.0 * (t.value - np.cos(x))


def _nl2_residual(x, t):
    # powers written as products: scalar and array paths agree bitwise
    return t.d2 - t.value * t.d1 - t.value * t.value * t.value


def _bessel_residual(x, t):
    # multiplied-through form: regular at the x = 0 singular point (nu = 0)
    return x * x * t.d2 + x * t.d1 + x * x * t.value


def _nlsys_residual(x, ts):
    t1, t2 = ts
    sx = np.sin(x)
    r1 = t1.d1 - (np.cos(x) + t1.value * t1.value + t2.value - (1.0 + x * x + sx * sx))
    r2 = t2.d1 - (2.0 * x - (1.0 + x * x) * sx + t1.value * t2.value)
    return np.stack([r1, r2])


def _stiffsys_residual(x, ts):
    t1, t2 = ts
    r1 = t1.d1 + 10.0 * t1.value - 6.0 * t2.value
    r2 = t2.d1 - 13.5 * t1.value + 10.0 * t2.value
    return np.stack([r1, r2])


def _nl2sys_residual(x, ts):
    t1, t2 = ts
    r1 = t1.d1 - t2.value
    r2 = t2.d1 - (t1.value * t2.value + t1.value * t1.value * t1.value)
    return np.stack([r1, r2])


# ---------------------------------------------------------------------------
# Exact solutions (value, d1 and, for second-order problems, d2)
# ---------------------------------------------------------------------------

_C0 = 0.15 - 2500.0 / 2501.0


def _stiff1_exact(x):
    return _C0 * np.exp(-50.0 * x) + (50.0 * np.sin(x) + 2500.0 * np.cos(x)) / 2501.0


def _stiff1_exact_d1(x):
    return -50.0 * _C0 * np.exp(-50.0 * x) + (50.0 * np.cos(x) - 2500.0 * np.sin(x)) / 2501.0


def _nl2_exact(x):
    return 1.0 / (10.0 - x)


def _nl2_exact_d1(x):
    return 1.0 / (10.0 - x) ** 2


def _nl2_exact_d2(x):
    return 2.0 / (10.0 - x) ** 3


def _bessel_exact(x):
    return j0(x)


def _bessel_exact_d1(x):
    return -j1(x)


def _bessel_exact_d2(x):
    # J0'' = J1/x - J0, with the x -> 0 limit equal to -1/2
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x == 0.0, -0.5, j1(np.where(x == 0.0, 1.0, x)) / np.where(x == 0.0, 1.0, x) - j0(x))
    return out


def _nlsys_exact(x):
    return np.stack([np.sin(x), 1.0 + np.asarray(x, dtype=float) ** 2])


def _nlsys_exact_d1(x):
    return np.stack([np.cos(x), 2.0 * np.asarray(x, dtype=float)])


_E = float(np.exp(1.0))


def _stiffsys_exact(x):
    fast = np.exp(-19.0 * np.asarray(x, dtype=float))
    slow = np.exp(-np.asarray(x, dtype=float))
    return np.stack([(2.0 / 3.0) * _E * (slow + fast), _E * (slow - fast)])


def _stiffsys_exact_d1(x):
    fast = np.exp(-19.0 * np.asarray(x, dtype=float))
    slow = np.exp(-np.asarray(x, dtype=float))
    return np.stack([(2.0 / 3.0) * _E * (-slow - 19.0 * fast), _E * (-slow + 19.0 * fast)])


def _nl2sys_exact(x):
    return np.stack([_nl2_exact(x), _nl2_exact_d1(x)])


def _nl2sys_exact_d1(x):
    return np.stack([_nl2_exact_d1(x), _nl2_exact_d2(x)])


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_TP2_DOMAIN = (0.0, 9.5)


def _tp2_conditions(variant: str):
    a, b = _TP2_DOMAIN
    va, vb = _nl2_exact(a), _nl2_exact(b)
    da, db = _nl2_exact_d1(a), _nl2_exact_d1(b)
    if variant == "D-D":
        return Dirichlet(a, b, va, vb)
    if variant == "D-N":
        return MixedDN(a, b, va, db)
    if variant == "N-N":
        return Neumann(a, b, da, db)
    if variant == "C":
        return Cauchy(a, va, da)
    if variant == "R":
        # coefficient quadruple (1,1,1,1) is a choice; the paper's tables do
        # not state the Robin coefficients used
        return Robin(a, b, 1.0, 1.0, 1.0, 1.0, va + da, vb + db)
    raise ValueError(f"tp2 has no condition variant {variant!r}")


def _tp6_conditions(variant: str):
    a, b = _TP2_DOMAIN
    va, vb = _nl2_exact(a), _nl2_exact(b)
    da, db = _nl2_exact_d1(a), _nl2_exact_d1(b)
    # conditions on the original second-order unknown, re-expressed on the
    # components via psi1' = psi2; None marks an unconstrained component
    if variant == "D-D":
        return (Dirichlet(a, b, va, vb), None)
    if variant == "D-N":
        return (InitialValue(a, va), InitialValue(b, db))
    if variant == "N-N":
        return (None, Dirichlet(a, b, da, db))
    if variant == "C":
        return (InitialValue(a, va), InitialValue(a, da))
    raise ValueError(f"tp6 has no condition variant {variant!r}")


_VARIANTS = {
    "tp1": ("D",),
    "tp2": ("D-D", "D-N", "N-N", "C", "R"),
    "tp3": ("C",),
    "tp4": ("D",),
    "tp5": ("D",),
    "tp6": ("D-D", "D-N", "N-N", "C"),
}


def available() -> dict:
    """Problem names mapped to their valid condition variants."""
    return {k: list(v) for k, v in _VARIANTS.items()}


def registry(name: str, variant: Optional[str] = None) -> Problem:
    """Look up a benchmark problem by name and condition variant."""
    key = name.lower()
    if key not in _VARIANTS:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(_VARIANTS)}")
    allowed = _VARIANTS[key]
    if variant is None:
        variant = allowed[0]
    if variant not in allowed:
        raise ValueError(f"{key} has no condition variant {variant!r}; choose from {list(allowed)}")

    if key == "tp1":
        return Problem("tp1", FIRST_ORDER, (0.0, 1.5), _stiff1_residual,
                       InitialValue(0.0, 0.15), variant=variant,
                       exact=_stiff1_exact, exact_d1=_stiff1_exact_d1)
    if key == "tp2":
        return Problem("tp2", SECOND_ORDER, _TP2_DOMAIN, _nl2_residual,
                       _tp2_conditions(variant), variant=variant,
                       exact=_nl2_exact, exact_d1=_nl2_exact_d1, exact_d2=_nl2_exact_d2)
    if key == "tp3":
        return Problem("tp3", SECOND_ORDER, (0.0, 10.0), _bessel_residual,
                       Cauchy(0.0, 1.0, 0.0), variant=variant,
                       exact=_bessel_exact, exact_d1=_bessel_exact_d1, exact_d2=_bessel_exact_d2)
    if key == "tp4":
        return Problem("tp4", SYSTEM, (0.0, 3.0), _nlsys_residual,
                       SystemInitial(0.0, (0.0, 1.0)), variant=variant,
                       exact=_nlsys_exact, exact_d1=_nlsys_exact_d1, n_components=2)
    if key == "tp5":
        return Problem("tp5", SYSTEM, (0.0, 5.0), _stiffsys_residual,
                       SystemInitial(0.0, ((4.0 / 3.0) * _E, 0.0)), variant=variant,
                       exact=_stiffsys_exact, exact_d1=_stiffsys_exact_d1, n_components=2)
    return Problem("tp6", SYSTEM, _TP2_DOMAIN, _nl2sys_residual,
                   _tp6_conditions(variant), variant=variant,
                   exact=_nl2sys_exact, exact_d1=_nl2sys_exact_d1, n_components=2)
