"""Unconstrained minimizers with exact function-evaluation accounting.

Four methods: pattern search by alternating variables, the Nelder-Mead
simplex, BFGS with finite-difference gradients and a weak-Wolfe line
search, and a trust-region Gauss-Newton (Levenberg-Marquardt) for
least-squares objectives given as residual vectors.  Every objective call,
including finite-difference probes and line-search trials, is charged
against the budget; all methods return the best point seen and are fully
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["OptConfig", "OptResult", "fd_gradient", "pattern_search", "nelder_mead", "bfgs",
           "levenberg_marquardt"]

_EPS = float(np.finfo(float).eps)
DEFAULT_FD_STEP = _EPS ** (1.0 / 3.0)

BUDGET = "budget"
FTOL = "ftol"
XTOL = "xtol"


DEFAULT_JAC_STEP = _EPS ** 0.5


@dataclass(frozen=True)
class OptConfig:
    budget: int = 220000      # a cap on objective evaluations, not a quota
    f_tol: float = 1e-6       # relative objective-improvement stop
    x_tol: float = 1e-12      # step-size stop
    fd_step: float = DEFAULT_FD_STEP    # central differences: cube-root eps
    jac_step: float = DEFAULT_JAC_STEP  # forward differences: square-root eps

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.f_tol <= 0 or self.x_tol <= 0 or self.fd_step <= 0 or self.jac_step <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class OptResult:
    x_best: np.ndarray
    f_best: float
    evals: int
    converged: bool
    reason: str


class _OutOfBudget(Exception):
    pass


class _Counted:
    """Objective wrapper: counts calls, tracks the best finite point."""

    __slots__ = ("f", "budget", "evals", "best_x", "best_f")

    def __init__(self, f, budget):
        self.f = f
        self.budget = budget
        self.evals = 0
        self.best_x = None
        self.best_f = np.inf

    def __call__(self, x):
        if self.evals >= self.budget:
            raise _OutOfBudget
        self.evals += 1
        v = float(self.f(x))
        if not np.isfinite(v):
            v = np.inf
        if v < self.best_f:
            self.best_f = v
            self.best_x = np.array(x, dtype=float)
        return v

    def result(self, converged, reason) -> OptResult:
        return OptResult(self.best_x, self.best_f, self.evals, converged, reason)


def fd_gradient(f: Callable, x: np.ndarray, h_rel: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference gradient, per-coordinate step h_rel*max(1,|x_i|)."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = h_rel * max(1.0, abs(x[i]))
        xp = x.copy()
        xp[i] = x[i] + h
        fp = f(xp)
        xp[i] = x[i] - h
        fm = f(xp)
        g[i] = (fp - fm) / (2.0 * h)
    return g


# ---------------------------------------------------------------------------
# Pattern search (alternating variables)
# ---------------------------------------------------------------------------

def pattern_search(f: Callable, x0, cfg: OptConfig = OptConfig()) -> OptResult:
    """Coordinate-wise exploratory moves, doubling the step on success and
    halving it on failure, until all steps shrink below x_tol."""
    wrap = _Counted(f, cfg.budget)
    x = np.array(x0, dtype=float)
    n = x.size
    steps = 0.25 * np.maximum(1.0, np.abs(x))
    reason = XTOL
    try:
        fx = wrap(x)
        while np.max(steps) > cfg.x_tol:
            for i in range(n):
                moved = False
                for sign in (1.0, -1.0):
                    xt = x.copy()
                    xt[i] += sign * steps[i]
                    ft = wrap(xt)
                    if ft < fx:
                        x, fx = xt, ft
                        steps[i] *= 2.0
                        moved = True
                        break
                if not moved:
                    steps[i] *= 0.5
        return wrap.result(True, reason)
    except _OutOfBudget:
        return wrap.result(False, BUDGET)


# ---------------------------------------------------------------------------
# Nelder-Mead simplex
# ---------------------------------------------------------------------------

def nelder_mead(f: Callable, x0, cfg: OptConfig = OptConfig()) -> OptResult:
    """Reflection/expansion/contraction/shrink with coefficients 1, 2, 0.5,
    0.5; the initial simplex perturbs each coordinate by 0.05*max(1,|x0_i|)."""
    wrap = _Counted(f, cfg.budget)
    x0 = np.array(x0, dtype=float)
    n = x0.size
    sim = np.repeat(x0[None, :], n + 1, axis=0)
    for i in range(n):
        sim[i + 1, i] += 0.05 * max(1.0, abs(x0[i]))
    try:
        fs = np.array([wrap(s) for s in sim])
        while True:
            order = np.argsort(fs, kind="stable")
            sim, fs = sim[order], fs[order]
            # convergence tests on the ordered simplex
            frange = abs(fs[-1] - fs[0])
            if 2.0 * frange <= cfg.f_tol * (abs(fs[-1]) + abs(fs[0]) + 1e-300):
                return wrap.result(True, FTOL)
            if np.max(np.abs(sim[1:] - sim[0])) <= cfg.x_tol:
                return wrap.result(True, XTOL)

            centroid = np.mean(sim[:-1], axis=0)
            xr = centroid + (centroid - sim[-1])
            fr = wrap(xr)
            if fr < fs[0]:
                xe = centroid + 2.0 * (centroid - sim[-1])
                fe = wrap(xe)
                if fe < fr:
                    sim[-1], fs[-1] = xe, fe
                else:
                    sim[-1], fs[-1] = xr, fr
            elif fr < fs[-2]:
                sim[-1], fs[-1] = xr, fr
            else:
                if fr < fs[-1]:
                    xc = centroid + 0.5 * (centroid - sim[-1])
                else:
                    xc = centroid - 0.5 * (centroid - sim[-1])
                fc = wrap(xc)
                if fc < min(fr, fs[-1]):
                    sim[-1], fs[-1] = xc, fc
                else:
                    for i in range(1, n + 1):
                        sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
                        fs[i] = wrap(sim[i])
    except _OutOfBudget:
        return wrap.result(False, BUDGET)


# ---------------------------------------------------------------------------
# BFGS with weak-Wolfe line search
# ---------------------------------------------------------------------------

_C1 = 1e-4
_C2 = 0.9
_CURV_SKIP = 1e-12
_MAX_LS = 30


def _dir_derivative(wrap, x, p, t, h_rel):
    """Central estimate of d f(x + t p)/dt (two evaluations)."""
    dt = h_rel * max(1.0, abs(t))
    fp = wrap(x + (t + dt) * p)
    fm = wrap(x + (t - dt) * p)
    return (fp - fm) / (2.0 * dt)


def _weak_wolfe(wrap, x, p, fx, dphi0, cfg):
    """Lewis-Overton bisection for the weak Wolfe conditions.

    Returns (t, f_new) or None on failure.
    """
    lo, hi = 0.0, np.inf
    t = 1.0
    for _ in range(_MAX_LS):
        ft = wrap(x + t * p)
        if not np.isfinite(ft) or ft > fx + _C1 * t * dphi0:
            hi = t
        else:
            dphit = _dir_derivative(wrap, x, p, t, cfg.fd_step)
            if dphit < _C2 * dphi0:
                lo = t
            else:
                return t, ft
        t = 0.5 * (lo + hi) if np.isfinite(hi) else 2.0 * lo
        if t <= 0.0 or (np.isfinite(hi) and hi - lo <= 1e-20 * max(1.0, lo)):
            return None
    return None


def _backtrack(wrap, x, p, fx, dphi0):
    t = 1.0
    for _ in range(60):
        ft = wrap(x + t * p)
        if np.isfinite(ft) and ft <= fx + _C1 * t * dphi0:
            return t, ft
        t *= 0.5
    return None


# ---------------------------------------------------------------------------
# Levenberg-Marquardt for least-squares objectives
# ---------------------------------------------------------------------------

class _CountedVector:
    """Residual-vector wrapper: each call charges one budget unit and tracks
    the best point by its sum of squares."""

    __slots__ = ("fn", "budget", "evals", "best_x", "best_f", "best_res")

    def __init__(self, fn, budget):
        self.fn = fn
        self.budget = budget
        self.evals = 0
        self.best_x = None
        self.best_f = np.inf
        self.best_res = None

    def __call__(self, x):
        if self.evals >= self.budget:
            raise _OutOfBudget
        self.evals += 1
        res = np.asarray(self.fn(x), dtype=float)
        f = float(res @ res)
        if not np.isfinite(f):
            return res, np.inf
        if f < self.best_f:
            self.best_f = f
            self.best_x = np.array(x, dtype=float)
            self.best_res = res
        return res, f

    def result(self, converged, reason) -> OptResult:
        return OptResult(self.best_x, self.best_f, self.evals, converged, reason)


def _tr_step(u, s, vt, r, delta):
    """Minimize ||J p + r|| subject to ||p|| <= delta, J given by its SVD.

    Rank-deficient directions (singular values below 1e-12 of the largest)
    are excluded from the undamped Gauss-Newton step; otherwise the damping
    lam with ||p(lam)|| ~ delta is found by a safeguarded Hebden-Newton
    iteration (a 5% hit on the radius is plenty for the ratio control).
    """
    utr = u.T @ r
    keep = s > s[0] * 1e-12
    gn = np.zeros(s.size)
    gn[keep] = -utr[keep] / s[keep]
    if float(gn @ gn) <= delta * delta:
        return vt.T @ gn

    s2 = s * s
    su = s * utr
    lo = 0.0
    hi = float(np.sqrt(su @ su)) / delta  # ||p(hi)|| <= delta
    lam = max(hi * 1e-4, 1e-300)
    for _ in range(40):
        den = s2 + lam
        c = su / den
        nrm = float(np.sqrt(c @ c))
        if 0.95 * delta <= nrm <= 1.05 * delta:
            break
        if nrm > delta:
            lo = lam
        else:
            hi = lam
        cd = c / den
        dphi = -float(c @ cd) / nrm
        lam_new = lam - (nrm - delta) * nrm / (delta * dphi)
        if not (lo < lam_new < hi):
            lam_new = max(np.sqrt(lo * hi), lo + 0.25 * (hi - lo))
        lam = lam_new
    return vt.T @ (-su / (s2 + lam))


def levenberg_marquardt(residual_fn: Callable, x0, cfg: OptConfig = OptConfig()) -> OptResult:
    """Trust-region Gauss-Newton on f(x) = ||residual_fn(x)||^2.

    The Jacobian comes from forward differences off the accepted residual
    (one evaluation per column, each charged like any other call); the
    subproblem is solved through the SVD, which keeps the heavily
    rank-deficient Jacobians of projected trial solutions well behaved.
    Exploiting the least-squares structure converges far deeper on
    collocation errors than a generic quasi-Newton on the scalar objective.
    """
    wrap = _CountedVector(residual_fn, cfg.budget)
    x = np.array(x0, dtype=float)
    n = x.size
    stalls = 0
    central = False
    # Laziness at three cost tiers.  The Jacobian is rebuilt from finite
    # differences only when cheaper repairs fail: accepted steps apply a
    # free secant (Broyden) update, the SVD used for the trust-region solve
    # is refactored only every few accepts or after a rejection, and a full
    # FD rebuild happens when even refactored secant models get rejected.
    # Cheap forward differences feed the early phase; once they stop paying
    # off, rebuilds switch to central differences, whose far smaller
    # truncation error lowers the convergence floor by several orders.
    _REFACTOR_EVERY = 4
    try:
        r, f = wrap(x)
        delta = max(1.0, float(np.linalg.norm(x)))
        jac = np.empty((r.size, n))
        need_fd = True
        need_factor = True
        jac_is_fd = False
        factors_current = False
        accepts_since_factor = 0
        f_at_rebuild = np.inf
        while True:
            if need_fd:
                if np.isfinite(f_at_rebuild) and \
                        f_at_rebuild - f <= cfg.f_tol * (abs(f_at_rebuild) + 1e-300):
                    if not central:
                        central = True
                        delta = max(delta, 1.0)
                    else:
                        stalls += 1
                        if stalls >= 2:
                            return wrap.result(True, FTOL)
                else:
                    stalls = 0
                f_at_rebuild = f
                for i in range(n):
                    xp = x.copy()
                    if central:
                        h = cfg.fd_step * max(1.0, abs(x[i]))
                        xp[i] = x[i] + h
                        rp, _ = wrap(xp)
                        xp[i] = x[i] - h
                        rm, _ = wrap(xp)
                        jac[:, i] = (rp - rm) / (2.0 * h)
                    else:
                        h = cfg.jac_step * max(1.0, abs(x[i]))
                        xp[i] = x[i] + h
                        rp, _ = wrap(xp)
                        jac[:, i] = (rp - r) / h
                need_fd = False
                need_factor = True
                jac_is_fd = True
            if need_factor:
                u, s, vt = np.linalg.svd(jac, full_matrices=False)
                if s[0] <= 1e-300:
                    return wrap.result(True, FTOL)
                need_factor = False
                factors_current = True
                accepts_since_factor = 0

            step = _tr_step(u, s, vt, r, delta)
            predicted = r + jac @ step
            pred = f - float(np.linalg.norm(predicted) ** 2)
            r_new, f_new = wrap(x + step)
            if f_new < f and pred > 0:
                ratio = (f - f_new) / pred
                x = x + step
                f, r = f_new, r_new
                norm_step = float(np.linalg.norm(step))
                if ratio > 0.75 and norm_step >= 0.9 * delta:
                    delta = 2.0 * delta
                elif ratio < 0.25:
                    delta = max(0.25 * norm_step, 1e-300)
                jac += np.outer(r_new - predicted, step) / (norm_step * norm_step)
                jac_is_fd = False
                factors_current = False
                accepts_since_factor += 1
                if ratio < 0.25:
                    need_fd = True
                elif accepts_since_factor >= _REFACTOR_EVERY:
                    need_factor = True
            elif not factors_current:
                need_factor = True      # cheapest repair: refactor the secant model
            elif not jac_is_fd:
                need_fd = True          # secant model exhausted: rebuild from FD
            else:
                delta = 0.25 * min(delta, float(np.linalg.norm(step)))
                if delta <= cfg.x_tol * (1.0 + np.linalg.norm(x)) or pred <= 0:
                    if central:
                        return wrap.result(True, XTOL)
                    central = True
                    delta = 1.0
                    need_fd = True
    except _OutOfBudget:
        return wrap.result(False, BUDGET)


def bfgs(f: Callable, x0, cfg: OptConfig = OptConfig()) -> OptResult:
    """Inverse-Hessian BFGS with finite-difference gradients.

    The update is skipped when the curvature condition y.s fails; a failed
    Wolfe search falls back to backtracking steepest descent, and a failed
    fallback stops with reason XTOL.
    """
    wrap = _Counted(f, cfg.budget)
    x = np.array(x0, dtype=float)
    n = x.size
    eye = np.eye(n)
    h_inv = eye.copy()
    stalls = 0
    first_update = True
    try:
        fx = wrap(x)
        g = fd_gradient(wrap, x, cfg.fd_step)
        while True:
            if np.max(np.abs(g)) <= 1e-14:
                return wrap.result(True, FTOL)
            p = -h_inv @ g
            dphi0 = float(g @ p)
            if not np.isfinite(dphi0) or dphi0 >= 0.0:
                h_inv = eye.copy()
                first_update = True
                p = -g
                dphi0 = float(g @ p)
                if dphi0 >= 0.0:
                    return wrap.result(True, FTOL)
            hit = _weak_wolfe(wrap, x, p, fx, dphi0, cfg)
            if hit is None:
                p = -g
                dphi0 = float(g @ p)
                hit = _backtrack(wrap, x, p, fx, dphi0)
                if hit is None:
                    return wrap.result(True, XTOL)
                h_inv = eye.copy()
                first_update = True
            t, f_new = hit
            s = t * p
            x_new = x + s
            g_new = fd_gradient(wrap, x_new, cfg.fd_step)
            y = g_new - g

            ys = float(y @ s)
            if ys > _CURV_SKIP * np.linalg.norm(y) * np.linalg.norm(s):
                if first_update:
                    h_inv *= ys / float(y @ y)
                    first_update = False
                rho = 1.0 / ys
                v = eye - rho * np.outer(s, y)
                h_inv = v @ h_inv @ v.T + rho * np.outer(s, s)

            improvement = fx - f_new
            x, fx, g = x_new, f_new, g_new
            if improvement <= cfg.f_tol * (abs(fx) + 1e-300):
                stalls += 1
                if stalls >= 2:
                    return wrap.result(True, FTOL)
            else:
                stalls = 0
            if np.linalg.norm(s) <= cfg.x_tol * (1.0 + np.linalg.norm(x)):
                return wrap.result(True, XTOL)
    except _OutOfBudget:
        return wrap.result(False, BUDGET)
