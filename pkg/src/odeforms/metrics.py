"""Solution-quality measures: squared residuals, exact deviations, and
estimated deviations, each as a grid mean and maximum.

Scalar problems yield plain floats; systems yield one value per component
(the aggregate is the per-component sum).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .train import _check_arity, grid_points
from .trial import SystemForm, system_trial_eval, trial_eval

__all__ = [
    "MetricsReport",
    "residual_metrics",
    "deviation_metrics",
    "estimated_deviation_metrics",
    "aggregate",
    "report",
]


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    mxe: float
    msd: Optional[object] = None    # float or per-component ndarray
    mxd: Optional[object] = None
    msed: Optional[object] = None
    mxed: Optional[object] = None
    grid_size: int = 0
    dataset: str = ""


def aggregate(value) -> float:
    """Collapse a per-component metric to its sum (identity for scalars)."""
    return float(np.sum(value))


def residual_metrics(problem, form, grid) -> tuple:
    """(MSE, MXE): mean and max of squared residuals over the grid; system
    residual components are summed per point before the mean/max."""
    _check_arity(problem, form)
    x = grid_points(grid)
    if x.size == 0:
        raise ValueError("empty grid")
    if isinstance(form, SystemForm):
        r = problem.residual(x, system_trial_eval(form, x))
        sq = np.sum(r * r, axis=0)
    else:
        r = problem.residual(x, trial_eval(form, x))
        sq = r * r
    return float(np.mean(sq)), float(np.max(sq))


def deviation_metrics(problem, form, grid) -> tuple:
    """(MSD, MXD) against the exact solution; per-component for systems."""
    _check_arity(problem, form)
    if problem.exact is None:
        raise ValueError(f"{problem.name} has no exact solution")
    x = grid_points(grid)
    if x.size == 0:
        raise ValueError("empty grid")
    if isinstance(form, SystemForm):
        got = np.stack([t.value for t in system_trial_eval(form, x)])
        sq = (got - problem.exact(x)) ** 2
        return np.mean(sq, axis=-1), np.max(sq, axis=-1)
    sq = (trial_eval(form, x).value - problem.exact(x)) ** 2
    return float(np.mean(sq)), float(np.max(sq))


def estimated_deviation_metrics(bound, grid=None) -> tuple:
    """(MSED, MXED): mean and max of the squared estimated deviation bound."""
    if not bound.valid:
        raise ValueError("bound estimate is not valid (delta^2 >= s^2)")
    sq = np.asarray(bound.bound_abs) ** 2
    if grid is not None and grid_points(grid).size != sq.shape[-1]:
        raise ValueError("grid does not match the bound's evaluation grid")
    if sq.ndim == 2:
        return np.mean(sq, axis=-1), np.max(sq, axis=-1)
    return float(np.mean(sq)), float(np.max(sq))


def report(problem, form, grid, dataset: str = "", bound=None) -> MetricsReport:
    """All applicable measures for one form on one grid."""
    mse, mxe = residual_metrics(problem, form, grid)
    msd = mxd = msed = mxed = None
    if problem.exact is not None:
        msd, mxd = deviation_metrics(problem, form, grid)
    if bound is not None and bound.valid:
        msed, mxed = estimated_deviation_metrics(bound)
    return MetricsReport(mse=mse, mxe=mxe, msd=msd, mxd=mxd, msed=msed, mxed=mxed,
                         grid_size=int(grid_points(grid).size), dataset=dataset)
