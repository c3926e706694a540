"""Training and test point sets on [a, b]."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Grid", "equidistant", "chebyshev", "test_grid", "TEST_POINTS"]

TEST_POINTS = 1000


@dataclass(frozen=True, eq=False)
class Grid:
    kind: str  # "equidistant" | "chebyshev"
    a: float
    b: float
    count: int
    points: np.ndarray = field(repr=False)

    def __len__(self):
        return self.count


def _check_interval(a: float, b: float):
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")


def equidistant(a: float, b: float, m: int) -> Grid:
    """M evenly spaced points including both endpoints."""
    _check_interval(a, b)
    if m < 2:
        raise ValueError(f"equidistant grid needs M >= 2, got {m}")
    pts = a + np.arange(m) * ((b - a) / (m - 1))
    return Grid("equidistant", a, b, m, pts)


def chebyshev(a: float, b: float, m: int) -> Grid:
    """M Chebyshev nodes, strictly interior, sorted ascending.

    Raw nodes (a+b)/2 + (b-a)/2 * cos((2i-1)pi/(2M)) descend in i; they are
    returned ascending because downstream reporting assumes monotone grids.
    The nodes cluster towards the endpoints, which suppresses the Runge
    phenomenon on wide intervals.
    """
    _check_interval(a, b)
    if m < 1:
        raise ValueError(f"chebyshev grid needs M >= 1, got {m}")
    i = np.arange(1, m + 1)
    pts = 0.5 * (a + b) + 0.5 * (b - a) * np.cos((2 * i - 1) * np.pi / (2 * m))
    return Grid("chebyshev", a, b, m, pts[::-1].copy())


def test_grid(a: float, b: float) -> Grid:
    """The fixed 1000-point equidistant evaluation grid."""
    return equidistant(a, b, TEST_POINTS)


def make_grid(kind: str, a: float, b: float, m: int) -> Grid:
    if kind in ("equidistant", "eq"):
        return equidistant(a, b, m)
    if kind in ("chebyshev", "ch"):
        return chebyshev(a, b, m)
    raise ValueError(f"unknown grid kind {kind!r} (use 'equidistant' or 'chebyshev')")
