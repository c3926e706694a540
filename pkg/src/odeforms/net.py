"""Single-hidden-layer sigmoid network with analytic input derivatives.

The network maps a scalar x to

    N(x) = sum_i a_i * sigmoid(w_i * x + b_i),

and exposes the value together with its first and second x-derivatives,
which is all the trial-solution machinery ever needs.  Parameters live in
one flat vector with the interleaved layout (a_1, w_1, b_1, ..., a_K, w_K,
b_K), which is also the layout every optimizer operates on.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = ["NetworkParams", "EvalTriple", "eval", "random_init"]

# Beyond |z| = 500 the sigmoid is flat to double precision; clamping the
# output to exactly 0/1 avoids exp overflow for extreme optimizer iterates.
_SIG_CLIP = 500.0


class EvalTriple(NamedTuple):
    """Function value and its first two x-derivatives (scalars or arrays)."""

    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


class NetworkParams:
    """Parameters of a K-neuron network in the interleaved flat layout."""

    __slots__ = ("flat",)

    def __init__(self, flat):
        flat = np.asarray(flat, dtype=float)
        if flat.ndim != 1 or flat.size == 0 or flat.size % 3 != 0:
            raise ValueError(f"flat parameter vector must have length 3*K >= 3, got {flat.size}")
        self.flat = flat

    @property
    def k(self) -> int:
        return self.flat.size // 3

    @property
    def a(self) -> np.ndarray:
        """Output weights (view into the flat vector)."""
        return self.flat[0::3]

    @property
    def w(self) -> np.ndarray:
        """Input weights (view)."""
        return self.flat[1::3]

    @property
    def b(self) -> np.ndarray:
        """Biases (view)."""
        return self.flat[2::3]

    def neurons(self) -> list[tuple[float, float, float]]:
        """Structured (a_i, w_i, b_i) triples; round-trips with from_neurons."""
        return [tuple(self.flat[3 * i : 3 * i + 3]) for i in range(self.k)]

    @classmethod
    def from_neurons(cls, triples) -> "NetworkParams":
        flat = np.asarray(triples, dtype=float).reshape(-1)
        return cls(flat)

    def copy(self) -> "NetworkParams":
        return NetworkParams(self.flat.copy())

    def __repr__(self):
        return f"NetworkParams(K={self.k})"


def _sigmoid(z):
    zc = np.minimum(np.maximum(z, -_SIG_CLIP), _SIG_CLIP)
    s = 1.0 / (1.0 + np.exp(-zc))
    if (zc != z).any():
        s = np.where(z > _SIG_CLIP, 1.0, np.where(z < -_SIG_CLIP, 0.0, s))
    return s


def eval(params: NetworkParams, x) -> EvalTriple:
    """Evaluate N, N' and N'' at x (scalar or 1-D array).

    Uses sigma' = s(1-s) and sigma'' = s(1-s)(1-2s); reductions are plain
    axis sums so scalar and vectorized calls agree bitwise per point.
    """
    x = np.asarray(x, dtype=float)
    z = x[..., None] * params.w + params.b
    s = _sigmoid(z)
    sp = s * (1.0 - s)
    aw = params.a * params.w
    value = (s * params.a).sum(axis=-1)
    d1 = (sp * aw).sum(axis=-1)
    d2 = (sp * (1.0 - 2.0 * s) * (aw * params.w)).sum(axis=-1)
    return EvalTriple(value, d1, d2)


def eval_with_anchors(params: NetworkParams, x, anchors: tuple) -> tuple:
    """One network evaluation covering x plus a few anchor points.

    Returns (triple_at_x, [triple_at_anchor, ...]).  Appending the anchors
    to the input array costs one evaluation instead of one per anchor and
    is bitwise identical per point to separate calls.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    joint = np.concatenate([x.reshape(-1), anchors])
    t = eval(params, joint)
    m = joint.size - len(anchors)

    def head(arr):
        return arr[0] if scalar else arr[:m]

    at_x = EvalTriple(head(t.value), head(t.d1), head(t.d2))
    at_anchors = [EvalTriple(t.value[m + i], t.d1[m + i], t.d2[m + i])
                  for i in range(len(anchors))]
    return at_x, at_anchors


def random_init(k: int, rng: np.random.Generator) -> NetworkParams:
    """Draw all 3*K components i.i.d. uniform on [-1, 1]."""
    if k < 1:
        raise ValueError(f"need at least one neuron, got K={k}")
    return NetworkParams(rng.uniform(-1.0, 1.0, size=3 * k))
