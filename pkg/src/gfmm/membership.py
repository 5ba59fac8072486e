"""Hyperbox membership (activation) function and its threshold ramp."""

from __future__ import annotations

import numpy as np

from .core import DimensionError, Hyperbox, Pattern


def ramp(z: float, g: float) -> float:
    """Threshold function ``f(z, g)``: ``z*g`` clipped into ``[0, 1]``."""
    zg = z * g
    if zg > 1.0:
        return 1.0
    if zg < 0.0:
        return 0.0
    return zg


def membership(x: Pattern, b: Hyperbox, gamma) -> float:
    """Degree to which pattern ``x`` fits inside box ``b``.

    Equals 1 when ``x`` lies inside the box and falls off with how far
    either bound of ``x`` overruns the box, scaled per dimension by ``gamma``.
    """
    lo, hi, v, w = x.lower, x.upper, b.v, b.w
    n = lo.size
    if v.size != n or len(gamma) != n:
        raise DimensionError(f"pattern has {n} features, box {v.size}, gamma {len(gamma)}")
    best = 1.0
    for j in range(n):
        g = gamma[j]
        a = 1.0 - ramp(hi[j] - w[j], g)
        if a < best:
            best = a
        a = 1.0 - ramp(v[j] - lo[j], g)
        if a < best:
            best = a
    return float(best)


def memberships(lower, upper, V, W, gamma) -> np.ndarray:
    """Membership of one pattern in each of the boxes ``V``/``W`` (rows)."""
    over_hi = np.clip((upper - W) * gamma, 0.0, 1.0)
    over_lo = np.clip((V - lower) * gamma, 0.0, 1.0)
    return 1.0 - np.maximum(over_hi, over_lo).max(axis=1)


def membership_matrix(lower, upper, V, W, gamma, chunk: int = 256) -> np.ndarray:
    """Membership of every pattern (rows of ``lower``/``upper``) in every box.

    Returns an ``(n_patterns, n_boxes)`` array.
    """
    lower = np.atleast_2d(lower)
    upper = np.atleast_2d(upper)
    N, m = lower.shape[0], V.shape[0]
    out = np.empty((N, m))
    if m == 0:
        return out
    step = max(1, chunk * 64 // max(m, 1))
    for s in range(0, N, step):
        lo = lower[s : s + step, None, :]
        hi = upper[s : s + step, None, :]
        over_hi = np.clip((hi - W[None]) * gamma, 0.0, 1.0)
        over_lo = np.clip((V[None] - lo) * gamma, 0.0, 1.0)
        out[s : s + step] = 1.0 - np.maximum(over_hi, over_lo).max(axis=2)
    return out
