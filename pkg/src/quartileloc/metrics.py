"""Distance functions between fingerprint attribute vectors.

Both functions accept a single vector ``u`` and either one vector or a
matrix of row vectors ``v``; in the matrix case one distance per row is
returned.
"""

from __future__ import annotations

import numpy as np


def _pair(u, v) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1:
        raise ValueError("first argument must be a vector")
    if v.shape[-1] != u.shape[0]:
        raise ValueError(f"length mismatch: {u.shape[0]} vs {v.shape[-1]}")
    return u, v


def euclidean(u, v):
    u, v = _pair(u, v)
    d = np.sqrt(np.sum((v - u) ** 2, axis=-1))
    return float(d) if d.ndim == 0 else d


def sorensen(u, v):
    """Bray-Curtis form: sum|u - v| / sum(u + v), for non-negative vectors."""
    u, v = _pair(u, v)
    if np.any(u < 0) or np.any(v < 0):
        raise ValueError("sorensen distance needs non-negative entries")
    num = np.sum(np.abs(v - u), axis=-1)
    den = np.sum(v + u, axis=-1)
    if np.any(den <= 0):
        raise ValueError("sorensen distance undefined for an all-zero pair")
    d = num / den
    return float(d) if d.ndim == 0 else d


METRICS = {"euclidean": euclidean, "sorensen": sorensen}


def get_metric(name: str):
    try:
        return METRICS[name]
    except KeyError:
        raise ValueError(f"unknown metric {name!r}, expected one of {sorted(METRICS)}") from None
