"""Order statistics over small discrete RSSI samples."""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

QUARTILE_PROBS = (0.25, 0.50, 0.75)


class QuartileTriple(NamedTuple):
    q1: float
    q2: float
    q3: float


def _as_sample(sample: Sequence[float]) -> np.ndarray:
    values = np.asarray(sample, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("sample must be a non-empty one-dimensional sequence")
    if not np.all(np.isfinite(values)):
        raise ValueError("sample contains non-finite readings")
    return values


def rank_quantile(sorted_values: np.ndarray, p: float) -> float:
    """Quantile at probability ``p`` using rank ``p * (m + 1)``.

    The rank is clamped to [1, m] and fractional ranks interpolate linearly
    between neighbouring order statistics.
    """
    m = sorted_values.shape[0]
    rank = min(max(p * (m + 1), 1.0), float(m))
    lo = int(np.floor(rank))
    frac = rank - lo
    lower = sorted_values[lo - 1]
    if frac == 0.0:
        return float(lower)
    return float(lower + frac * (sorted_values[lo] - lower))


def quartiles(sample: Sequence[float], rule=rank_quantile) -> QuartileTriple:
    values = np.sort(_as_sample(sample))
    return QuartileTriple(*(rule(values, p) for p in QUARTILE_PROBS))


def column_quartiles(readings: np.ndarray) -> np.ndarray:
    """Quartiles of every column of an m x n matrix, shape (n, 3)."""
    cols = np.sort(np.asarray(readings, dtype=float), axis=0)
    return np.array([[rank_quantile(cols[:, j], p) for p in QUARTILE_PROBS] for j in range(cols.shape[1])])


def mean(sample: Sequence[float]) -> float:
    return float(np.mean(_as_sample(sample)))
