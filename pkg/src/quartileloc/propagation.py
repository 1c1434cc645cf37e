"""Log-normal shadowing model, quadratic RSSI fit and synthetic datasets.

Random numbers come from numpy's ``PCG64`` bit generator seeded with the
dataset seed (``numpy.random.default_rng(seed)``). Noise for a whole dataset
is drawn in one call of ``standard_normal`` with shape
``(rp, instance, reading, ap)``, so the draw order is rp -> instance ->
reading -> ap, and scaled by sigma. Readings are rounded to integer dBm,
halves away from zero.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .geometry import Scenario, euclidean_distance_3d
from .representations import SampleMatrix

GENERATOR = "numpy.random.PCG64"


@dataclass(frozen=True)
class LogNormalParams:
    ref_distance_m: float = 1.0
    rssi_at_ref: float = -40.0
    path_loss_exponent: float = 2.5
    shadowing_sigma: float = 3.0

    def __post_init__(self):
        if not self.ref_distance_m > 0:
            raise ValueError(f"ref_distance_m must be positive, got {self.ref_distance_m}")
        if not self.shadowing_sigma >= 0:
            raise ValueError(f"shadowing_sigma must be non-negative, got {self.shadowing_sigma}")

    def mean_rssi(self, distance):
        """Noise-free RSSI at ``distance`` (scalar or array)."""
        return self.rssi_at_ref - 10.0 * self.path_loss_exponent * np.log10(np.asarray(distance) / self.ref_distance_m)


def log_normal_rssi(distance: float, params: LogNormalParams, noise: float = 0.0) -> float:
    """RSSI(d) = RSSI(d0) - 10 eta log10(d / d0) + noise, in dBm.

    ``noise`` is a draw from N(0, sigma^2) supplied by the caller.
    """
    if not distance > 0:
        raise ValueError(f"distance must be positive, got {distance}")
    return (
        params.rssi_at_ref
        - 10.0 * params.path_loss_exponent * math.log10(distance / params.ref_distance_m)
        + noise
    )


@dataclass(frozen=True)
class QuadraticFit:
    a: float
    b: float
    c: float
    residual_rms: float

    def __call__(self, distance):
        d = np.asarray(distance, dtype=float)
        return self.a * d**2 + self.b * d + self.c


def fit_quadratic(calibration: Iterable[tuple[float, float]]) -> QuadraticFit:
    """Least-squares fit of RSSI = a d^2 + b d + c."""
    points = np.asarray(list(calibration), dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 3:
        raise ValueError("need at least 3 (distance, rssi) points")
    d, rssi = points[:, 0], points[:, 1]
    design = np.column_stack([d**2, d, np.ones_like(d)])
    coef, _, rank, _ = np.linalg.lstsq(design, rssi, rcond=None)
    if rank < 3:
        raise ValueError(f"degenerate calibration: need 3 distinct distances, got {np.unique(d).size}")
    residual = rssi - design @ coef
    return QuadraticFit(*(float(c) for c in coef), residual_rms=float(np.sqrt(np.mean(residual**2))))


@dataclass(frozen=True)
class GenerationSpec:
    scenario: Scenario
    params: LogNormalParams = LogNormalParams()
    m: int = 20
    instances_per_rp: int = 10
    seed: int = 0
    n_aps: Optional[int] = None  # default: every AP of the scenario

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.instances_per_rp < 1:
            raise ValueError(f"instances_per_rp must be >= 1, got {self.instances_per_rp}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.n_aps is not None and not 1 <= self.n_aps <= len(self.scenario.access_points):
            raise ValueError(f"n_aps must be in 1..{len(self.scenario.access_points)}, got {self.n_aps}")

    @property
    def ap_ids(self) -> list[int]:
        ids = self.scenario.ap_ids
        return ids if self.n_aps is None else ids[: self.n_aps]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "params": asdict(self.params),
            "m": self.m,
            "instances_per_rp": self.instances_per_rp,
            "seed": self.seed,
            "ap_ids": self.ap_ids,
            "generator": GENERATOR,
        }


def round_half_away(values: np.ndarray) -> np.ndarray:
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def distance_matrix(scenario: Scenario, ap_ids: Sequence[int]) -> np.ndarray:
    """RP x AP distances in meters."""
    return np.array(
        [[euclidean_distance_3d(rp, scenario.ap_position(a)) for a in ap_ids] for _, rp in scenario.reference_points]
    )


def generate_dataset(spec: GenerationSpec) -> list[tuple[SampleMatrix, int]]:
    """Simulated sample matrices, ``instances_per_rp`` per RP, in RP order."""
    scenario, params = spec.scenario, spec.params
    ap_ids = spec.ap_ids
    dist = distance_matrix(scenario, ap_ids)
    if np.any(dist <= 0):
        rp_i, ap_j = np.argwhere(dist <= 0)[0]
        raise ValueError(f"AP {ap_ids[ap_j]} coincides with RP {rp_i + 1}")
    model = params.mean_rssi(dist)  # (R, n)
    rng = np.random.default_rng(spec.seed)
    shape = (len(scenario.reference_points), spec.instances_per_rp, spec.m, len(ap_ids))
    noise = rng.standard_normal(shape) * params.shadowing_sigma
    readings = round_half_away(model[:, None, None, :] + noise)
    dataset = []
    for r, rp_id in enumerate(scenario.rp_ids):
        for i in range(spec.instances_per_rp):
            dataset.append((SampleMatrix(readings[r, i], tuple(ap_ids)), rp_id))
    return dataset
