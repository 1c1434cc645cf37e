"""kNN position estimation.

Four methods share one pipeline: represent the query sample, find the k
nearest training fingerprints, then turn the neighbors' reference points into
a position.

======  ==========  =========================  ======================
method  metric      representation             position
======  ==========  =========================  ======================
I       euclidean   quartiles                  majority RP
II      euclidean   quartiles                  weighted RP centroid
PS      sorensen    per-AP mean -> powed       majority RP
3PCA    euclidean   per-AP mean -> PCA         weighted RP centroid
======  ==========  =========================  ======================
"""

from __future__ import annotations

import weakref
from collections import Counter
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from .geometry import Coordinates3D
from .metrics import get_metric
from .representations import (
    DEFAULT_POWED_BETA,
    DEFAULT_POWED_FLOOR,
    FingerprintInstance,
    PcaModel,
    SampleMatrix,
    TrainingSet,
    pca_fit_matrix,
    powed_values,
    represent,
)

METHODS = ("I", "II", "PS", "3PCA")
_BASE_REPRESENTATION = {"I": "quartile", "II": "quartile", "PS": "mean", "3PCA": "mean"}
_METRIC = {"I": "euclidean", "II": "euclidean", "PS": "sorensen", "3PCA": "euclidean"}
_USES_CENTROID = {"I": False, "II": True, "PS": False, "3PCA": True}


@dataclass(frozen=True)
class MethodConfig:
    method: str
    k: int = 1
    n_aps: int = 8
    powed_floor: float = DEFAULT_POWED_FLOOR
    powed_beta: float = DEFAULT_POWED_BETA
    pca_components: int = 3

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.n_aps < 1:
            raise ValueError(f"n_aps must be positive, got {self.n_aps}")
        if self.method == "3PCA" and self.n_aps < self.pca_components:
            raise ValueError(
                f"3PCA needs n_aps >= {self.pca_components} (one attribute per AP), got {self.n_aps}"
            )

    @property
    def base_representation(self) -> str:
        return _BASE_REPRESENTATION[self.method]

    @property
    def metric(self) -> str:
        return _METRIC[self.method]

    @property
    def uses_centroid(self) -> bool:
        return _USES_CENTROID[self.method]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "MethodConfig":
        return cls(**doc)


class Neighbor(NamedTuple):
    training_index: int
    distance: float
    rp_label: int


@dataclass(frozen=True)
class PositionEstimate:
    coordinates: Coordinates3D
    method: MethodConfig
    neighbors: tuple[Neighbor, ...]
    tie_broken: bool = False
    rp_id: Optional[int] = None  # set by majority-RP methods

    def to_dict(self) -> dict:
        c = self.coordinates
        return {
            "coordinates": [c.x, c.y, c.z],
            "rp_id": self.rp_id,
            "tie_broken": self.tie_broken,
            "method": self.method.to_dict(),
            "neighbors": [
                {"training_index": n.training_index, "distance": n.distance, "rp_id": n.rp_label}
                for n in self.neighbors
            ],
        }


def k_nearest(training: TrainingSet, query: FingerprintInstance, k: int, metric: str = "euclidean") -> list[Neighbor]:
    """The k training instances closest to ``query``, nearest first.

    Equal distances are ordered by training index.
    """
    if query.representation_tag != training.representation_tag:
        raise ValueError(
            f"query is a {query.representation_tag!r} fingerprint, training set holds "
            f"{training.representation_tag!r}"
        )
    if len(query) != training.n_attributes:
        raise ValueError(f"query has {len(query)} attributes, training set has {training.n_attributes}")
    if not 1 <= k <= len(training):
        raise ValueError(f"k must be in 1..{len(training)}, got {k}")
    distances = np.atleast_1d(get_metric(metric)(query.attributes, training.attributes))
    order = np.argsort(distances, kind="stable")[:k]
    return [Neighbor(int(i), float(distances[i]), int(training.labels[i])) for i in order]


def majority_rp(neighbors: list[Neighbor], training: TrainingSet) -> tuple[int, Coordinates3D, bool]:
    """Most frequent RP among the neighbors.

    On a frequency tie the winner is the tied RP with the nearest member.
    With neighbors sorted by distance that is the first tied RP encountered.
    """
    if not neighbors:
        raise ValueError("no neighbors to vote")
    counts = Counter(n.rp_label for n in neighbors)
    top = max(counts.values())
    tied = {rp for rp, c in counts.items() if c == top}
    winner = next(n.rp_label for n in sorted(neighbors, key=lambda n: (n.distance, n.training_index)) if n.rp_label in tied)
    return winner, training.rp_coordinates[winner], len(tied) > 1


def weighted_centroid(neighbors: list[Neighbor], training: TrainingSet) -> Coordinates3D:
    """Mean of the neighbors' RP coordinates weighted by occurrence count."""
    if not neighbors:
        raise ValueError("no neighbors to average")
    weights = Counter(n.rp_label for n in neighbors)
    total = sum(weights.values())
    points = np.array([training.rp_coordinates[rp].as_array() for rp in weights])
    w = np.array(list(weights.values()), dtype=float)
    return Coordinates3D.from_iterable((w @ points) / total)


class Locator:
    """A method bound to a training set.

    Truncation to ``n_aps``, the powed rescaling and the PCA fit are done once
    here, so repeated :meth:`locate` calls reuse them.
    """

    def __init__(self, config: MethodConfig, training: TrainingSet):
        if training.representation_tag != config.base_representation:
            raise ValueError(
                f"method {config.method} needs a {config.base_representation!r} training set, "
                f"got {training.representation_tag!r}"
            )
        if config.n_aps > len(training.ap_ids):
            raise ValueError(f"n_aps = {config.n_aps} but training set covers {len(training.ap_ids)} APs")
        if config.k > len(training):
            raise ValueError(f"k = {config.k} exceeds training set size {len(training)}")
        self.config = config
        self.ap_ids = training.ap_ids[: config.n_aps]
        base = training.truncate(config.n_aps)
        self.pca: Optional[PcaModel] = None
        if config.method == "PS":
            attrs, tag = powed_values(base.attributes, config.powed_floor, config.powed_beta), "powed"
        elif config.method == "3PCA":
            self.pca = pca_fit_matrix(base.attributes, config.pca_components)
            attrs, tag = self.pca.project(base.attributes), "pca"
        else:
            attrs, tag = base.attributes, base.representation_tag
        self.training = TrainingSet(attrs, base.labels, tag, self.ap_ids, base.rp_coordinates)

    def fingerprint(self, sample: SampleMatrix) -> FingerprintInstance:
        cfg = self.config
        if sample.ap_ids != self.ap_ids:
            sample = sample.select_aps(self.ap_ids)
        inst = represent(sample, cfg.base_representation)
        if cfg.method == "PS":
            return FingerprintInstance(powed_values(inst.attributes, cfg.powed_floor, cfg.powed_beta), None, "powed")
        if cfg.method == "3PCA":
            return FingerprintInstance(self.pca.project(inst.attributes), None, "pca")
        return inst

    def estimate(self, query: FingerprintInstance) -> PositionEstimate:
        cfg = self.config
        neighbors = k_nearest(self.training, query, cfg.k, cfg.metric)
        if cfg.uses_centroid:
            coords = weighted_centroid(neighbors, self.training)
            return PositionEstimate(coords, cfg, tuple(neighbors))
        rp_id, coords, tie = majority_rp(neighbors, self.training)
        return PositionEstimate(coords, cfg, tuple(neighbors), tie, rp_id)

    def locate(self, sample: SampleMatrix) -> PositionEstimate:
        return self.estimate(self.fingerprint(sample))


_locators: "weakref.WeakKeyDictionary[TrainingSet, dict[MethodConfig, Locator]]" = weakref.WeakKeyDictionary()


def get_locator(config: MethodConfig, training: TrainingSet) -> Locator:
    """Cached :class:`Locator` per (training set, config)."""
    per_training = _locators.setdefault(training, {})
    loc = per_training.get(config)
    if loc is None:
        loc = per_training[config] = Locator(config, training)
    return loc


def localize(config: MethodConfig, training: TrainingSet, raw_sample: SampleMatrix) -> PositionEstimate:
    return get_locator(config, training).locate(raw_sample)
