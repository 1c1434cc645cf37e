"""Turn raw RSSI sample matrices into fingerprint vectors.

Four representations are supported:

* ``quartile`` -- (Q1, Q2, Q3) of every AP column, 3n attributes.
* ``mean`` -- arithmetic mean of every AP column, n attributes.
* ``powed`` -- mean values rescaled into [0, 1] by a power law.
* ``pca`` -- mean values projected onto principal components.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .geometry import Coordinates3D, Scenario
from .stats import column_quartiles

SCHEMA_VERSION = 1
REPRESENTATIONS = ("quartile", "mean", "powed", "pca")
ATTRIBUTES_PER_AP = {"quartile": 3, "mean": 1, "powed": 1}

DEFAULT_POWED_FLOOR = -100.0
DEFAULT_POWED_BETA = math.e


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """m readings (rows) of n access points (columns)."""

    readings: np.ndarray
    ap_ids: tuple[int, ...]

    def __post_init__(self):
        readings = np.array(self.readings, dtype=float)
        if readings.ndim != 2 or readings.shape[0] < 1 or readings.shape[1] < 1:
            raise ValueError(f"sample matrix must be m x n with m, n >= 1, got shape {readings.shape}")
        if not np.all(np.isfinite(readings)):
            raise ValueError("sample matrix contains non-finite readings")
        ap_ids = tuple(int(a) for a in self.ap_ids)
        if len(ap_ids) != readings.shape[1]:
            raise ValueError(f"{len(ap_ids)} AP ids for {readings.shape[1]} columns")
        if len(set(ap_ids)) != len(ap_ids):
            raise ValueError(f"duplicate AP ids {ap_ids}")
        readings.flags.writeable = False
        object.__setattr__(self, "readings", readings)
        object.__setattr__(self, "ap_ids", ap_ids)

    @property
    def m(self) -> int:
        return self.readings.shape[0]

    @property
    def n(self) -> int:
        return self.readings.shape[1]

    def select_aps(self, ap_ids: Sequence[int]) -> "SampleMatrix":
        """Columns for ``ap_ids`` in the given order."""
        index = {a: j for j, a in enumerate(self.ap_ids)}
        missing = [a for a in ap_ids if a not in index]
        if missing:
            raise ValueError(f"sample has no readings for AP(s) {missing}")
        cols = [index[a] for a in ap_ids]
        return SampleMatrix(self.readings[:, cols], tuple(ap_ids))

    def __eq__(self, other):
        if not isinstance(other, SampleMatrix):
            return NotImplemented
        return self.ap_ids == other.ap_ids and np.array_equal(self.readings, other.readings)

    __hash__ = object.__hash__


@dataclass(frozen=True, eq=False)
class FingerprintInstance:
    attributes: np.ndarray
    rp_label: Optional[int] = None
    representation_tag: str = "quartile"

    def __post_init__(self):
        if self.representation_tag not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation_tag!r}")
        attrs = np.array(self.attributes, dtype=float).reshape(-1)
        attrs.flags.writeable = False
        object.__setattr__(self, "attributes", attrs)

    def __len__(self):
        return self.attributes.shape[0]

    def __eq__(self, other):
        if not isinstance(other, FingerprintInstance):
            return NotImplemented
        return (
            self.rp_label == other.rp_label
            and self.representation_tag == other.representation_tag
            and np.array_equal(self.attributes, other.attributes)
        )

    __hash__ = object.__hash__


def build_quartile_instance(sample: SampleMatrix, rp_label: Optional[int] = None) -> FingerprintInstance:
    return FingerprintInstance(column_quartiles(sample.readings).reshape(-1), rp_label, "quartile")


def build_mean_instance(sample: SampleMatrix, rp_label: Optional[int] = None) -> FingerprintInstance:
    return FingerprintInstance(sample.readings.mean(axis=0), rp_label, "mean")


def powed_values(values: np.ndarray, floor_dbm: float = DEFAULT_POWED_FLOOR, beta: float = DEFAULT_POWED_BETA) -> np.ndarray:
    """Map dBm values onto [0, 1]: ((x - floor) / -floor) ** beta."""
    if not floor_dbm < 0:
        raise ValueError(f"powed floor must be negative, got {floor_dbm}")
    values = np.asarray(values, dtype=float)
    below = np.flatnonzero(values < floor_dbm)
    if below.size:
        i = int(below[0])
        raise ValueError(f"attribute {i} = {values.flat[i]} dBm lies below the powed floor {floor_dbm} dBm")
    return (values - floor_dbm) ** beta / (-floor_dbm) ** beta


def powed_transform(
    instance: FingerprintInstance,
    floor_dbm: float = DEFAULT_POWED_FLOOR,
    beta: float = DEFAULT_POWED_BETA,
) -> FingerprintInstance:
    if instance.representation_tag != "mean":
        raise ValueError(f"powed transform expects a mean instance, got {instance.representation_tag!r}")
    return FingerprintInstance(powed_values(instance.attributes, floor_dbm, beta), instance.rp_label, "powed")


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean_vector: np.ndarray
    components: np.ndarray  # (n_components, n), orthonormal rows
    explained_variance: np.ndarray

    @property
    def dimension(self) -> int:
        return self.mean_vector.shape[0]

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def project(self, data: np.ndarray) -> np.ndarray:
        """Project rows of ``data`` (or a single vector)."""
        return (np.asarray(data, dtype=float) - self.mean_vector) @ self.components.T


def pca_fit_matrix(data: np.ndarray, n_components: int = 3) -> PcaModel:
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("PCA input must be a 2-D matrix")
    count, dim = data.shape
    if dim < n_components:
        raise ValueError(f"PCA needs at least {n_components} attributes, got {dim}")
    if count < 2:
        raise ValueError(f"PCA needs at least 2 instances, got {count}")
    mean_vector = data.mean(axis=0)
    centered = data - mean_vector
    cov = centered.T @ centered / (count - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    # eigh returns ascending eigenvalues; stable sort keeps equal ones in a fixed order
    order = np.argsort(-eigvals, kind="stable")[:n_components]
    components = eigvecs[:, order].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    variance = np.clip(eigvals[order], 0.0, None)
    for arr in (mean_vector, components, variance):
        arr.flags.writeable = False
    return PcaModel(mean_vector, components, variance)


def pca_fit(training_instances: Sequence[FingerprintInstance], n_components: int = 3) -> PcaModel:
    if not training_instances:
        raise ValueError("PCA needs at least 2 instances, got 0")
    tags = {inst.representation_tag for inst in training_instances}
    if tags != {"mean"}:
        raise ValueError(f"PCA is fit on mean instances, got {sorted(tags)}")
    return pca_fit_matrix(np.vstack([inst.attributes for inst in training_instances]), n_components)


def pca_project(model: PcaModel, instance: FingerprintInstance) -> FingerprintInstance:
    if len(instance) != model.dimension:
        raise ValueError(f"instance has {len(instance)} attributes, PCA model expects {model.dimension}")
    return FingerprintInstance(model.project(instance.attributes), instance.rp_label, "pca")


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Labeled, class-balanced fingerprints stored as one attribute matrix.

    ``ap_ids`` is the AP order the attributes were built from and ``params``
    records how the representation was produced.
    """

    attributes: np.ndarray
    labels: np.ndarray
    representation_tag: str
    ap_ids: tuple[int, ...]
    rp_coordinates: Mapping[int, Coordinates3D]
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        attrs = np.array(self.attributes, dtype=float)
        labels = np.array(self.labels, dtype=int).reshape(-1)
        if attrs.ndim != 2 or attrs.shape[0] == 0:
            raise ValueError("training set needs at least one instance")
        if labels.shape[0] != attrs.shape[0]:
            raise ValueError(f"{labels.shape[0]} labels for {attrs.shape[0]} instances")
        if self.representation_tag not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation_tag!r}")
        missing = sorted(set(labels.tolist()) - set(self.rp_coordinates))
        if missing:
            raise ValueError(f"no coordinates for RP(s) {missing}")
        counts = Counter(labels.tolist())
        expected = max(counts.values())
        short = sorted(rp for rp, c in counts.items() if c != expected)
        if short:
            raise ValueError(
                f"training set is not class-balanced: RP {short[0]} has {counts[short[0]]} "
                f"instances, expected {expected}"
            )
        attrs.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ap_ids", tuple(int(a) for a in self.ap_ids))
        object.__setattr__(self, "rp_coordinates", dict(self.rp_coordinates))
        object.__setattr__(self, "params", dict(self.params))

    def __len__(self):
        return self.attributes.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.attributes.shape[1]

    @property
    def instances(self) -> list[FingerprintInstance]:
        return [
            FingerprintInstance(row, int(label), self.representation_tag)
            for row, label in zip(self.attributes, self.labels)
        ]

    @property
    def class_index(self) -> dict[int, list[int]]:
        index: dict[int, list[int]] = {}
        for i, label in enumerate(self.labels.tolist()):
            index.setdefault(label, []).append(i)
        return index

    def truncate(self, n_aps: int) -> "TrainingSet":
        """Keep only the attributes of the first ``n_aps`` APs."""
        per_ap = ATTRIBUTES_PER_AP.get(self.representation_tag)
        if per_ap is None:
            raise ValueError(f"{self.representation_tag!r} fingerprints cannot be truncated by AP")
        if not 1 <= n_aps <= len(self.ap_ids):
            raise ValueError(f"n_aps must be in 1..{len(self.ap_ids)}, got {n_aps}")
        if n_aps == len(self.ap_ids):
            return self
        return TrainingSet(
            self.attributes[:, : per_ap * n_aps],
            self.labels,
            self.representation_tag,
            self.ap_ids[:n_aps],
            self.rp_coordinates,
            self.params,
        )

    def to_csv(self, path: str | Path) -> None:
        write_instances_csv(self.instances, path)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "representation": self.representation_tag,
            "ap_ids": list(self.ap_ids),
            "params": dict(self.params),
            "rp_coordinates": {
                str(rp): [c.x, c.y, c.z] for rp, c in sorted(self.rp_coordinates.items())
            },
            "instances": [
                {"rp_id": int(label), "attributes": row.tolist()}
                for row, label in zip(self.attributes, self.labels)
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TrainingSet":
        try:
            rows = doc["instances"]
            return cls(
                np.array([r["attributes"] for r in rows], dtype=float),
                np.array([r["rp_id"] for r in rows], dtype=int),
                doc["representation"],
                tuple(doc["ap_ids"]),
                {int(k): Coordinates3D.from_iterable(v) for k, v in doc["rp_coordinates"].items()},
                doc.get("params", {}),
            )
        except KeyError as exc:
            raise ValueError(f"malformed training set document: missing field {exc}") from exc


def represent(
    sample: SampleMatrix,
    representation: str,
    rp_label: Optional[int] = None,
    powed_floor: float = DEFAULT_POWED_FLOOR,
    powed_beta: float = DEFAULT_POWED_BETA,
) -> FingerprintInstance:
    if representation == "quartile":
        return build_quartile_instance(sample, rp_label)
    if representation == "mean":
        return build_mean_instance(sample, rp_label)
    if representation == "powed":
        return powed_transform(build_mean_instance(sample, rp_label), powed_floor, powed_beta)
    raise ValueError(f"representation must be quartile, mean or powed, got {representation!r}")


def build_training_set(
    labeled_samples: Iterable[tuple[SampleMatrix, int]],
    scenario: Scenario,
    representation: str = "quartile",
    powed_floor: float = DEFAULT_POWED_FLOOR,
    powed_beta: float = DEFAULT_POWED_BETA,
) -> TrainingSet:
    labeled_samples = list(labeled_samples)
    if not labeled_samples:
        raise ValueError("no labeled samples given")
    known = set(scenario.rp_ids)
    ap_ids = labeled_samples[0][0].ap_ids
    rows, labels = [], []
    for sample, rp_id in labeled_samples:
        if rp_id not in known:
            raise ValueError(f"unknown RP id {rp_id}: scenario has RPs 1..{len(known)}")
        if sample.ap_ids != ap_ids:
            sample = sample.select_aps(ap_ids)
        rows.append(represent(sample, representation, rp_id, powed_floor, powed_beta).attributes)
        labels.append(rp_id)
    params = {"powed_floor": powed_floor, "powed_beta": powed_beta} if representation == "powed" else {}
    return TrainingSet(np.vstack(rows), np.array(labels), representation, ap_ids, scenario.rp_coordinates(), params)


def _fmt(value: float) -> str:
    return repr(float(value))


def write_instances_csv(instances: Sequence[FingerprintInstance], path: str | Path) -> None:
    """One row per instance: rp_id followed by the attributes."""
    if not instances:
        raise ValueError("no instances to write")
    width = len(instances[0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rp_id"] + [f"a{i}" for i in range(1, width + 1)])
        for inst in instances:
            label = "" if inst.rp_label is None else inst.rp_label
            writer.writerow([label] + [_fmt(v) for v in inst.attributes])


def read_instances_csv(path: str | Path, representation_tag: str) -> list[FingerprintInstance]:
    instances = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "rp_id":
            raise ValueError(f"{path}: line 1: expected header starting with rp_id")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                label = int(row[0]) if row[0] else None
                attrs = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
            instances.append(FingerprintInstance(attrs, label, representation_tag))
    return instances


def save_training_set_json(training: TrainingSet, path: str | Path) -> None:
    Path(path).write_text(json.dumps(training.to_json(), indent=1) + "\n")
