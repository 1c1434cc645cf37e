"""Raw-readings CSV files and dataset directories.

A dataset directory holds three files:

``readings.csv``
    one row per reading, header ``rp_id,instance_idx,reading_idx,ap_id,rssi_dbm``
    (indices are 0-based).
``readings.json``
    metadata sidecar: AP column order, generation parameters, seed and a
    ``created_at`` timestamp.
``scenario.json``
    the room, RP and AP coordinates.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .geometry import Scenario
from .representations import SampleMatrix

SCHEMA_VERSION = 1
RAW_HEADER = ["rp_id", "instance_idx", "reading_idx", "ap_id", "rssi_dbm"]
READINGS_FILE = "readings.csv"
METADATA_FILE = "readings.json"
SCENARIO_FILE = "scenario.json"


def _fmt_reading(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def write_raw_csv(dataset: Sequence[tuple[SampleMatrix, int]], path: str | Path) -> None:
    instance_counter: dict[int, int] = {}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RAW_HEADER)
        for sample, rp_id in dataset:
            idx = instance_counter.get(rp_id, 0)
            instance_counter[rp_id] = idx + 1
            for r, row in enumerate(sample.readings):
                for ap_id, value in zip(sample.ap_ids, row):
                    writer.writerow([rp_id, idx, r, ap_id, _fmt_reading(value)])


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".json")


def read_raw_csv(path: str | Path, ap_ids: Optional[Sequence[int]] = None) -> list[tuple[SampleMatrix, int]]:
    """Group readings into one m x n matrix per (rp_id, instance_idx).

    Column order is ``ap_ids`` if given, else the sidecar's ``ap_ids``, else
    ascending AP id. Matrices come back in order of first appearance.
    """
    path = Path(path)
    if ap_ids is None and sidecar_path(path).exists():
        ap_ids = read_metadata(sidecar_path(path)).get("ap_ids")
    groups: dict[tuple[int, int], dict[tuple[int, int], float]] = {}
    first_line: dict[tuple[int, int], int] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RAW_HEADER:
            raise ValueError(f"{path}: line 1: expected header {','.join(RAW_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RAW_HEADER):
                raise ValueError(f"{path}: line {lineno}: expected {len(RAW_HEADER)} fields, got {len(row)}")
            try:
                rp_id, inst, reading, ap_id = (int(v) for v in row[:4])
                value = float(row[4])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
            if not np.isfinite(value):
                raise ValueError(f"{path}: line {lineno}: non-finite rssi_dbm {row[4]!r}")
            key = (rp_id, inst)
            cells = groups.setdefault(key, {})
            first_line.setdefault(key, lineno)
            if (reading, ap_id) in cells:
                raise ValueError(f"{path}: line {lineno}: duplicate reading {reading} of AP {ap_id} for RP {rp_id}, instance {inst}")
            cells[(reading, ap_id)] = value
    if not groups:
        raise ValueError(f"{path}: no readings")
    if ap_ids is None:
        ap_ids = sorted({ap for cells in groups.values() for _, ap in cells})
    ap_ids = tuple(int(a) for a in ap_ids)

    dataset = []
    for (rp_id, inst), cells in groups.items():
        readings = sorted({r for r, _ in cells})
        if readings != list(range(len(readings))):
            raise ValueError(f"{path}: RP {rp_id}, instance {inst}: reading indices are not 0..m-1")
        unknown = sorted({ap for _, ap in cells} - set(ap_ids))
        if unknown:
            raise ValueError(f"{path}: RP {rp_id}, instance {inst}: unexpected AP(s) {unknown}")
        matrix = np.empty((len(readings), len(ap_ids)))
        for r in readings:
            for j, ap in enumerate(ap_ids):
                if (r, ap) not in cells:
                    raise ValueError(
                        f"{path}: RP {rp_id}, instance {inst}: missing reading {r} of AP {ap} "
                        f"(group starts at line {first_line[(rp_id, inst)]})"
                    )
                matrix[r, j] = cells[(r, ap)]
        dataset.append((SampleMatrix(matrix, ap_ids), rp_id))
    return dataset


def read_metadata(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc


@dataclass
class DatasetBundle:
    scenario: Scenario
    samples: list[tuple[SampleMatrix, int]]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        known = set(self.scenario.rp_ids)
        ap_known = set(self.scenario.ap_ids)
        for sample, rp_id in self.samples:
            if rp_id not in known:
                raise ValueError(f"dataset references RP {rp_id}, scenario has RPs 1..{len(known)}")
            extra = set(sample.ap_ids) - ap_known
            if extra:
                raise ValueError(f"dataset references AP(s) {sorted(extra)} missing from the scenario")
        if self.samples:
            order = list(self.samples[0][0].ap_ids)
            if "ap_ids" in self.metadata and list(self.metadata["ap_ids"]) != order:
                raise ValueError(f"metadata AP order {self.metadata['ap_ids']} does not match readings {order}")

    @property
    def ap_ids(self) -> tuple[int, ...]:
        return self.samples[0][0].ap_ids

    @property
    def seed(self) -> Optional[int]:
        return self.metadata.get("seed")


def write_dataset(bundle: DatasetBundle, directory: str | Path, timestamp: Optional[str] = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_raw_csv(bundle.samples, directory / READINGS_FILE)
    meta = {
        "schema_version": SCHEMA_VERSION,
        **bundle.metadata,
        "ap_ids": list(bundle.ap_ids),
        "created_at": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    (directory / METADATA_FILE).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    bundle.scenario.save(directory / SCENARIO_FILE)
    return directory


def read_dataset(directory: str | Path) -> DatasetBundle:
    directory = Path(directory)
    for name in (READINGS_FILE, METADATA_FILE, SCENARIO_FILE):
        if not (directory / name).exists():
            raise ValueError(f"{directory}: missing {name}")
    metadata = read_metadata(directory / METADATA_FILE)
    scenario = Scenario.load(directory / SCENARIO_FILE)
    samples = read_raw_csv(directory / READINGS_FILE, metadata.get("ap_ids"))
    return DatasetBundle(scenario, samples, metadata)
