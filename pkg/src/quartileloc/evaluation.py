"""Evaluation protocol: mean error, error CDF, (n, k) treatment grid, m-sweep."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .geometry import Coordinates3D, Scenario, euclidean_distance_3d
from .locator import Locator, MethodConfig
from .propagation import GenerationSpec, LogNormalParams, generate_dataset
from .representations import SampleMatrix, build_training_set

SCHEMA_VERSION = 1
DEFAULT_N_VALUES = tuple(range(2, 9))
DEFAULT_K_VALUES = tuple(range(1, 14, 2))
DEFAULT_M_VALUES = (5, 10, 15, 20)

RawDataset = Sequence[tuple[SampleMatrix, int]]


@dataclass(frozen=True)
class EstimateRecord:
    true_position: Coordinates3D
    estimated_position: Coordinates3D
    error_m: float
    elapsed_s: float
    config: MethodConfig

    @classmethod
    def make(cls, true_position, estimated_position, elapsed_s, config) -> "EstimateRecord":
        return cls(true_position, estimated_position, euclidean_distance_3d(true_position, estimated_position), elapsed_s, config)


@dataclass(frozen=True)
class TreatmentResult:
    method: str
    n_aps: int
    k: int
    mean_error_m: float
    estimate_count: int

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, **asdict(self)}


def mean_error(records: Sequence[EstimateRecord]) -> float:
    if not records:
        raise ValueError("mean error of an empty record list")
    return float(np.mean([r.error_m for r in records]))


def mean_time(records: Sequence[EstimateRecord]) -> float:
    if not records:
        raise ValueError("mean time of an empty record list")
    return float(np.mean([r.elapsed_s for r in records]))


def error_cdf(errors: Iterable[float]) -> list[tuple[float, float]]:
    """Empirical CDF as (threshold, fraction of errors <= threshold) steps."""
    values = np.sort(np.asarray(list(errors), dtype=float))
    if values.size == 0:
        raise ValueError("CDF of an empty error list")
    thresholds, counts = np.unique(values, return_counts=True)
    cumulative = np.cumsum(counts)
    total = cumulative[-1]
    return [(float(t), float(c / total)) for t, c in zip(thresholds, cumulative)]


def _check_compatible(train_raw: RawDataset, test_raw: RawDataset) -> tuple[int, ...]:
    if not train_raw or not test_raw:
        raise ValueError("training and test datasets must be non-empty")
    ap_ids = train_raw[0][0].ap_ids
    for name, data in (("training", train_raw), ("test", test_raw)):
        for sample, rp in data:
            if sample.ap_ids != ap_ids:
                raise ValueError(f"{name} sample for RP {rp} has AP order {sample.ap_ids}, expected {ap_ids}")
    return ap_ids


def evaluate_config(
    config: MethodConfig,
    locator: Locator,
    test_raw: RawDataset,
    scenario: Scenario,
) -> list[EstimateRecord]:
    """Localize every test sample; timing covers fingerprinting and classification only."""
    records = []
    for sample, rp_id in test_raw:
        start = time.perf_counter()
        estimate = locator.locate(sample)
        elapsed = time.perf_counter() - start
        records.append(EstimateRecord.make(scenario.rp_position(rp_id), estimate.coordinates, elapsed, config))
    return records


def treatment_grid(
    train_raw: RawDataset,
    test_raw: RawDataset,
    scenario: Scenario,
    method: str,
    n_values: Sequence[int] = DEFAULT_N_VALUES,
    k_values: Sequence[int] = DEFAULT_K_VALUES,
    base_config: Optional[MethodConfig] = None,
    keep_records: bool = False,
):
    """Mean error of ``method`` for every (n_aps, k) pair, ordered by n then k.

    3PCA skips n below its component count. With ``keep_records`` a
    ``(results, records)`` pair is returned, ``records`` mapping (n, k) to the
    per-estimate records.
    """
    ap_ids = _check_compatible(train_raw, test_raw)
    base = replace(base_config, method=method) if base_config else MethodConfig(method, n_aps=len(ap_ids))
    training = build_training_set(train_raw, scenario, base.base_representation)
    results, all_records = [], {}
    for n in n_values:
        if n > len(ap_ids):
            raise ValueError(f"n = {n} exceeds the {len(ap_ids)} APs in the dataset")
        if method == "3PCA" and n < base.pca_components:
            continue
        for k in k_values:
            config = replace(base, n_aps=n, k=k)
            records = evaluate_config(config, Locator(config, training), test_raw, scenario)
            results.append(TreatmentResult(method, n, k, mean_error(records), len(records)))
            if keep_records:
                all_records[(n, k)] = records
    return (results, all_records) if keep_records else results


def derive_seed(seed: int, *tags: int) -> int:
    """Independent 64-bit seed for a (seed, tags...) combination."""
    return int(np.random.SeedSequence([seed, *tags]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SweepRow:
    m: int
    mean_error_m: float
    mean_time_s: float


def m_sweep(
    scenario: Scenario,
    params: LogNormalParams,
    config: MethodConfig,
    m_values: Sequence[int] = DEFAULT_M_VALUES,
    seed: int = 0,
    instances_per_rp: int = 10,
) -> list[SweepRow]:
    """Regenerate train/test data for each m and evaluate one configuration.

    Training data uses ``derive_seed(seed, m, 0)``, test data
    ``derive_seed(seed, m, 1)``.
    """
    if not m_values:
        raise ValueError("m_values must be non-empty")
    rows = []
    for m in m_values:
        train = generate_dataset(GenerationSpec(scenario, params, m, instances_per_rp, derive_seed(seed, m, 0)))
        test = generate_dataset(GenerationSpec(scenario, params, m, instances_per_rp, derive_seed(seed, m, 1)))
        training = build_training_set(train, scenario, config.base_representation)
        records = evaluate_config(config, Locator(config, training), test, scenario)
        rows.append(SweepRow(m, mean_error(records), mean_time(records)))
    return rows


def write_results_jsonl(results: Sequence[TreatmentResult], path: str | Path, extra: Optional[dict] = None) -> None:
    with open(path, "w") as fh:
        fh.write(results_jsonl(results, extra))


def results_jsonl(results: Sequence[TreatmentResult], extra: Optional[dict] = None) -> str:
    lines = [json.dumps({**r.to_dict(), **(extra or {})}, sort_keys=True) for r in results]
    return "".join(line + "\n" for line in lines)


def read_results_jsonl(path: str | Path) -> list[TreatmentResult]:
    results = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                results.append(
                    TreatmentResult(doc["method"], int(doc["n_aps"]), int(doc["k"]), float(doc["mean_error_m"]), int(doc["estimate_count"]))
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}: line {lineno}: invalid result record ({exc})") from exc
    return results


def write_results_csv(results: Sequence[TreatmentResult], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "n_aps", "k", "mean_error_m", "estimate_count"])
        for r in results:
            writer.writerow([r.method, r.n_aps, r.k, repr(r.mean_error_m), r.estimate_count])


def write_cdf_csv(cdf: Sequence[tuple[float, float]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold_m", "cumulative_fraction"])
        for t, f in cdf:
            writer.writerow([repr(t), repr(f)])


def summary_table(results: Sequence[TreatmentResult]) -> str:
    """Mean error per treatment laid out with n as rows and k as columns."""
    ks = sorted({r.k for r in results})
    ns = sorted({r.n_aps for r in results})
    cell = {(r.n_aps, r.k): r.mean_error_m for r in results}
    lines = ["n\\k " + "".join(f"{k:>9d}" for k in ks)]
    for n in ns:
        lines.append(f"{n:<4d}" + "".join(f"{cell[(n, k)]:9.4f}" if (n, k) in cell else " " * 9 for k in ks))
    return "\n".join(lines)
