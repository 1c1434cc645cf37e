import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quartileloc.evaluation import (
    EstimateRecord,
    TreatmentResult,
    derive_seed,
    error_cdf,
    m_sweep,
    mean_error,
    mean_time,
    read_results_jsonl,
    summary_table,
    treatment_grid,
    write_cdf_csv,
    write_results_csv,
    write_results_jsonl,
)
from quartileloc.geometry import Coordinates3D
from quartileloc.locator import MethodConfig
from quartileloc.propagation import LogNormalParams

CFG = MethodConfig("I")
ORIGIN = Coordinates3D(0, 0, 0)


def record(err, elapsed=0.0):
    return EstimateRecord.make(ORIGIN, Coordinates3D(err, 0, 0), elapsed, CFG)


def test_record_error_is_distance():
    r = EstimateRecord.make(ORIGIN, Coordinates3D(3, 4, 0), 0.1, CFG)
    assert r.error_m == 5.0


def test_mean_error_examples():
    assert mean_error([EstimateRecord.make(ORIGIN, ORIGIN, 0.0, CFG)]) == 0.0
    assert mean_error([record(1.0), record(3.0)]) == 2.0
    rng = np.random.default_rng(0)
    errs = rng.uniform(0, 2, 160)
    assert mean_error([record(e) for e in errs]) == pytest.approx(math.fsum(errs) / 160, rel=1e-12)
    with pytest.raises(ValueError):
        mean_error([])


@given(st.lists(st.floats(0, 10), min_size=1, max_size=30), st.lists(st.floats(0, 10), min_size=1, max_size=30))
def test_mean_error_concatenation(a, b):
    ra, rb = [record(e) for e in a], [record(e) for e in b]
    combined = (len(a) * mean_error(ra) + len(b) * mean_error(rb)) / (len(a) + len(b))
    assert mean_error(ra + rb) == pytest.approx(combined, rel=1e-12, abs=1e-12)


def test_mean_time():
    assert mean_time([record(0, 0.5)]) == 0.5
    assert mean_time([record(0, 0.2), record(0, 0.4)]) == pytest.approx(0.3, rel=1e-15)
    with pytest.raises(ValueError):
        mean_time([])


def test_cdf_examples():
    assert error_cdf([0.0, 0.0, 0.0]) == [(0.0, 1.0)]
    assert error_cdf([1, 2, 2, 4]) == [(1.0, 0.25), (2.0, 0.75), (4.0, 1.0)]
    with pytest.raises(ValueError):
        error_cdf([])


@given(st.lists(st.floats(0, 5), min_size=1, max_size=100))
def test_cdf_properties(errors):
    cdf = error_cdf(errors)
    fractions = [f for _, f in cdf]
    thresholds = [t for t, _ in cdf]
    assert fractions == sorted(fractions) and thresholds == sorted(thresholds)
    assert cdf[-1] == (max(errors), 1.0)
    for t, f in cdf:
        assert f == sum(e <= t for e in errors) / len(errors)


def test_grid_shapes(scenario, noisy):
    train, test = noisy
    for method in ("I", "II", "PS"):
        results = treatment_grid(train, test, scenario, method)
        assert len(results) == 49
        assert [(r.n_aps, r.k) for r in results] == [(n, k) for n in range(2, 9) for k in range(1, 14, 2)]
        assert sum(r.estimate_count for r in results) == 7840
    results = treatment_grid(train, test, scenario, "3PCA")
    assert len(results) == 42 and min(r.n_aps for r in results) == 3


def test_grid_noiseless_k1_zero(scenario, noiseless):
    train, test = noiseless
    results = treatment_grid(train, test, scenario, "I")
    assert all(r.mean_error_m == 0.0 for r in results if r.k == 1)


def test_grid_methods_agree_at_k1(scenario, noisy):
    train, test = noisy
    a = treatment_grid(train, test, scenario, "I", k_values=(1,))
    b = treatment_grid(train, test, scenario, "II", k_values=(1,))
    assert [r.mean_error_m for r in a] == [r.mean_error_m for r in b]


def test_grid_deterministic_and_records(scenario, noisy):
    train, test = noisy
    a = treatment_grid(train, test, scenario, "PS", n_values=(3, 5), k_values=(1, 3))
    b, recs = treatment_grid(train, test, scenario, "PS", n_values=(3, 5), k_values=(1, 3), keep_records=True)
    assert a == b
    assert set(recs) == {(3, 1), (3, 3), (5, 1), (5, 3)}
    assert mean_error(recs[(5, 3)]) == b[3].mean_error_m
    assert all(r.elapsed_s >= 0 for r in recs[(3, 1)])


def test_grid_incompatible(scenario, noisy):
    train, test = noisy
    narrowed = [(s.select_aps([1, 2, 3]), rp) for s, rp in test]
    with pytest.raises(ValueError, match="AP order"):
        treatment_grid(train, narrowed, scenario, "I")
    with pytest.raises(ValueError, match="exceeds"):
        treatment_grid(train, test, scenario, "I", n_values=(9,))


def test_m_sweep(scenario):
    cfg = MethodConfig("I", 1, 4)
    rows = m_sweep(scenario, LogNormalParams(shadowing_sigma=0), cfg, seed=7, instances_per_rp=2)
    assert [r.m for r in rows] == [5, 10, 15, 20]
    assert all(r.mean_error_m == 0.0 for r in rows)
    assert all(r.mean_time_s > 0 for r in rows)
    assert len(m_sweep(scenario, LogNormalParams(), cfg, (10,), seed=1, instances_per_rp=2)) == 1
    with pytest.raises(ValueError):
        m_sweep(scenario, LogNormalParams(), cfg, ())


def test_derive_seed_stable():
    assert derive_seed(3, 5, 0) == derive_seed(3, 5, 0)
    assert derive_seed(3, 5, 0) != derive_seed(3, 5, 1)
    assert 0 <= derive_seed(2**64 - 1, 1) < 2**64


def test_result_files(tmp_path):
    results = [TreatmentResult("I", 2, 1, 0.125, 160), TreatmentResult("I", 2, 3, 0.0, 160)]
    write_results_jsonl(results, tmp_path / "r.jsonl", {"train_seed": 1})
    assert read_results_jsonl(tmp_path / "r.jsonl") == results
    write_results_csv(results, tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text().splitlines()[1] == "I,2,1,0.125,160"
    write_cdf_csv(error_cdf([r.mean_error_m for r in results]), tmp_path / "cdf.csv")
    assert (tmp_path / "cdf.csv").read_text().splitlines() == ["threshold_m,cumulative_fraction", "0.0,0.5", "0.125,1.0"]
    (tmp_path / "bad.jsonl").write_text('{"method": "I"}\n')
    with pytest.raises(ValueError, match="line 1"):
        read_results_jsonl(tmp_path / "bad.jsonl")
    assert "0.1250" in summary_table(results)
