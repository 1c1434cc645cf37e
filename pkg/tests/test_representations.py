import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quartileloc.geometry import Coordinates3D, build_grid_scenario
from quartileloc.representations import (
    FingerprintInstance,
    SampleMatrix,
    TrainingSet,
    build_mean_instance,
    build_quartile_instance,
    build_training_set,
    pca_fit,
    pca_fit_matrix,
    pca_project,
    powed_transform,
    read_instances_csv,
)
from quartileloc.stats import quartiles

from test_stats import oracle_quartiles


def sample(data, ap_ids=None):
    data = np.asarray(data, dtype=float)
    return SampleMatrix(data, tuple(ap_ids or range(1, data.shape[1] + 1)))


def mean_instances(rows):
    return [FingerprintInstance(r, None, "mean") for r in rows]


def test_sample_matrix_validation():
    with pytest.raises(ValueError):
        SampleMatrix(np.empty((0, 3)), (1, 2, 3))
    with pytest.raises(ValueError):
        SampleMatrix(np.zeros((2, 2)), (1,))
    with pytest.raises(ValueError, match="no readings"):
        sample(np.zeros((2, 2))).select_aps([3])


def test_quartile_instance_constant_column():
    inst = build_quartile_instance(sample(np.full((20, 1), -45.0)), rp_label=3)
    assert inst.attributes.tolist() == [-45, -45, -45]
    assert inst.rp_label == 3 and inst.representation_tag == "quartile"


def test_quartile_instance_shape_paper():
    rng = np.random.default_rng(0)
    inst = build_quartile_instance(sample(rng.integers(-80, -30, (20, 8))))
    assert len(inst) == 24


def test_quartile_instance_embeds_oracle_triple():
    rng = np.random.default_rng(4)
    data = rng.integers(-80, -30, (20, 4)).astype(float)
    data[:, 2] = [-50, -48, -46, -44] * 5
    inst = build_quartile_instance(sample(data))
    for j in range(4):
        assert tuple(inst.attributes[3 * j : 3 * j + 3]) == oracle_quartiles(data[:, j].tolist())


def test_quartile_column_locality():
    rng = np.random.default_rng(9)
    data = rng.integers(-80, -30, (15, 5)).astype(float)
    base = build_quartile_instance(sample(data)).attributes
    for j in range(5):
        changed = data.copy()
        changed[:, j] -= rng.integers(1, 10, 15)
        diff = build_quartile_instance(sample(changed)).attributes != base
        assert not diff[np.r_[0 : 3 * j, 3 * j + 3 : 15]].any()


def test_mean_instance():
    assert build_mean_instance(sample(np.full((4, 3), -45.0))).attributes.tolist() == [-45] * 3
    assert build_mean_instance(sample([[-40, -60], [-50, -40]])).attributes.tolist() == [-45, -50]
    rng = np.random.default_rng(1)
    data = rng.uniform(-90, -30, (20, 6))
    got = build_mean_instance(sample(data)).attributes
    assert got == pytest.approx([math.fsum(data[:, j]) / 20 for j in range(6)], rel=1e-12)


def test_powed_values():
    inst = lambda xs: FingerprintInstance(xs, 1, "mean")
    out = powed_transform(inst([-100.0, 0.0, -50.0]), -100.0, math.e)
    assert out.attributes[0] == 0.0
    assert out.attributes[1] == 1.0
    assert out.attributes[2] == pytest.approx(0.5**math.e, rel=1e-12)
    assert out.attributes[2] == pytest.approx(0.15195522, abs=1e-8)
    assert out.representation_tag == "powed" and out.rp_label == 1


def test_powed_rejects_below_floor_with_index():
    with pytest.raises(ValueError, match="attribute 1"):
        powed_transform(FingerprintInstance([-50, -101], None, "mean"))
    with pytest.raises(ValueError):
        powed_transform(FingerprintInstance([-50], None, "quartile"))


@given(st.lists(st.floats(-100, 0), min_size=2, max_size=2))
def test_powed_monotone(xs):
    lo, hi = sorted(xs)
    out = powed_transform(FingerprintInstance([lo, hi], None, "mean")).attributes
    assert out[0] <= out[1]
    assert 0.0 <= out[0] and out[1] <= 1.0


def diagonal_dataset():
    # each axis takes values +-a with all sign combinations: covariance diag(a^2) * 8/7
    signs = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], dtype=float)
    return signs * np.array([2.0, 1.0, 0.5]) + np.array([-50.0, -60.0, -70.0])


def test_pca_diagonal_covariance_recovers_axes():
    data = diagonal_dataset()
    model = pca_fit(mean_instances(data))
    assert np.abs(model.components) == pytest.approx(np.eye(3), abs=1e-12)
    assert model.explained_variance == pytest.approx(np.array([4, 1, 0.25]) * 8 / 7, rel=1e-12)
    projected = np.array([pca_project(model, i).attributes for i in mean_instances(data)])
    centered = data - data.mean(axis=0)
    assert np.abs(projected) == pytest.approx(np.abs(centered), abs=1e-12)


def test_pca_identical_instances_zero_variance():
    model = pca_fit(mean_instances(np.tile([-50.0, -60.0, -70.0, -40.0], (5, 1))))
    assert model.explained_variance.tolist() == [0.0, 0.0, 0.0]
    assert model.components @ model.components.T == pytest.approx(np.eye(3), abs=1e-9)


def test_pca_errors():
    with pytest.raises(ValueError, match="at least 3 attributes"):
        pca_fit(mean_instances(np.zeros((4, 2))))
    with pytest.raises(ValueError, match="at least 2 instances"):
        pca_fit(mean_instances(np.zeros((1, 4))))
    model = pca_fit(mean_instances(diagonal_dataset()))
    with pytest.raises(ValueError, match="expects 3"):
        pca_project(model, FingerprintInstance([1, 2], None, "mean"))


def test_pca_projection_metadata_and_mean():
    model = pca_fit(mean_instances(diagonal_dataset()))
    out = pca_project(model, FingerprintInstance(model.mean_vector, 7, "mean"))
    assert out.attributes.tolist() == [0.0, 0.0, 0.0]
    assert out.rp_label == 7 and out.representation_tag == "pca"


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 8), st.integers(4, 40))
def test_pca_properties(seed, dim, count):
    rng = np.random.default_rng(seed)
    data = rng.normal(-60, 5, (count, dim)) @ rng.normal(size=(dim, dim))
    model = pca_fit_matrix(data)
    c = model.components
    assert c @ c.T == pytest.approx(np.eye(3), abs=1e-9)
    ev = model.explained_variance
    assert np.all(np.diff(ev) <= 0) and np.all(ev >= 0)
    for row in c:
        assert row[np.argmax(np.abs(row))] > 0
    proj = model.project(data)
    assert proj.var(axis=0, ddof=1) == pytest.approx(ev, rel=1e-6, abs=1e-9 * ev[0])
    centered = data - model.mean_vector
    for a, b in rng.integers(0, count, (10, 2)):
        assert np.linalg.norm(proj[a] - proj[b]) <= np.linalg.norm(centered[a] - centered[b]) + 1e-9


@pytest.fixture
def small_scenario():
    return build_grid_scenario((3.5, 3.56, 2.8), 4, 4, 0.87, [])


def labeled(classes, per_class, n_aps=8, seed=0):
    rng = np.random.default_rng(seed)
    return [(sample(rng.integers(-80, -30, (20, n_aps))), rp) for rp in classes for _ in range(per_class)]


def test_training_set_paper_shape(small_scenario):
    ts = build_training_set(labeled(range(1, 17), 10), small_scenario)
    assert ts.attributes.shape == (160, 24)
    assert sorted(ts.class_index) == list(range(1, 17))
    assert all(len(v) == 10 for v in ts.class_index.values())
    assert ts.rp_coordinates[16] == Coordinates3D(3.0625, 3.115, 0.87)
    assert len(ts.instances) == 160


def test_training_set_singleton(small_scenario):
    ts = build_training_set(labeled([5], 1), small_scenario, "mean")
    assert len(ts) == 1 and ts.n_attributes == 8


def test_training_set_imbalance_rejected(small_scenario):
    data = labeled(range(1, 17), 10)
    del data[30]  # RP 4 keeps 9
    with pytest.raises(ValueError, match="RP 4 has 9"):
        build_training_set(data, small_scenario)


def test_training_set_unknown_rp(small_scenario):
    with pytest.raises(ValueError, match="unknown RP id 17"):
        build_training_set(labeled([17], 1), small_scenario)


def test_training_set_truncate(small_scenario):
    ts = build_training_set(labeled(range(1, 17), 2), small_scenario)
    t4 = ts.truncate(4)
    assert t4.n_attributes == 12 and t4.ap_ids == (1, 2, 3, 4)
    assert np.array_equal(t4.attributes, ts.attributes[:, :12])


def test_powed_training_set_records_params(small_scenario):
    ts = build_training_set(labeled([1, 2], 2), small_scenario, "powed", -100, 2.0)
    assert ts.representation_tag == "powed"
    assert ts.params == {"powed_floor": -100, "powed_beta": 2.0}
    assert np.all((ts.attributes >= 0) & (ts.attributes <= 1))


def test_training_set_serialization(small_scenario, tmp_path):
    ts = build_training_set(labeled(range(1, 5), 3), small_scenario)
    path = tmp_path / "fp.csv"
    ts.to_csv(path)
    back = read_instances_csv(path, "quartile")
    assert back == ts.instances
    again = TrainingSet.from_json(ts.to_json())
    assert np.array_equal(again.attributes, ts.attributes)
    assert again.rp_coordinates == ts.rp_coordinates
