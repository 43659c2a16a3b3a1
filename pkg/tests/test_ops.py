import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import common_count, disparity_groups
from smellml.dataset import TabularDataset
from smellml.errors import SchemaError
from smellml.ops import (
    build_multilabel,
    detect_disparity,
    find_common_instances,
    instance_key,
    merge_single_label,
    remove_disparity,
)
from smellml.synthetic import random_dataset


def ds(X, y, label="c", names=None, name="d"):
    X = np.asarray(X, dtype=float)
    names = names or [f"m{j}" for j in range(X.shape[1])]
    return TabularDataset(name, names, X, [label], np.asarray(y).reshape(-1, 1))


def test_instance_key_exact():
    assert instance_key([1.0, -0.0]) == instance_key([1.0, 0.0])
    assert instance_key([0.1 + 0.2]) != instance_key([0.3])


def test_common_self_and_disjoint():
    a = ds([[1, 2], [3, 4], [5, 6]], [1, 0, 1])
    assert find_common_instances(a, a) == [(0, 0), (1, 1), (2, 2)]
    b = ds([[7, 8], [9, 9]], [1, 1], label="e")
    assert find_common_instances(a, b) == []


def test_common_first_match_with_duplicates():
    a = ds([[1, 1], [1, 1], [2, 2]], [0, 1, 0])
    b = ds([[1, 1], [2, 2], [1, 1], [1, 1]], [1, 1, 0, 0])
    assert find_common_instances(a, b) == [(0, 0), (1, 2), (2, 1)]


def test_schema_mismatch():
    a = ds([[1, 2]], [1])
    with pytest.raises(SchemaError):
        find_common_instances(a, ds([[1, 2]], [1], names=["x", "y"]))
    with pytest.raises(SchemaError):
        merge_single_label(a, ds([[1, 2, 3]], [1]))


def test_merge_disjoint():
    a = ds([[1, 1], [2, 2], [3, 3]], [1, 0, 1])
    b = ds([[8, 8], [9, 9]], [1, 1], label="e")
    m = merge_single_label(a, b)
    assert m.n_instances == 5
    assert m.label_names == ("c",)
    np.testing.assert_array_equal(m.Y[:, 0], [1, 0, 1, 0, 0])
    np.testing.assert_array_equal(m.X[3:], b.X)


def test_self_merge_idempotent_when_skipping_present():
    a = ds([[1, 1], [2, 2], [3, 3]], [1, 0, 1])
    assert merge_single_label(a, a, skip_present=True) == a


def test_merge_appends_all_rows_by_default():
    a = ds([[1, 1], [2, 2]], [1, 0])
    b = ds([[1, 1], [5, 5]], [1, 1], label="e")
    m = merge_single_label(a, b)
    assert m.n_instances == 4
    rep = detect_disparity(m)
    assert rep.total_conflicting_rows == 2 and rep.n_positive_rows == 1


def test_detect_and_remove_small():
    d = ds([[1, 1], [2, 2], [1, 1], [3, 3], [2, 2], [3, 3]], [1, 0, 0, 1, 0, 1])
    rep = detect_disparity(d)
    assert len(rep.groups) == 1
    assert rep.groups[0].rows == (0, 2)
    clean = remove_disparity(d)
    assert clean.n_instances == 5
    assert detect_disparity(clean).is_clean
    # duplicate negatives without conflict survive
    np.testing.assert_array_equal(clean.X[:, 0], [1, 2, 3, 2, 3])


def test_disparity_free_is_noop():
    d = ds([[1, 1], [2, 2]], [1, 0])
    assert detect_disparity(d).is_clean
    assert remove_disparity(d) == d


def test_detect_requires_single_label():
    d = TabularDataset("m", ["a"], [[1.0]], ["x", "y"], [[1, 0]])
    with pytest.raises(SchemaError):
        detect_disparity(d)


def test_build_multilabel_disjoint():
    a = ds([[1, 1], [2, 2], [3, 3]], [1, 0, 1], label="LM")
    b = ds([[8, 8], [9, 9]], [1, 0], label="FE")
    m = build_multilabel(a, b)
    assert m.n_instances == 5
    assert m.label_names == ("LM", "FE")
    assert (m.Y.sum(axis=1) <= 1).all()
    np.testing.assert_array_equal(m.Y, [[1, 0], [0, 0], [1, 0], [0, 1], [0, 0]])


def test_build_multilabel_duplicate_label():
    a = ds([[1, 1]], [1], label="LM")
    with pytest.raises(SchemaError):
        build_multilabel(a, a)


def test_reference_shapes(reference):
    lm, fe, _ = reference
    assert len(find_common_instances(lm, fe)) == 395
    for target, other, conflicts, kept, neg in ((lm, fe, 132, 708, 568), (fe, lm, 125, 715, 575)):
        merged = merge_single_label(target, other)
        assert merged.n_instances == 840
        assert int(merged.Y.sum()) == 140
        rep = detect_disparity(merged)
        assert rep.n_positive_rows == conflicts
        clean = remove_disparity(merged)
        assert (clean.n_instances, int(clean.Y.sum()), int((clean.Y == 0).sum())) == (kept, 140, neg)
    m = build_multilabel(lm, fe)
    assert m.n_instances == 445
    assert m.label_sets() == {"11": 85, "10": 55, "01": 55, "00": 250}
    assert int(m.Y.sum()) == 280


seeds = st.integers(0, 2**32 - 1)


def _pair(seed):
    rng = np.random.default_rng(seed)
    n_a, n_b = rng.integers(0, 40, size=2)
    f = int(rng.integers(1, 4))
    a = random_dataset(rng, int(n_a), f, integer=True, label_names=["a"])
    b = random_dataset(rng, int(n_b), f, integer=True, label_names=["b"])
    # copy some rows of a into b so overlaps are common
    if n_a and n_b:
        k = int(rng.integers(0, min(n_a, n_b) + 1))
        Xb = b.X.copy()
        Xb[:k] = a.X[rng.choice(n_a, size=k, replace=False)]
        b = TabularDataset("b", b.feature_names, Xb, ["b"], b.Y)
    return a, b


@given(seeds)
def test_common_matches_oracle(seed):
    a, b = _pair(seed)
    assert len(find_common_instances(a, b)) == common_count(a.X.tolist(), b.X.tolist())


@given(seeds)
def test_conservation(seed):
    a, b = _pair(seed)
    m = build_multilabel(a, b)
    assert m.n_instances == a.n_instances + b.n_instances - len(find_common_instances(a, b))


@given(seeds)
def test_restriction_consistency(seed):
    a, b = _pair(seed)
    m = build_multilabel(a, b)
    np.testing.assert_array_equal(m.X[: a.n_instances], a.X)
    np.testing.assert_array_equal(m.Y[: a.n_instances, 0], a.Y[:, 0])
    # every b row appears with its label, either paired or appended
    pairs = dict((j, i) for i, j in find_common_instances(a, b))
    tail = a.n_instances
    for j in range(b.n_instances):
        row = pairs.get(j)
        if row is None:
            row, tail = tail, tail + 1
            assert m.Y[row, 0] == 0
        np.testing.assert_array_equal(m.X[row], b.X[j])
        assert m.Y[row, 1] == b.Y[j, 0]


@given(seeds)
def test_disparity_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    d = random_dataset(rng, int(rng.integers(0, 60)), int(rng.integers(1, 3)), integer=True)
    rep = detect_disparity(d)
    assert {frozenset(g.rows) for g in rep.groups} == disparity_groups(d.X.tolist(), d.Y[:, 0])
    assert all(len(g.rows) >= 2 and len(set(g.labels)) >= 2 for g in rep.groups)
    clean = remove_disparity(d)
    assert detect_disparity(clean).is_clean
    assert int(clean.Y.sum()) == int(d.Y.sum())
