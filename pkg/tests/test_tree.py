import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import best_split
from smellml.errors import EmptyData, SchemaError
from smellml.learners import TreeModel, TreeParams, add_errors, dump_model, load_model, predict, predict_proba, train_tree

UNPRUNED = TreeParams(pruned=False, min_instances=1)


def test_pure_dataset_single_leaf():
    X = np.arange(6, dtype=float).reshape(3, 2)
    m = train_tree(X, np.array([1, 1, 1]))
    assert m.node_count == 1
    assert predict(m, [100.0, -3.0]) == 1
    np.testing.assert_allclose(predict_proba(m, [0.0, 0.0]), [1.0])


def test_one_dimensional_example():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array(["A", "A", "B", "B"])
    m = train_tree(X, y, UNPRUNED)
    assert m.feature[0] == 0 and m.threshold[0] == 2.5
    assert (m.predict(X) == y).all()
    assert predict(m, [1.7]) == "A"
    assert predict(m, [2.5]) == "A"
    assert predict(m, [2.5000001]) == "B"


def test_laplace_probabilities():
    X = np.array([[0.0], [1.0], [2.0], [3.0], [10.0], [11.0], [12.0], [13.0]])
    y = np.array([0, 0, 0, 1, 1, 1, 1, 1])
    m = train_tree(X, y, TreeParams(pruned=False, min_instances=4))
    # two leaves with counts (3,1) and (0,4)
    np.testing.assert_allclose(m.predict_proba([[0.5], [12.0]]), [[4 / 6, 2 / 6], [1 / 6, 5 / 6]])


def test_argmax_tie_lowest_class():
    m = TreeModel([0, 1], 1, [-1], [0.0], [-1], [-1], [[2.0, 2.0]])
    assert predict(m, [0.0]) == 0


def test_errors():
    with pytest.raises(EmptyData):
        train_tree(np.zeros((0, 3)), np.zeros(0))
    with pytest.raises(SchemaError):
        train_tree(np.zeros((3, 0)), np.zeros(3))
    m = train_tree(np.eye(3), np.array([0, 1, 0]))
    with pytest.raises(SchemaError):
        m.predict(np.zeros(4))


def test_add_errors_reference_values():
    # zero observed errors has the closed form n(1 - cf^(1/n))
    assert add_errors(6, 0, 0.25) == pytest.approx(6 * (1 - 0.25 ** (1 / 6)))
    # monotone in observed errors and capped at n - e
    vals = [add_errors(20, e, 0.25) for e in range(0, 20)]
    assert all(v >= 0 for v in vals)
    assert add_errors(5, 5, 0.25) == 0.0
    assert add_errors(0, 0, 0.25) == 0.0


seeds = st.integers(0, 2**32 - 1)


def _data(seed, n_max=60, f_max=5, k=2, integer=True):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_max))
    f = int(rng.integers(1, f_max + 1))
    X = rng.integers(0, 6, size=(n, f)).astype(float) if integer else rng.normal(size=(n, f))
    y = rng.integers(0, k, size=n)
    return X, y


@given(seeds, st.integers(1, 4))
def test_root_split_matches_exhaustive_oracle(seed, min_instances):
    X, y = _data(seed, k=3)
    m = train_tree(X, y, TreeParams(pruned=False, min_instances=min_instances))
    expected = None
    if len(np.unique(y)) > 1 and len(y) >= 2 * min_instances:
        expected = best_split(X, y, min_instances)
    if expected is None:
        assert m.node_count == 1
    else:
        assert (int(m.feature[0]), float(m.threshold[0])) == pytest.approx(expected)


@given(seeds)
def test_memorization(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 120))
    X = rng.normal(size=(n, int(rng.integers(1, 6))))
    y = rng.integers(0, 3, size=n)
    m = train_tree(X, y, UNPRUNED)
    assert (m.predict(X) == y).all()


@given(seeds)
def test_pruning_never_grows(seed):
    X, y = _data(seed, n_max=150)
    full = train_tree(X, y, TreeParams(pruned=False))
    pruned = train_tree(X, y, TreeParams(pruned=True))
    assert pruned.node_count <= full.node_count


@given(seeds)
def test_probabilities_are_distributions(seed):
    X, y = _data(seed, k=3)
    for params in (UNPRUNED, TreeParams()):
        P = train_tree(X, y, params).predict_proba(np.random.default_rng(seed).normal(2.5, 2, size=(20, X.shape[1])))
        assert ((P >= 0) & (P <= 1)).all()
        np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-9)


@given(seeds)
def test_row_permutation_invariance(seed):
    X, y = _data(seed, n_max=100)
    perm = np.random.default_rng(seed + 1).permutation(len(y))
    for params in (UNPRUNED, TreeParams()):
        a = train_tree(X, y, params).to_dict()
        b = train_tree(X[perm], y[perm], params).to_dict()
        assert a == b


def test_min_instances_respected():
    X, y = _data(7, n_max=200)
    m = train_tree(X, y, TreeParams(pruned=False, min_instances=5))
    leaves = m.counts[m.feature < 0].sum(axis=1)
    assert (leaves >= 5).all()


def test_thresholds_are_midpoints():
    X, y = _data(11, n_max=200, integer=False)
    m = train_tree(X, y, UNPRUNED)
    for f, t in zip(m.feature, m.threshold):
        if f < 0:
            continue
        values = np.unique(X[:, f])
        mids = (values[:-1] + values[1:]) / 2
        assert np.isclose(mids, t, rtol=0, atol=0).any()


def test_determinism_and_json_round_trip():
    X, y = _data(3, n_max=200)
    a = train_tree(X, y)
    b = train_tree(X, y)
    ja = json.dumps(dump_model(a), sort_keys=True)
    assert ja == json.dumps(dump_model(b), sort_keys=True)
    back = load_model(json.loads(ja))
    np.testing.assert_array_equal(back.predict_proba(X), a.predict_proba(X))
    doc = a.to_dict()
    assert doc["kind"] == "tree"


def test_explicit_classes_include_unseen():
    m = train_tree(np.array([[0.0], [1.0]]), np.array([0, 0]), classes=[0, 1, 2])
    np.testing.assert_allclose(m.predict_proba([0.0]), [3 / 5, 1 / 5, 1 / 5])


def _rows_reaching(m, X):
    reach = {0: np.arange(len(X))}
    out = {}
    while reach:
        i, rows = reach.popitem()
        out[i] = rows
        if m.feature[i] >= 0:
            left = X[rows, m.feature[i]] <= m.threshold[i]
            reach[int(m.left[i])] = rows[left]
            reach[int(m.right[i])] = rows[~left]
    return out


@given(seeds)
def test_every_split_matches_oracle(seed):
    X, y = _data(seed, n_max=80, k=2)
    m = train_tree(X, y, TreeParams(pruned=False, min_instances=2))
    for node, rows in _rows_reaching(m, X).items():
        if m.feature[node] < 0:
            continue
        f, t = best_split(X[rows], y[rows], 2)
        assert (int(m.feature[node]), float(m.threshold[node])) == pytest.approx((f, t))


def test_xor_node_full_growth_and_default_stop():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0])
    full = train_tree(X, y, UNPRUNED)
    assert (full.predict(X) == y).all()
    assert (full.feature[0], full.threshold[0]) == (0, 0.5)
    # no split gains information, so the default tree stays a single leaf
    assert train_tree(X, y, TreeParams(pruned=False)).node_count == 1
