import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from smellml.dataset import MultiLabelDataset, label_set_string
from smellml.errors import SchemaError
from smellml.learners import TreeParams, dump_model, load_model, make_base, train_tree
from smellml.multilabel import predict_labels, train_br, train_cc, train_lp, train_multilabel
from smellml.ops import build_multilabel

MEMO = TreeParams(pruned=False, min_instances=1)
seeds = st.integers(0, 2**32 - 1)


def random_mld(seed, n=None, L=2, f=3):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(4, 80))
    X = rng.normal(size=(n, f))
    Y = (rng.random((n, L)) < 0.4).astype(np.int8)
    return MultiLabelDataset("r", [f"x{j}" for j in range(f)], X, [f"y{j}" for j in range(L)], Y)


@given(seeds, st.sampled_from(["j48p", "j48u", "bj48p", "rf"]))
def test_single_label_collapse(seed, code):
    m = random_mld(seed, L=1)
    base = make_base(code, seed=seed % 1000, forest_size=4, bag_size=2)
    probe = np.random.default_rng(seed + 1).normal(size=(30, 3))
    bare = base.train(m.X, m.Y[:, 0].astype(np.int64)).predict(probe)
    for method in ("br", "cc", "lp"):
        pred = train_multilabel(m, method, base).predict(probe)
        np.testing.assert_array_equal(pred[:, 0], bare)


def test_br_members_are_projections():
    m = random_mld(5, n=8)
    model = train_br(m, MEMO)
    assert len(model.members) == 2
    for l, member in enumerate(model.members):
        ref = train_tree(m.X, m.Y[:, l].astype(np.int64), MEMO)
        assert member.to_dict() == ref.to_dict()


def test_constant_label_member_predicts_zero():
    m = random_mld(6, n=20)
    Y = m.Y.copy()
    Y[:, 1] = 0
    m = MultiLabelDataset("c", m.feature_names, m.X, m.label_names, Y)
    model = train_br(m, TreeParams())
    probe = np.random.default_rng(0).normal(size=(50, 3))
    assert (model.predict(probe)[:, 1] == 0).all()


def test_br_over_single_leaf_members_constant():
    m = random_mld(8, n=12)
    Y = np.tile([[1, 0]], (12, 1))
    m = MultiLabelDataset("k", m.feature_names, m.X, m.label_names, Y)
    P = train_br(m, TreeParams()).predict(np.random.default_rng(1).normal(size=(25, 3)))
    assert (P == [1, 0]).all()


def test_cc_schema_83_columns(reference):
    lm, fe, _ = reference
    mld = build_multilabel(lm, fe)
    model = train_cc(mld, TreeParams(), order=(0, 1))
    assert model.members[0].n_features == 82
    assert model.members[1].n_features == 83
    assert model.order == (0, 1)


def test_cc_rejects_bad_order():
    m = random_mld(1)
    for order in ((0, 0), (0,), (1, 2)):
        with pytest.raises(SchemaError):
            train_cc(m, MEMO, order)


def test_cc_deterministic_dependency():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(60, 3))
    # the first label is noise w.r.t. the features, so only the appended column explains the second
    y1 = (rng.random(60) < 0.5).astype(np.int8)
    m = MultiLabelDataset("dep", ["a", "b", "c"], X, ["y1", "y2"], np.column_stack([y1, y1]))
    model = train_cc(m, MEMO)
    P = model.predict(X)
    assert (P == m.Y).all(axis=1).mean() == 1.0
    probe = rng.normal(size=(200, 3))
    P = model.predict(probe)
    assert (P[:, 1] == P[:, 0]).all()
    assert model.members[1].feature[0] == 3
    assert model.members[1].node_count == 3


def test_cc_uses_predictions_at_test_time():
    class Recorder:
        """Base spec that records the augmented columns it sees."""

        def __init__(self):
            self.seen = []

        def train(self, X, y, classes=None):
            self.seen.append(("train", np.array(X)))
            rec = self

            class M:
                def predict(self, Z):
                    rec.seen.append(("predict", np.array(Z)))
                    return np.ones(len(Z), dtype=np.int64)

            return M()

    m = random_mld(9, n=10)
    base = Recorder()
    model = train_cc(m, base)
    train_aug = base.seen[1][1]
    np.testing.assert_array_equal(train_aug[:, -1], m.Y[:, 0])
    model.predict(np.zeros((4, 3)))
    test_aug = base.seen[-1][1]
    np.testing.assert_array_equal(test_aug[:, -1], np.ones(4))


def test_lp_class_map(reference):
    lm, fe, _ = reference
    model = train_lp(build_multilabel(lm, fe), TreeParams())
    assert model.class_map == ("00", "01", "10", "11")


def test_lp_closed_world():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(40, 2))
    bit = (rng.random(40) < 0.5).astype(np.int8)
    m = MultiLabelDataset("cw", ["a", "b"], X, ["p", "q"], np.column_stack([bit, bit]))
    P = train_lp(m, MEMO).predict(rng.normal(size=(500, 2)))
    assert {label_set_string(r) for r in P} <= {"00", "11"}


@given(seeds, st.sampled_from(["br", "cc", "lp"]))
def test_memorization_all_methods(seed, method):
    m = random_mld(seed, L=int(np.random.default_rng(seed).integers(1, 4)))
    model = train_multilabel(m, method, MEMO)
    assert (model.predict(m.X) == m.Y).all()
    assert (predict_labels(model, m.X[0]) == m.Y[0]).all()


@given(seeds)
def test_br_label_permutation(seed):
    m = random_mld(seed, L=3)
    perm = [2, 0, 1]
    swapped = MultiLabelDataset("p", m.feature_names, m.X, [m.label_names[i] for i in perm], m.Y[:, perm])
    base = make_base("bj48p", seed=3, bag_size=2)
    probe = np.random.default_rng(seed).normal(size=(20, 3))
    a = train_br(m, base).predict(probe)
    b = train_br(swapped, base).predict(probe)
    np.testing.assert_array_equal(a[:, perm], b)


def test_serialization_round_trip():
    m = random_mld(10, n=50)
    for method in ("br", "cc", "lp"):
        model = train_multilabel(m, method, make_base("rf", seed=1, forest_size=3))
        doc = json.loads(json.dumps(dump_model(model)))
        back = load_model(doc)
        np.testing.assert_array_equal(back.predict(m.X), model.predict(m.X))


def test_dimension_mismatch():
    model = train_br(random_mld(2), MEMO)
    with pytest.raises(SchemaError):
        model.predict(np.zeros((2, 5)))
