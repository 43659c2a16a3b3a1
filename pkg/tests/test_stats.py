import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from smellml.dataset import MultiLabelDataset
from smellml.errors import DegenerateLabel, SchemaError
from smellml.ops import build_multilabel
from smellml.stats import compute_stats, is_imbalanced


def mld(Y, n_features=1):
    Y = np.asarray(Y)
    n = Y.shape[0]
    return MultiLabelDataset("m", [f"x{j}" for j in range(n_features)], np.zeros((n, n_features)),
                             [f"l{j}" for j in range(Y.shape[1])], Y)


def test_reference_table(reference):
    lm, fe, _ = reference
    s = compute_stats(build_multilabel(lm, fe))
    assert (s.n_instances, s.n_features, s.n_labels, s.n_label_sets) == (445, 82, 2, 4)
    assert abs(s.cardinality - 0.629) <= 0.001
    assert abs(s.density - 0.314) <= 0.001
    assert s.mean_ir == 1.0
    assert not is_imbalanced(s)


def test_all_positive_single_label():
    s = compute_stats(mld(np.ones((5, 1))))
    assert (s.cardinality, s.density, s.mean_ir, s.n_label_sets) == (1.0, 1.0, 1.0, 1)


def test_irlbl_example():
    Y = np.zeros((12, 2), dtype=int)
    Y[:10, 0] = 1
    Y[:5, 1] = 1
    s = compute_stats(mld(Y))
    assert s.irlbl == (1.0, 2.0)
    assert s.mean_ir == 1.5
    assert not is_imbalanced(s)


def test_degenerate_label_named():
    with pytest.raises(DegenerateLabel) as exc:
        compute_stats(mld([[1, 0], [1, 0]]))
    assert "l1" in str(exc.value)


def test_empty_dataset():
    with pytest.raises(SchemaError):
        compute_stats(mld(np.zeros((0, 1))))


def test_imbalance_threshold():
    Y = np.zeros((10, 2), dtype=int)
    Y[:6, 0] = 1
    Y[:2, 1] = 1
    assert is_imbalanced(compute_stats(mld(Y)))  # irlbl (1, 3) -> 2.0


@given(st.integers(0, 2**32 - 1))
def test_brute_force_recount(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 1000))
    L = int(rng.integers(1, 5))
    Y = (rng.random((n, L)) < rng.uniform(0.05, 0.9)).astype(int)
    Y[rng.integers(0, n), :] = 1  # every label has a positive
    s = compute_stats(mld(Y))
    counts = [sum(int(row[j]) for row in Y.tolist()) for j in range(L)]
    total = sum(sum(row) for row in Y.tolist())
    assert s.label_counts == tuple(counts)
    assert s.cardinality == pytest.approx(total / n, abs=1e-12)
    assert s.density == pytest.approx(total / n / L, abs=1e-12)
    assert s.n_label_sets == len({tuple(r) for r in Y.tolist()})
    assert s.n_label_sets <= min(n, 2**L)
    assert s.mean_ir == pytest.approx(sum(max(counts) / c for c in counts) / L, abs=1e-12)
    assert s.mean_ir >= 1.0
    assert (s.mean_ir == 1.0) == (len(set(counts)) == 1)
    assert 0 <= s.density <= 1 and 0 <= s.cardinality <= L
