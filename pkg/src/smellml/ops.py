"""Dataset surgery: instance matching, merging, disparity handling and
multilabel construction.

Two instances are the *same* instance when their full feature vectors are
exactly equal. A *disparity* is a feature vector that occurs more than once in
a single-label dataset with conflicting labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import MultiLabelDataset, TabularDataset
from .errors import SchemaError

__all__ = [
    "instance_key",
    "find_common_instances",
    "merge_single_label",
    "DisparityGroup",
    "DisparityReport",
    "detect_disparity",
    "remove_disparity",
    "build_multilabel",
]


def instance_key(row) -> tuple:
    """Canonical hashable key of a feature vector.

    Adding 0.0 folds -0.0 into 0.0 so numerically equal vectors share a key.
    """
    return tuple((np.asarray(row, dtype=np.float64) + 0.0).tolist())


def _keys(d):
    return [instance_key(r) for r in d.X]


def _check_schema(a, b):
    if a.feature_names != b.feature_names:
        raise SchemaError(
            f"feature schemas of {a.name!r} and {b.name!r} differ "
            f"({a.n_features} vs {b.n_features} features)"
        )


def _check_single_label(d):
    if d.n_labels != 1:
        raise SchemaError(f"dataset {d.name!r} must have exactly one label column, has {d.n_labels}")


def find_common_instances(a: TabularDataset, b: TabularDataset) -> list:
    """Pairs ``(i, j)`` with ``a.X[i] == b.X[j]``.

    Each row is used at most once; rows of ``a`` are visited in order and take
    the first unused matching row of ``b``.
    """
    _check_schema(a, b)
    pending = {}
    for j, key in enumerate(_keys(b)):
        pending.setdefault(key, []).append(j)
    cursor = {key: 0 for key in pending}
    pairs = []
    for i, key in enumerate(_keys(a)):
        slots = pending.get(key)
        if slots is None:
            continue
        c = cursor[key]
        if c < len(slots):
            pairs.append((i, slots[c]))
            cursor[key] = c + 1
    return pairs


def merge_single_label(target: TabularDataset, other: TabularDataset, skip_present: bool = False) -> TabularDataset:
    """Append the rows of ``other`` to ``target`` as negatives of target's label.

    By default every row of ``other`` is appended, which is how the published
    merged datasets were produced (420 + 420 = 840 rows, common instances
    included). With ``skip_present=True`` rows whose feature vector already
    occurs in ``target`` are left out, which makes self-merging a no-op.
    """
    _check_schema(target, other)
    _check_single_label(target)
    _check_single_label(other)
    rows = np.arange(other.n_instances)
    if skip_present:
        present = set(_keys(target))
        rows = np.array([j for j, k in enumerate(_keys(other)) if k not in present], dtype=np.intp)
    X = np.vstack([target.X, other.X[rows]])
    Y = np.concatenate([target.Y[:, 0], np.zeros(len(rows), dtype=np.int8)])
    return TabularDataset(target.name, target.feature_names, X, target.label_names, Y[:, None])


@dataclass(frozen=True)
class DisparityGroup:
    key: tuple
    rows: tuple
    labels: tuple  # distinct label values observed, ascending


@dataclass(frozen=True)
class DisparityReport:
    groups: tuple = field(default_factory=tuple)
    total_conflicting_rows: int = 0
    n_positive_rows: int = 0
    n_negative_rows: int = 0

    @property
    def is_clean(self) -> bool:
        return not self.groups

    def to_dict(self) -> dict:
        return {
            "n_groups": len(self.groups),
            "total_conflicting_rows": self.total_conflicting_rows,
            "n_positive_rows": self.n_positive_rows,
            "n_negative_rows": self.n_negative_rows,
            "groups": [{"rows": list(g.rows), "labels": list(g.labels)} for g in self.groups],
        }


def detect_disparity(d: TabularDataset) -> DisparityReport:
    """Group the feature vectors of ``d`` that carry conflicting labels.

    Groups come out in order of first occurrence.
    """
    _check_single_label(d)
    y = d.Y[:, 0]
    by_key = {}
    for i, key in enumerate(_keys(d)):
        by_key.setdefault(key, []).append(i)
    groups = []
    pos = neg = 0
    for key, rows in by_key.items():
        if len(rows) < 2:
            continue
        values = sorted({int(y[i]) for i in rows})
        if len(values) < 2:
            continue
        groups.append(DisparityGroup(key, tuple(rows), tuple(values)))
        n_pos = int(sum(y[i] for i in rows))
        pos += n_pos
        neg += len(rows) - n_pos
    return DisparityReport(tuple(groups), pos + neg, pos, neg)


def remove_disparity(d: TabularDataset) -> TabularDataset:
    """Drop the negative copies of every conflicting feature vector."""
    report = detect_disparity(d)
    if report.is_clean:
        return d
    y = d.Y[:, 0]
    drop = {i for g in report.groups for i in g.rows if y[i] == 0}
    keep = [i for i in range(d.n_instances) if i not in drop]
    return d.take(keep)


def build_multilabel(a: TabularDataset, b: TabularDataset) -> MultiLabelDataset:
    """Combine two single-label datasets into one two-label dataset.

    Common instances keep both labels. Instances found only in one input get
    0 for the other input's label. Rows of ``a`` come first in their original
    order, followed by the rows only found in ``b``.
    """
    _check_schema(a, b)
    _check_single_label(a)
    _check_single_label(b)
    if a.label_names[0] == b.label_names[0]:
        raise SchemaError(f"both datasets use the label name {a.label_names[0]!r}")
    pairs = find_common_instances(a, b)
    b_label_for_a = np.zeros(a.n_instances, dtype=np.int8)
    matched_b = np.zeros(b.n_instances, dtype=bool)
    for i, j in pairs:
        b_label_for_a[i] = b.Y[j, 0]
        matched_b[j] = True
    b_only = np.flatnonzero(~matched_b)
    X = np.vstack([a.X, b.X[b_only]])
    Y = np.zeros((X.shape[0], 2), dtype=np.int8)
    Y[: a.n_instances, 0] = a.Y[:, 0]
    Y[: a.n_instances, 1] = b_label_for_a
    Y[a.n_instances:, 1] = b.Y[b_only, 0]
    name = f"{a.name}+{b.name}" if a.name or b.name else "mld"
    return MultiLabelDataset(name, a.feature_names, X, (a.label_names[0], b.label_names[0]), Y)
