"""C4.5-style decision tree on numeric features.

Splits are binary thresholds ``x[f] <= t`` placed at the midpoint of two
adjacent distinct values. At each node the best threshold of every feature is
found by information gain; among the features whose gain is at least the
average gain, the one with the highest gain ratio wins. Pruned trees are
post-processed with C4.5's pessimistic error estimate (collapse, subtree
replacement and subtree raising).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from statistics import NormalDist

import numpy as np

from ..errors import EmptyData, SchemaError
from . import _kernel

__all__ = ["TreeParams", "TreeModel", "train_tree", "add_errors"]

# C4.5's slack when comparing estimated error counts during pruning
_PRUNE_SLACK = 0.1


@dataclass(frozen=True)
class TreeParams:
    """Hyperparameters of a single tree.

    ``confidence`` is the pruning confidence factor (smaller prunes harder);
    it is ignored when ``pruned`` is False.
    """

    pruned: bool = True
    confidence: float = 0.25
    min_instances: int = 2
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must lie in (0, 1), got {self.confidence}")
        if self.min_instances < 1:
            raise ValueError("min_instances must be >= 1")

    def with_seed(self, seed: int) -> "TreeParams":
        return replace(self, seed=seed)

    def train(self, X, y, classes=None) -> "TreeModel":
        return train_tree(X, y, self, classes=classes)


# ---------------------------------------------------------------- growth

class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "counts", "rows")

    def __init__(self, counts, rows):
        self.feature = -1
        self.threshold = 0.0
        self.left = None
        self.right = None
        self.counts = counts
        self.rows = rows

    @property
    def is_leaf(self):
        return self.feature < 0

    def make_leaf(self):
        self.feature = -1
        self.threshold = 0.0
        self.left = self.right = None


def _to_nodes(feature, threshold, left, right, X, codes, k):
    """Rebuild a linked tree (with per-node rows) from the kernel's arrays."""

    def build(i, rows):
        node = _Node(np.bincount(codes[rows], minlength=k).astype(np.float64), rows)
        if feature[i] >= 0:
            node.feature, node.threshold = int(feature[i]), float(threshold[i])
            mask = X[rows, node.feature] <= node.threshold
            node.left = build(left[i], rows[mask])
            node.right = build(right[i], rows[~mask])
        return node

    return build(0, np.arange(X.shape[0]))


# ---------------------------------------------------------------- pruning

def add_errors(n: float, e: float, confidence: float) -> float:
    """Pessimistic extra error count for a leaf with ``n`` cases, ``e`` wrong.

    Upper limit of the binomial error rate at the given confidence, using
    the normal approximation (exact formula when ``e < 1``).
    """
    if n <= 0:
        return 0.0
    if e < 1:
        base = n * (1.0 - confidence ** (1.0 / n))
        if e == 0:
            return base
        return base + e * (add_errors(n, 1.0, confidence) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = NormalDist().inv_cdf(1.0 - confidence)
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n)
    return r * n - e


def _leaf_errors(counts, cf):
    n = counts.sum()
    e = n - counts.max() if n > 0 else 0.0
    return e + add_errors(n, e, cf)


def _tree_errors(node, cf):
    if node.is_leaf:
        return _leaf_errors(node.counts, cf)
    return _tree_errors(node.left, cf) + _tree_errors(node.right, cf)


def _training_errors(node):
    if node.is_leaf:
        return node.counts.sum() - node.counts.max() if node.counts.sum() > 0 else 0.0
    return _training_errors(node.left) + _training_errors(node.right)


def _redistribute(node, X, codes, k, rows):
    node.rows = rows
    node.counts = np.bincount(codes[rows], minlength=k).astype(np.float64)
    if node.is_leaf:
        return
    mask = X[rows, node.feature] <= node.threshold
    _redistribute(node.left, X, codes, k, rows[mask])
    _redistribute(node.right, X, codes, k, rows[~mask])


def _errors_if_routed(node, X, codes, k, rows, cf):
    """Estimated errors of ``node``'s subtree when it receives ``rows``."""
    if node.is_leaf:
        return _leaf_errors(np.bincount(codes[rows], minlength=k).astype(np.float64), cf)
    mask = X[rows, node.feature] <= node.threshold
    return (_errors_if_routed(node.left, X, codes, k, rows[mask], cf)
            + _errors_if_routed(node.right, X, codes, k, rows[~mask], cf))


def _collapse(node):
    if node.is_leaf:
        return
    leaf_err = node.counts.sum() - node.counts.max()
    if _training_errors(node) >= leaf_err - 1e-3:
        node.make_leaf()
        return
    _collapse(node.left)
    _collapse(node.right)


def _prune(node, X, codes, k, cf):
    if node.is_leaf:
        return
    _prune(node.left, X, codes, k, cf)
    _prune(node.right, X, codes, k, cf)
    err_leaf = _leaf_errors(node.counts, cf)
    err_tree = _tree_errors(node, cf)
    largest = node.left if node.left.counts.sum() >= node.right.counts.sum() else node.right
    err_largest = _errors_if_routed(largest, X, codes, k, node.rows, cf)
    if err_leaf <= err_tree + _PRUNE_SLACK and err_leaf <= err_largest + _PRUNE_SLACK:
        node.make_leaf()
        return
    if err_largest <= err_tree + _PRUNE_SLACK:
        # subtree raising: the largest branch takes this node's place
        node.feature, node.threshold = largest.feature, largest.threshold
        node.left, node.right = largest.left, largest.right
        _redistribute(node, X, codes, k, node.rows)
        _prune(node, X, codes, k, cf)


# ---------------------------------------------------------------- model

class TreeModel:
    """A trained tree flattened into parallel node arrays.

    Node 0 is the root. Internal nodes send ``x[feature] <= threshold`` to
    ``left`` and everything else to ``right``; leaves have ``feature == -1``.
    """

    kind = "tree"

    def __init__(self, classes, n_features, feature, threshold, left, right, counts):
        self.classes = np.asarray(classes)
        self.n_features = int(n_features)
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.float64).reshape(len(self.feature), len(self.classes))
        self._proba = self._leaf_probabilities()

    def _leaf_probabilities(self):
        # empty leaves (left behind by subtree raising) predict like their parent
        k = len(self.classes)
        effective = self.counts.copy()
        for i in range(len(self.feature)):
            if self.feature[i] >= 0:
                for child in (self.left[i], self.right[i]):
                    if effective[child].sum() == 0:
                        effective[child] = effective[i]
        return (effective + 1.0) / (effective.sum(axis=1, keepdims=True) + k)

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def leaf_count(self) -> int:
        return int(np.count_nonzero(self.feature < 0))

    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def _check(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n_features:
            raise SchemaError(f"model expects {self.n_features} features, got {X.shape[1]}")
        return X, single

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by each row of X."""
        X, _ = self._check(X)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            cur = node[active]
            go_left = X[active, self.feature[cur]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
            active = active[self.feature[node[active]] >= 0]
        return node

    def predict_proba(self, X) -> np.ndarray:
        X, single = self._check(X)
        proba = self._proba[self.apply(X)]
        return proba[0] if single else proba

    def predict(self, X):
        proba = self.predict_proba(X)
        return self.classes[np.argmax(proba, axis=-1)]

    def to_dict(self) -> dict:
        def node(i):
            out = {"counts": [float(c) for c in self.counts[i]]}
            if self.feature[i] < 0:
                out["kind"] = "leaf"
                return out
            out.update(kind="split", feature=int(self.feature[i]), threshold=float(self.threshold[i]),
                       le=node(self.left[i]), gt=node(self.right[i]))
            return out

        return {"kind": "tree", "classes": self.classes.tolist(), "n_features": self.n_features, "root": node(0)}

    @classmethod
    def from_dict(cls, data) -> "TreeModel":
        feature, threshold, left, right, counts = [], [], [], [], []

        def visit(d):
            i = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            counts.append(d["counts"])
            if d["kind"] == "split":
                feature[i] = d["feature"]
                threshold[i] = d["threshold"]
                left[i] = visit(d["le"])
                right[i] = visit(d["gt"])
            return i

        visit(data["root"])
        return cls(data["classes"], data["n_features"], feature, threshold, left, right, counts)


def _flatten(root, classes, n_features):
    feature, threshold, left, right, counts = [], [], [], [], []
    stack = [(root, None, None)]
    # preorder numbering, left subtree first
    while stack:
        node, parent, side = stack.pop()
        i = len(feature)
        feature.append(node.feature)
        threshold.append(node.threshold)
        left.append(-1)
        right.append(-1)
        counts.append(node.counts)
        if parent is not None:
            (left if side == "l" else right)[parent] = i
        if not node.is_leaf:
            stack.append((node.right, i, "r"))
            stack.append((node.left, i, "l"))
    return TreeModel(classes, n_features, feature, threshold, left, right, np.array(counts))


def train_tree(X, y, params: TreeParams = TreeParams(), classes=None, features_per_split=None, rng=None) -> TreeModel:
    """Grow (and optionally prune) a tree.

    Parameters
    ----------
    X : array-like, shape (n, F)
    y : array-like, shape (n,)
        Class values; any sortable values.
    params : TreeParams
    classes : array-like, optional
        Full class list; defaults to the sorted distinct values of ``y``.
        Ensembles pass it so every member shares one probability layout.
    features_per_split : int, optional
        Draw this many candidate features per node (random forest mode).
    rng : numpy.random.Generator, optional
        Source of the feature draws; seeded from ``params.seed`` if omitted.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise SchemaError(f"incompatible shapes X{X.shape} and y{y.shape}")
    if X.shape[0] == 0:
        raise EmptyData("cannot train on an empty dataset")
    if X.shape[1] == 0:
        raise SchemaError("cannot train without features")
    classes = np.unique(y) if classes is None else np.unique(np.asarray(classes))
    codes = np.searchsorted(classes, y)
    if np.any(codes >= len(classes)) or np.any(classes[np.minimum(codes, len(classes) - 1)] != y):
        raise SchemaError("training labels outside the declared classes")
    if rng is None:
        rng = np.random.default_rng(params.seed % 2 ** 32)
    k = len(classes)
    n, n_features = X.shape
    fps = 0 if features_per_split is None or features_per_split >= n_features else int(features_per_split)
    uniforms = rng.random((2 * n + 1) * fps) if fps else np.empty(0)
    arrays = _kernel.grow(X, codes.astype(np.int64), k, params.min_instances, fps, uniforms)
    if not params.pruned:
        return TreeModel(classes, n_features, *arrays)
    root = _to_nodes(*arrays[:4], X, codes, k)
    _collapse(root)
    _prune(root, X, codes, k, params.confidence)
    return _flatten(root, classes, n_features)
