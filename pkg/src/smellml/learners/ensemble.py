"""Bagging and random forests over :mod:`smellml.learners.tree`."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from ..errors import EmptyData, SchemaError
from .tree import TreeModel, TreeParams, train_tree

__all__ = ["EnsembleParams", "EnsembleModel", "train_ensemble", "derive_seed", "default_features_per_split"]

BAGGING = "bagging"
RANDOM_FOREST = "random_forest"


def derive_seed(seed: int, *path: int) -> int:
    """Child seed for ``path`` under ``seed``; distinct paths give unrelated streams."""
    words = [int(seed) % 2 ** 32] + [int(p) % 2 ** 32 for p in path]
    return int(np.random.SeedSequence(words).generate_state(1, dtype=np.uint32)[0])


def default_features_per_split(n_features: int) -> int:
    return int(math.floor(math.log2(n_features))) + 1 if n_features > 0 else 1


@dataclass(frozen=True)
class EnsembleParams:
    """Configuration of a bagged ensemble or a random forest.

    For ``bagging`` the ``base`` learner (a :class:`TreeParams` or another
    ``EnsembleParams``) is trained on each bootstrap sample. For
    ``random_forest`` ``base`` must be tree parameters and is forced
    unpruned; ``features_per_split=None`` means ``floor(log2 F) + 1``.
    ``bootstrap=False`` trains every member on the full sample.
    """

    kind: str = RANDOM_FOREST
    n_members: int = 100
    base: Union[TreeParams, "EnsembleParams", None] = None
    features_per_split: int | None = None
    seed: int = 0
    bootstrap: bool = True

    def __post_init__(self):
        if self.kind not in (BAGGING, RANDOM_FOREST):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.n_members < 1:
            raise ValueError("n_members must be >= 1")
        if self.kind == RANDOM_FOREST and self.base is not None and not isinstance(self.base, TreeParams):
            raise ValueError("random forest members must be trees")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ValueError("features_per_split must be >= 1")

    def resolved_base(self):
        if self.kind == RANDOM_FOREST:
            base = self.base or TreeParams(pruned=False, min_instances=1)
            return replace(base, pruned=False)
        return self.base or TreeParams()

    def with_seed(self, seed: int) -> "EnsembleParams":
        return replace(self, seed=seed)

    def train(self, X, y, classes=None) -> "EnsembleModel":
        return train_ensemble(X, y, self, classes=classes)


class EnsembleModel:
    """Averages the class-probability vectors of its members."""

    kind = "ensemble"

    def __init__(self, members, classes, n_features, method=""):
        self.members = list(members)
        self.classes = np.asarray(classes)
        self.n_features = int(n_features)
        self.method = method

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.n_features:
            raise SchemaError(f"model expects {self.n_features} features, got {X.shape[-1]}")
        total = self.members[0].predict_proba(X)
        for m in self.members[1:]:
            total = total + m.predict_proba(X)
        return total / len(self.members)

    def predict(self, X):
        return self.classes[np.argmax(self.predict_proba(X), axis=-1)]

    def to_dict(self) -> dict:
        return {
            "kind": "ensemble",
            "method": self.method,
            "classes": self.classes.tolist(),
            "n_features": self.n_features,
            "members": [m.to_dict() for m in self.members],
        }

    @classmethod
    def from_dict(cls, data) -> "EnsembleModel":
        from . import model_from_dict

        return cls([model_from_dict(m) for m in data["members"]], data["classes"], data["n_features"], data.get("method", ""))


def train_ensemble(X, y, p: EnsembleParams, classes=None) -> EnsembleModel:
    """Train ``p.n_members`` members on seeded bootstrap samples.

    Member ``i`` draws all of its randomness from ``derive_seed(p.seed, i)``,
    so members can be trained in any order with identical results.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise SchemaError(f"incompatible shapes X{X.shape} and y{y.shape}")
    n = X.shape[0]
    if n == 0:
        raise EmptyData("cannot train on an empty dataset")
    classes = np.unique(y) if classes is None else np.unique(np.asarray(classes))
    base = p.resolved_base()
    fps = None
    if p.kind == RANDOM_FOREST:
        fps = p.features_per_split or default_features_per_split(X.shape[1])
    members = []
    for i in range(p.n_members):
        member_seed = derive_seed(p.seed, i)
        rng = np.random.default_rng(member_seed)
        rows = rng.integers(0, n, size=n) if p.bootstrap else np.arange(n)
        if p.kind == RANDOM_FOREST:
            members.append(train_tree(X[rows], y[rows], base.with_seed(member_seed), classes=classes,
                                      features_per_split=fps, rng=rng))
        else:
            members.append(base.with_seed(member_seed).train(X[rows], y[rows], classes=classes))
    return EnsembleModel(members, classes, X.shape[1], method=p.kind)
