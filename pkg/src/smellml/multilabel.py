"""Problem-transformation multilabel methods.

* Binary Relevance (``br``): one independent classifier per label.
* Classifier Chains (``cc``): classifier ``p`` in the chain also sees the
  labels of the ``p`` earlier chain positions as extra features. Training uses
  the true earlier labels; prediction feeds the chain's own predictions.
* Label Powerset (``lp``, also called LC): every distinct label row becomes one
  class of a single multi-class problem, identified by its bit string.

``base`` is any learner spec with ``train(X, y, classes=None)`` returning a
model with ``predict``; :class:`~smellml.learners.TreeParams` and
:class:`~smellml.learners.EnsembleParams` qualify.
"""
from __future__ import annotations

import numpy as np

from .dataset import MultiLabelDataset, label_set_string
from .errors import SchemaError

__all__ = ["MultiLabelModel", "train_br", "train_cc", "train_lp", "train_multilabel", "predict_labels", "METHODS"]

METHODS = ("br", "cc", "lp")


class MultiLabelModel:
    kind = "multilabel"

    def __init__(self, method, label_names, n_features, members, order=None, class_map=None):
        self.method = method
        self.label_names = tuple(label_names)
        self.n_features = int(n_features)
        self.members = list(members)
        self.order = None if order is None else tuple(int(o) for o in order)
        self.class_map = None if class_map is None else tuple(class_map)

    @property
    def n_labels(self) -> int:
        return len(self.label_names)

    def _check(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n_features:
            raise SchemaError(f"model expects {self.n_features} features, got {X.shape[1]}")
        return X, single

    def predict(self, X) -> np.ndarray:
        """Predicted label matrix, shape (n, L) (or (L,) for one vector)."""
        X, single = self._check(X)
        n = X.shape[0]
        out = np.zeros((n, self.n_labels), dtype=np.int8)
        if self.method == "br":
            for l, member in enumerate(self.members):
                out[:, l] = member.predict(X)
        elif self.method == "cc":
            aug = X
            for label, member in zip(self.order, self.members):
                pred = np.asarray(member.predict(aug), dtype=np.int8)
                out[:, label] = pred
                aug = np.hstack([aug, pred[:, None].astype(np.float64)])
        else:
            codes = np.asarray(self.members[0].predict(X), dtype=np.int64)
            table = np.array([[int(b) for b in s] for s in self.class_map], dtype=np.int8)
            out[:] = table[codes]
        return out[0] if single else out

    def to_dict(self) -> dict:
        return {
            "kind": "multilabel",
            "method": self.method,
            "label_names": list(self.label_names),
            "n_features": self.n_features,
            "order": None if self.order is None else list(self.order),
            "class_map": None if self.class_map is None else list(self.class_map),
            "members": [m.to_dict() for m in self.members],
        }

    @classmethod
    def from_dict(cls, data) -> "MultiLabelModel":
        from .learners import model_from_dict

        return cls(data["method"], data["label_names"], data["n_features"],
                   [model_from_dict(m) for m in data["members"]], data.get("order"), data.get("class_map"))


def _xy(m):
    if not isinstance(m, MultiLabelDataset):
        raise SchemaError("expected a MultiLabelDataset")
    return m.X, m.Y


def train_br(m: MultiLabelDataset, base) -> MultiLabelModel:
    X, Y = _xy(m)
    members = [base.train(X, Y[:, l].astype(np.int64)) for l in range(Y.shape[1])]
    return MultiLabelModel("br", m.label_names, m.n_features, members)


def train_cc(m: MultiLabelDataset, base, order=None) -> MultiLabelModel:
    X, Y = _xy(m)
    L = Y.shape[1]
    order = list(range(L)) if order is None else [int(o) for o in order]
    if sorted(order) != list(range(L)):
        raise SchemaError(f"chain order {order} is not a permutation of 0..{L - 1}")
    members = []
    aug = X
    for label in order:
        y = Y[:, label].astype(np.int64)
        members.append(base.train(aug, y))
        aug = np.hstack([aug, y[:, None].astype(np.float64)])
    return MultiLabelModel("cc", m.label_names, m.n_features, members, order=order)


def train_lp(m: MultiLabelDataset, base) -> MultiLabelModel:
    X, Y = _xy(m)
    keys = [label_set_string(r) for r in Y]
    class_map = sorted(set(keys))
    index = {k: i for i, k in enumerate(class_map)}
    codes = np.array([index[k] for k in keys], dtype=np.int64)
    member = base.train(X, codes)
    return MultiLabelModel("lp", m.label_names, m.n_features, [member], class_map=class_map)


def train_multilabel(m: MultiLabelDataset, method: str, base, order=None) -> MultiLabelModel:
    if method == "br":
        return train_br(m, base)
    if method == "cc":
        return train_cc(m, base, order)
    if method == "lp":
        return train_lp(m, base)
    raise SchemaError(f"unknown multilabel method {method!r}")


def predict_labels(model: MultiLabelModel, x) -> np.ndarray:
    return model.predict(x)
