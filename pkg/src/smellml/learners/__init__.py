"""Single-label tree learners and the named configurations used in experiments."""
from __future__ import annotations

from dataclasses import replace

from ..errors import ConfigError
from .ensemble import (
    BAGGING,
    RANDOM_FOREST,
    EnsembleModel,
    EnsembleParams,
    default_features_per_split,
    derive_seed,
    train_ensemble,
)
from .tree import TreeModel, TreeParams, add_errors, train_tree

MODEL_FORMAT = "smellml-model"
MODEL_VERSION = 1

# default sizes for the named ensembles
FOREST_SIZE = 100
BAG_SIZE = 10

BASE_NAMES = {
    "j48p": "J48 Pruned",
    "j48u": "J48 Unpruned",
    "bj48p": "B-J48 Pruned",
    "bj48u": "B-J48 UnPruned",
    "rf": "Random Forest",
    "brf": "B-Random Forest",
}


def make_base(code: str, seed: int = 0, forest_size: int = FOREST_SIZE, bag_size: int = BAG_SIZE):
    """Learner spec for one of the named classifier codes in :data:`BASE_NAMES`."""
    forest = EnsembleParams(RANDOM_FOREST, n_members=forest_size, seed=seed)
    specs = {
        "j48p": TreeParams(pruned=True, seed=seed),
        "j48u": TreeParams(pruned=False, seed=seed),
        "bj48p": EnsembleParams(BAGGING, n_members=bag_size, base=TreeParams(pruned=True), seed=seed),
        "bj48u": EnsembleParams(BAGGING, n_members=bag_size, base=TreeParams(pruned=False), seed=seed),
        "rf": forest,
        "brf": EnsembleParams(BAGGING, n_members=bag_size, base=replace(forest, seed=0), seed=seed),
    }
    try:
        return specs[code]
    except KeyError:
        raise ConfigError(f"unknown base classifier {code!r}; choose from {sorted(BASE_NAMES)}") from None


def model_from_dict(data):
    kind = data["kind"]
    if kind == "tree":
        return TreeModel.from_dict(data)
    if kind == "ensemble":
        return EnsembleModel.from_dict(data)
    if kind == "multilabel":
        from ..multilabel import MultiLabelModel

        return MultiLabelModel.from_dict(data)
    raise ValueError(f"unknown model kind {kind!r}")


def predict_proba(model, x):
    """Class probabilities from any trained single-label model."""
    return model.predict_proba(x)


def predict(model, x):
    return model.predict(x)


def dump_model(model) -> dict:
    """Versioned JSON-ready document for a trained model."""
    return {"format": MODEL_FORMAT, "version": MODEL_VERSION, "model": model.to_dict()}


def load_model(doc):
    if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model document {doc.get('format')!r} v{doc.get('version')!r}")
    return model_from_dict(doc["model"])


__all__ = [
    "TreeParams",
    "TreeModel",
    "train_tree",
    "add_errors",
    "EnsembleParams",
    "EnsembleModel",
    "train_ensemble",
    "derive_seed",
    "default_features_per_split",
    "BAGGING",
    "RANDOM_FOREST",
    "BASE_NAMES",
    "make_base",
    "model_from_dict",
    "predict_proba",
    "predict",
    "dump_model",
    "load_model",
]
