"""Repeated stratified cross-validation and the three study pipelines.

``rq1`` counts disparity in the merged single-label datasets, ``rq2`` scores
the tree classifiers on the disparity-free datasets and ``rq3`` builds the
multilabel dataset and scores classifier chains and label powerset over the
same tree classifiers.

Every (repetition, fold) task derives its randomness from
``(seed, repetition, fold)``, so serial and parallel runs give identical
reports.
"""
from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dataset import MultiLabelDataset, TabularDataset, fingerprint, label_set_string, to_multilabel
from .errors import ConfigError, DataError, SchemaError
from .learners import BASE_NAMES, BAG_SIZE, FOREST_SIZE, derive_seed, make_base
from .metrics import binary_metrics, example_based, label_based
from .multilabel import train_multilabel
from .ops import build_multilabel, detect_disparity, find_common_instances, merge_single_label, remove_disparity
from .stats import compute_stats, is_imbalanced

log = logging.getLogger(__name__)

# classifier rows in the order the single-label and multilabel result tables list them
RQ2_CLASSIFIERS = ("brf", "rf", "bj48u", "bj48p", "j48u")
RQ3_CLASSIFIERS = ("j48p", "rf", "bj48p", "bj48u", "brf")
RQ3_METHODS = ("cc", "lp")
METHOD_NAMES = {"cc": "CC", "lp": "LC", "br": "BR", "single": "Single label"}


class FoldError(DataError):
    """Training or evaluation failed inside one cross-validation task."""

    def __init__(self, repetition, fold, cause):
        self.repetition = repetition
        self.fold = fold
        super().__init__(f"repetition {repetition}, fold {fold}: {cause}")


@dataclass(frozen=True)
class CvPlan:
    """``stratification`` is ``by-labelset`` (whole label row) or ``by-class``
    (first label column only); they coincide for single-label data."""

    k: int = 10
    repetitions: int = 10
    seed: int = 0
    stratification: str = "by-labelset"

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError(f"k must be at least 2, got {self.k}")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be at least 1, got {self.repetitions}")
        if self.stratification not in ("by-labelset", "by-class"):
            raise ConfigError(f"unknown stratification {self.stratification!r}")


@dataclass(frozen=True)
class ModelSpec:
    """What to cross-validate: a method (``single``, ``br``, ``cc``, ``lp``)
    over a base learner spec."""

    method: str
    base: object
    order: tuple | None = None
    name: str = ""

    def __post_init__(self):
        if self.method not in ("single", "br", "cc", "lp"):
            raise ConfigError(f"unknown method {self.method!r}")


def make_folds(n: int, strata, plan: CvPlan) -> list:
    """Fold id of every instance, one array per repetition.

    Within each stratum (visited in sorted order) the members are shuffled and
    dealt to folds round-robin, continuing where the previous stratum stopped,
    so both per-stratum and overall fold sizes differ by at most one.
    """
    if n < plan.k:
        raise ConfigError(f"cannot make {plan.k} folds from {n} instances")
    strata = np.asarray(strata)
    if strata.shape[0] != n:
        raise ConfigError("one stratum value per instance is required")
    groups = [np.flatnonzero(strata == s) for s in np.unique(strata)]
    plans = []
    for rep in range(plan.repetitions):
        rng = np.random.default_rng(derive_seed(plan.seed, rep))
        folds = np.empty(n, dtype=np.int64)
        offset = 0
        for members in groups:
            shuffled = members[rng.permutation(members.size)]
            folds[shuffled] = (offset + np.arange(members.size)) % plan.k
            offset = (offset + members.size) % plan.k
        plans.append(folds)
    return plans


def _strata(Y, plan):
    if plan.stratification == "by-class":
        return Y[:, 0].astype(np.int64)
    return np.array([label_set_string(r) for r in Y])


def _describe(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {"type": type(obj).__name__}
        for f in dataclasses.fields(obj):
            out[f.name] = _describe(getattr(obj, f.name))
        return out
    if isinstance(obj, (list, tuple)):
        return [_describe(o) for o in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return repr(obj)


# ---------------------------------------------------------------- task execution

_shared = {}


def _init_worker(data, spec):
    _shared["data"] = data
    _shared["spec"] = spec


def _evaluate_task(data, spec, rep, fold, train_idx, test_idx, task_seed):
    base = spec.base.with_seed(task_seed) if hasattr(spec.base, "with_seed") else spec.base
    X, Y = data.X, data.Y
    if spec.method == "single":
        y = Y[:, 0].astype(np.int64)
        model = base.train(X[train_idx], y[train_idx])
        proba = np.atleast_2d(model.predict_proba(X[test_idx]))
        classes = list(np.asarray(model.classes).tolist())
        scores = proba[:, classes.index(1)] if 1 in classes else np.zeros(len(test_idx))
        pred = np.asarray(model.predict(X[test_idx]))
        return binary_metrics(scores, pred, y[test_idx]).to_dict()
    train = MultiLabelDataset(data.name, data.feature_names, X[train_idx], data.label_names, Y[train_idx])
    model = train_multilabel(train, spec.method, base, spec.order)
    P = model.predict(X[test_idx])
    eb = example_based(P, Y[test_idx]).to_dict()
    lb = label_based(P, Y[test_idx]).to_dict()
    metrics = {k: eb[k] for k in ("accuracy", "hamming_loss", "exact_match")}
    metrics.update({k: v for k, v in lb.items() if k != "per_label"})
    metrics["per_label"] = lb["per_label"]
    return metrics


def _run_task(task):
    rep, fold, train_idx, test_idx, task_seed = task
    try:
        metrics = _evaluate_task(_shared["data"], _shared["spec"], rep, fold, train_idx, test_idx, task_seed)
    except (DataError, ValueError) as exc:
        raise FoldError(rep, fold, exc) from exc
    return {
        "repetition": rep,
        "fold": fold,
        "n_train": int(len(train_idx)),
        "n_test": int(len(test_idx)),
        "seed": task_seed,
        "metrics": metrics,
    }


def aggregate(folds) -> dict:
    """Mean and sample standard deviation of every scalar fold metric.

    Undefined values (ROC area of a single-class fold) are skipped and the
    number of values used is reported as ``n``.
    """
    keys = [k for k, v in folds[0]["metrics"].items() if not isinstance(v, (list, dict))]
    out = {}
    for key in keys:
        values = [f["metrics"][key] for f in folds if f["metrics"][key] is not None]
        if not values:
            out[key] = {"mean": None, "std": None, "n": 0}
            continue
        arr = np.array(values, dtype=np.float64)
        std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        out[key] = {"mean": float(arr.mean()), "std": std, "n": int(arr.size)}
    return out


@dataclass
class ExperimentResult:
    config: dict
    folds: list
    aggregate: dict = field(default_factory=dict)

    def mean(self, metric):
        return self.aggregate[metric]["mean"]

    def to_dict(self) -> dict:
        return {"config": self.config, "aggregate": self.aggregate, "folds": self.folds}


def run_cv(dataset, spec: ModelSpec, plan: CvPlan = CvPlan(), n_jobs: int = 1) -> ExperimentResult:
    """Train on k-1 folds and evaluate on the held-out fold, ``k x repetitions`` times.

    Single-label runs (``spec.method == "single"``) report accuracy,
    F-measure and ROC area; multilabel runs report example-based and
    label-based metrics.
    """
    if spec.method == "single":
        if not isinstance(dataset, TabularDataset) or dataset.n_labels != 1:
            raise SchemaError("single-label cross-validation needs a dataset with exactly one label")
    elif isinstance(dataset, TabularDataset):
        dataset = to_multilabel(dataset)
    n = dataset.n_instances
    fold_plans = make_folds(n, _strata(dataset.Y, plan), plan)
    tasks = []
    for rep, folds in enumerate(fold_plans):
        for fold in range(plan.k):
            test_idx = np.flatnonzero(folds == fold)
            train_idx = np.flatnonzero(folds != fold)
            tasks.append((rep, fold, train_idx, test_idx, derive_seed(plan.seed, rep, fold)))
    log.info("cross-validating %s/%s on %s: %d tasks", spec.method, spec.name, dataset.name, len(tasks))
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs, initializer=_init_worker, initargs=(dataset, spec)) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * n_jobs))))
    else:
        _init_worker(dataset, spec)
        try:
            results = [_run_task(t) for t in tasks]
        finally:
            _shared.clear()
    config = {
        "dataset": {
            "name": dataset.name,
            "fingerprint": fingerprint(dataset),
            "n_instances": n,
            "n_features": dataset.n_features,
            "label_names": list(dataset.label_names),
        },
        "method": spec.method,
        "name": spec.name,
        "order": None if spec.order is None else list(spec.order),
        "base": _describe(spec.base),
        "plan": dataclasses.asdict(plan),
    }
    return ExperimentResult(config, results, aggregate(results))


# ---------------------------------------------------------------- study pipelines

@dataclass(frozen=True)
class StudyConfig:
    """Settings shared by the rq pipelines (and overridable from the CLI)."""

    plan: CvPlan = CvPlan()
    forest_size: int = FOREST_SIZE
    bag_size: int = BAG_SIZE
    n_jobs: int = 1
    chain_order: tuple | None = None
    rq2_classifiers: tuple = RQ2_CLASSIFIERS
    rq3_classifiers: tuple = RQ3_CLASSIFIERS
    rq3_methods: tuple = RQ3_METHODS

    def base(self, code):
        return make_base(code, seed=self.plan.seed, forest_size=self.forest_size, bag_size=self.bag_size)


def _counts(d):
    y = d.Y[:, 0]
    return {"n_instances": d.n_instances, "smelly": int(y.sum()), "non_smelly": int(d.n_instances - y.sum())}


def run_rq1(lm: TabularDataset, fe: TabularDataset, skip_present: bool = False) -> dict:
    """Disparity census of the two merged single-label datasets.

    By default every row of the other dataset is appended as a negative, so
    a row smelly in one dataset and also present in the other shows up as a
    conflicting pair. ``skip_present`` appends only rows the target lacks.
    """
    common = find_common_instances(lm, fe)
    merged = {}
    for key, target, other in (("lm", lm, fe), ("fe", fe, lm)):
        d = merge_single_label(target, other, skip_present=skip_present)
        rep = detect_disparity(d)
        merged[key] = {
            "label": target.label_names[0],
            **_counts(d),
            "disparity_smelly": rep.n_positive_rows,
            "disparity_non_smelly": rep.n_negative_rows,
            "disparity_groups": len(rep.groups),
        }
    return {
        "study": "rq1",
        "version": __version__,
        "inputs": {"lm": fingerprint(lm), "fe": fingerprint(fe)},
        "sizes": {"lm": _counts(lm), "fe": _counts(fe)},
        "common_instances": len(common),
        "skip_present": skip_present,
        "merged": merged,
    }


def _row(code, result, keys):
    row = {"code": code, "name": BASE_NAMES.get(code, code)}
    for k in keys:
        row[k] = result.mean(k)
    return row


def run_rq2(lm: TabularDataset, fe: TabularDataset, config: StudyConfig = StudyConfig()) -> dict:
    """Tree classifiers on the merged datasets after disparity removal."""
    datasets = {}
    for key, target, other in (("lm", lm, fe), ("fe", fe, lm)):
        merged = merge_single_label(target, other)
        clean = remove_disparity(merged)
        rows, runs = [], []
        for code in config.rq2_classifiers:
            spec = ModelSpec("single", config.base(code), name=code)
            res = run_cv(clean, spec, config.plan, config.n_jobs)
            rows.append(_row(code, res, ("accuracy", "f_measure", "f_measure_weighted", "roc_area")))
            runs.append(res.to_dict())
        datasets[key] = {
            "label": target.label_names[0],
            "merged": _counts(merged),
            "removed": merged.n_instances - clean.n_instances,
            "clean": _counts(clean),
            "rows": rows,
            "runs": runs,
        }
    return {
        "study": "rq2",
        "version": __version__,
        "inputs": {"lm": fingerprint(lm), "fe": fingerprint(fe)},
        "settings": _settings(config),
        "datasets": datasets,
    }


def _settings(config):
    return {
        "plan": dataclasses.asdict(config.plan),
        "forest_size": config.forest_size,
        "bag_size": config.bag_size,
        "chain_order": None if config.chain_order is None else list(config.chain_order),
    }


def run_rq3(lm: TabularDataset, fe: TabularDataset, config: StudyConfig = StudyConfig()) -> dict:
    """Multilabel dataset statistics and CC / LC results."""
    mld = build_multilabel(lm, fe)
    stats = compute_stats(mld)
    label_sets = mld.label_sets()
    n = mld.n_instances
    methods = {}
    all_acc = []
    for method in config.rq3_methods:
        rows, runs = [], []
        for code in config.rq3_classifiers:
            order = config.chain_order if method == "cc" else None
            spec = ModelSpec(method, config.base(code), order=order, name=code)
            res = run_cv(mld, spec, config.plan, config.n_jobs)
            rows.append(_row(code, res, (
                "accuracy", "hamming_loss", "exact_match",
                "micro_precision", "micro_recall", "micro_f1",
                "macro_precision", "macro_recall", "macro_f1",
            )))
            runs.append(res.to_dict())
            all_acc.append(res.mean("accuracy"))
        methods[method] = {"rows": rows, "runs": runs}
    best = [max(r["accuracy"] for r in m["rows"]) for m in methods.values()]
    return {
        "study": "rq3",
        "version": __version__,
        "inputs": {"lm": fingerprint(lm), "fe": fingerprint(fe)},
        "settings": _settings(config),
        "mld": {
            "label_names": list(mld.label_names),
            "label_sets": {k: {"count": v, "percent": 100.0 * v / n} for k, v in label_sets.items()},
            "stats": stats.to_dict(),
            "imbalanced": is_imbalanced(stats),
        },
        "methods": methods,
        "summary": {
            "mean_accuracy_all": float(np.mean(all_acc)) if all_acc else None,
            "mean_accuracy_best_per_method": float(np.mean(best)) if best else None,
        },
    }
