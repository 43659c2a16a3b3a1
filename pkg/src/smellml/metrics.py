"""Evaluation metrics.

Example-based multilabel metrics (Jaccard accuracy, Hamming loss, exact
match), label-based micro/macro precision/recall/F1, and binary metrics with
ROC area computed from the Mann-Whitney rank statistic.

Conventions: an instance whose predicted and true label sets are both empty
scores Jaccard 1; any precision or recall with a zero denominator is 0.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import SchemaError

__all__ = [
    "ExampleBasedReport",
    "LabelBasedReport",
    "BinaryReport",
    "example_based",
    "label_based",
    "binary_metrics",
    "roc_area",
]


def _pair(predicted, truth):
    P = np.asarray(predicted, dtype=np.int8)
    T = np.asarray(truth, dtype=np.int8)
    if P.ndim == 1:
        P = P[:, None]
    if T.ndim == 1:
        T = T[:, None]
    if P.shape != T.shape:
        raise SchemaError(f"predictions {P.shape} and truth {T.shape} differ in shape")
    if P.shape[0] == 0:
        raise SchemaError("need at least one instance")
    return P.astype(bool), T.astype(bool)


def _ratio(num, den):
    return float(num) / float(den) if den else 0.0


def _f1(p, r):
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass(frozen=True)
class ExampleBasedReport:
    accuracy: float
    hamming_loss: float
    exact_match: float
    n_instances: int
    n_labels: int

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class LabelBasedReport:
    micro_precision: float
    micro_recall: float
    micro_f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_label: tuple  # (tp, fp, fn, tn) per label

    def to_dict(self):
        out = asdict(self)
        out["per_label"] = [dict(zip(("tp", "fp", "fn", "tn"), c)) for c in self.per_label]
        return out


@dataclass(frozen=True)
class BinaryReport:
    accuracy: float
    f_measure: float
    f_measure_weighted: float
    roc_area: float | None  # None when truth holds a single class
    tp: int
    fp: int
    fn: int
    tn: int

    def to_dict(self):
        return asdict(self)


def example_based(predicted, truth) -> ExampleBasedReport:
    """Jaccard accuracy, Hamming loss and exact-match ratio.

    Parameters
    ----------
    predicted, truth : array-like of {0, 1}, shape (n, L)
        Predicted and true label sets as indicator rows.
    """
    P, T = _pair(predicted, truth)
    inter = (P & T).sum(axis=1)
    union = (P | T).sum(axis=1)
    jaccard = np.where(union == 0, 1.0, inter / np.maximum(union, 1))
    L = P.shape[1]
    return ExampleBasedReport(
        accuracy=float(jaccard.mean()),
        hamming_loss=float((P ^ T).sum(axis=1).mean() / L),
        exact_match=float(np.all(P == T, axis=1).mean()),
        n_instances=int(P.shape[0]),
        n_labels=int(L),
    )


def label_based(predicted, truth) -> LabelBasedReport:
    P, T = _pair(predicted, truth)
    tp = (P & T).sum(axis=0)
    fp = (P & ~T).sum(axis=0)
    fn = (~P & T).sum(axis=0)
    tn = (~P & ~T).sum(axis=0)
    micro_p = _ratio(tp.sum(), tp.sum() + fp.sum())
    micro_r = _ratio(tp.sum(), tp.sum() + fn.sum())
    per_p = [_ratio(a, a + b) for a, b in zip(tp, fp)]
    per_r = [_ratio(a, a + b) for a, b in zip(tp, fn)]
    per_f = [_f1(p, r) for p, r in zip(per_p, per_r)]
    return LabelBasedReport(
        micro_precision=micro_p,
        micro_recall=micro_r,
        micro_f1=_f1(micro_p, micro_r),
        macro_precision=float(np.mean(per_p)),
        macro_recall=float(np.mean(per_r)),
        macro_f1=float(np.mean(per_f)),
        per_label=tuple((int(a), int(b), int(c), int(d)) for a, b, c, d in zip(tp, fp, fn, tn)),
    )


def roc_area(scores, truth) -> float | None:
    """Probability that a random positive outscores a random negative.

    Ties count one half. Returns None when ``truth`` lacks either class.
    """
    s = np.asarray(scores, dtype=np.float64)
    t = np.asarray(truth).astype(bool)
    n_pos = int(t.sum())
    n_neg = t.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(s)  # average ranks for ties
    u = ranks[t].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def binary_metrics(scores, predicted, truth) -> BinaryReport:
    """Accuracy, F-measure of the positive (smelly) class and ROC area.

    ``f_measure_weighted`` averages both classes' F1 weighted by their
    frequency in ``truth``.
    """
    p = np.asarray(predicted).astype(bool)
    t = np.asarray(truth).astype(bool)
    if p.shape != t.shape or np.shape(scores) != t.shape:
        raise SchemaError("scores, predictions and truth must have equal length")
    if t.size == 0:
        raise SchemaError("need at least one instance")
    tp = int((p & t).sum())
    fp = int((p & ~t).sum())
    fn = int((~p & t).sum())
    tn = int((~p & ~t).sum())
    f_pos = _f1(_ratio(tp, tp + fp), _ratio(tp, tp + fn))
    f_neg = _f1(_ratio(tn, tn + fn), _ratio(tn, tn + fp))
    n = t.size
    return BinaryReport(
        accuracy=(tp + tn) / n,
        f_measure=f_pos,
        f_measure_weighted=(f_pos * (tp + fn) + f_neg * (tn + fp)) / n,
        roc_area=roc_area(scores, t),
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
    )
