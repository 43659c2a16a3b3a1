"""Synthetic stand-ins for the Long Method / Feature Envy metric datasets.

The published datasets are not bundled. :func:`reference_like` builds a pair of
420-instance, 82-metric datasets with the same overlap structure: 395 shared
methods, 140 smelly instances per dataset, and label counts that reproduce the
known merged / multilabel shapes exactly (merged sizes 840, conflicting smelly
rows 132 / 125, multilabel label sets 85 / 55 / 55 / 250).

Metric values are drawn so that a handful of size and coupling metrics carry
the smell signal with overlap between classes; the remaining metrics are
noise. They are not the real metrics and classifier scores on them say nothing
about the real data.
"""
from __future__ import annotations

import numpy as np

from .dataset import TabularDataset
from .ops import instance_key

N_METRICS = 82
LM_LABEL = "is_long_method"
FE_LABEL = "is_feature_envy"

# (lm, fe) -> number of methods present in both datasets
COMMON_COUNTS = {(1, 1): 85, (1, 0): 47, (0, 1): 40, (0, 0): 223}
# smelly / non-smelly methods present in only one dataset
LM_ONLY = {1: 8, 0: 17}
FE_ONLY = {1: 15, 0: 10}


def _metrics(rng, lm, fe):
    """One row of 82 metric values for a method with the given smell flags."""
    n = lm.shape[0]
    X = np.empty((n, N_METRICS))
    # ambiguous cases blur the class boundary a little
    lm_eff = np.where(rng.random(n) < 0.06, 1 - lm, lm)
    fe_eff = np.where(rng.random(n) < 0.05, 1 - fe, fe)
    loc = rng.poisson(np.where(lm_eff == 1, 95, 18)) + 1
    X[:, 0] = loc                                                       # LOC
    X[:, 1] = rng.poisson(np.where(lm_eff == 1, 14, 3)) + 1             # CYCLO
    X[:, 2] = rng.poisson(np.where(lm_eff == 1, 4.0, 1.5))              # NOP
    X[:, 3] = rng.poisson(np.where(lm_eff == 1, 6, 2))                  # MAXNESTING
    X[:, 4] = rng.poisson(np.where(fe_eff == 1, 9, 1.2))                # ATFD
    X[:, 5] = rng.poisson(np.where(fe_eff == 1, 3.5, 0.8))              # FDP
    X[:, 6] = np.round(np.clip(rng.beta(np.where(fe_eff == 1, 1.5, 6.0), np.where(fe_eff == 1, 6.0, 1.5)), 0, 1), 6)  # LAA
    X[:, 7] = rng.poisson(np.where(fe_eff == 1, 7, 3) + 0.05 * loc)     # NOAV
    X[:, 8] = rng.poisson(2 + 0.08 * loc)                               # CINT
    X[:, 9] = rng.poisson(1 + 0.05 * loc)                               # NOLV
    rest = N_METRICS - 10
    lam = rng.uniform(0.3, 30.0, size=rest)
    X[:, 10:] = rng.poisson(lam[None, :], size=(n, rest))
    return X


def reference_like(seed: int = 0):
    """Return ``(lm, fe)`` synthetic single-label datasets.

    Deterministic for a given seed; every generated feature vector is unique.
    """
    rng = np.random.default_rng(seed)
    groups = []  # (lm flag, fe flag, in_lm, in_fe)
    for (lm, fe), c in COMMON_COUNTS.items():
        groups += [(lm, fe, True, True)] * c
    for lm, c in LM_ONLY.items():
        groups += [(lm, 0, True, False)] * c
    for fe, c in FE_ONLY.items():
        groups += [(0, fe, False, True)] * c
    g = np.array(groups, dtype=np.int64)
    X = _metrics(rng, g[:, 0], g[:, 1])
    # resample any accidental duplicate vector
    while True:
        seen, dup = set(), []
        for i, row in enumerate(X):
            key = instance_key(row)
            if key in seen:
                dup.append(i)
            seen.add(key)
        if not dup:
            break
        X[dup] = _metrics(rng, g[dup, 0], g[dup, 1])

    names = [f"M{j + 1}" for j in range(N_METRICS)]
    lm_rows = np.flatnonzero(g[:, 2] == 1)
    fe_rows = np.flatnonzero(g[:, 3] == 1)
    lm_rows = lm_rows[rng.permutation(lm_rows.size)]
    fe_rows = fe_rows[rng.permutation(fe_rows.size)]
    lm = TabularDataset("long-method", names, X[lm_rows], [LM_LABEL], g[lm_rows, 0][:, None])
    fe = TabularDataset("feature-envy", names, X[fe_rows], [FE_LABEL], g[fe_rows, 1][:, None])
    return lm, fe


def random_dataset(rng, n, n_features, n_labels=1, label_names=None, integer=False, p_positive=0.4, name="random"):
    """Small random dataset for property tests."""
    if integer:
        X = rng.integers(0, 4, size=(n, n_features)).astype(np.float64)
    else:
        X = rng.normal(size=(n, n_features))
    Y = (rng.random((n, n_labels)) < p_positive).astype(np.int8)
    label_names = label_names or [f"y{j}" for j in range(n_labels)]
    return TabularDataset(name, [f"x{j}" for j in range(n_features)], X, label_names, Y)
