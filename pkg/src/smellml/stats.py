"""Multilabel dataset characterization (cardinality, density, MeanIR)."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .dataset import MultiLabelDataset, label_set_string
from .errors import DegenerateLabel, SchemaError

#: MLDs whose MeanIR exceeds this are conventionally treated as imbalanced.
IMBALANCE_THRESHOLD = 1.5


@dataclass(frozen=True)
class MldStatistics:
    n_instances: int
    n_features: int
    n_labels: int
    n_label_sets: int
    cardinality: float
    density: float
    label_names: tuple
    label_counts: tuple
    irlbl: tuple
    mean_ir: float

    def to_dict(self) -> dict:
        out = asdict(self)
        for k in ("label_names", "label_counts", "irlbl"):
            out[k] = list(out[k])
        return out

    def display_rows(self) -> list:
        """(heading, value) pairs laid out like the usual statistics table."""
        return [
            ("Number of Instances", str(self.n_instances)),
            ("Number of Features", str(self.n_features)),
            ("Number of Labels", str(self.n_labels)),
            ("Number of Label Sets", str(self.n_label_sets)),
            ("Cardinality", f"{self.cardinality:.3f}"),
            ("Density", f"{self.density:.3f}"),
            ("MeanIR", f"{self.mean_ir:.1f}"),
        ]


def compute_stats(m: MultiLabelDataset) -> MldStatistics:
    if m.n_instances < 1:
        raise SchemaError("statistics need at least one instance")
    Y = np.asarray(m.Y, dtype=np.int64)
    counts = Y.sum(axis=0)
    for name, c in zip(m.label_names, counts):
        if c == 0:
            raise DegenerateLabel(name)
    cardinality = float(counts.sum()) / m.n_instances
    top = counts.max()
    irlbl = tuple(float(top) / float(c) for c in counts)
    return MldStatistics(
        n_instances=m.n_instances,
        n_features=m.n_features,
        n_labels=m.n_labels,
        n_label_sets=len({label_set_string(r) for r in Y}),
        cardinality=cardinality,
        density=cardinality / m.n_labels,
        label_names=m.label_names,
        label_counts=tuple(int(c) for c in counts),
        irlbl=irlbl,
        mean_ir=float(np.mean(irlbl)),
    )


def is_imbalanced(s: MldStatistics) -> bool:
    return s.mean_ir > IMBALANCE_THRESHOLD
