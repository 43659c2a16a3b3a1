"""In-memory datasets and their ARFF / CSV text formats.

A :class:`TabularDataset` holds named real-valued feature columns and zero or
more named binary label columns. A :class:`MultiLabelDataset` is the same data
viewed as a feature matrix plus an ``n x L`` label matrix. Both are immutable:
their arrays are flagged read-only on construction.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import MissingValue, ParseError, SchemaError

__all__ = [
    "TabularDataset",
    "MultiLabelDataset",
    "parse_arff",
    "parse_csv",
    "write_arff",
    "write_csv",
    "to_multilabel",
    "arff_nominal_attributes",
    "fingerprint",
    "label_set_string",
]

POSITIVE_TOKENS = frozenset({"true", "1", "yes"})
NEGATIVE_TOKENS = frozenset({"false", "0", "no"})
MISSING_TOKEN = "?"


def _frozen(array, dtype):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _validate(feature_names, X, label_names, Y):
    if X.ndim != 2 or Y.ndim != 2:
        raise SchemaError("feature and label blocks must be two-dimensional")
    if X.shape[1] != len(feature_names):
        raise SchemaError(f"{X.shape[1]} feature columns but {len(feature_names)} feature names")
    if Y.shape[1] != len(label_names):
        raise SchemaError(f"{Y.shape[1]} label columns but {len(label_names)} label names")
    if X.shape[0] != Y.shape[0]:
        raise SchemaError(f"feature block has {X.shape[0]} rows, label block has {Y.shape[0]}")
    names = list(feature_names) + list(label_names)
    if len(set(names)) != len(names):
        seen, dup = set(), []
        for n in names:
            if n in seen:
                dup.append(n)
            seen.add(n)
        raise SchemaError(f"duplicate column names: {sorted(set(dup))}")
    if X.size and not np.all(np.isfinite(X)):
        raise SchemaError("feature values must be finite")
    if Y.size and not np.all((Y == 0) | (Y == 1)):
        raise SchemaError("label columns may only contain 0 or 1")


@dataclass(frozen=True, eq=False)
class TabularDataset:
    """Named numeric features plus named binary label columns.

    Parameters
    ----------
    name : str
        Relation name, carried through serialization.
    feature_names : sequence of str
    X : array-like, shape (n_instances, n_features)
    label_names : sequence of str
    Y : array-like of {0, 1}, shape (n_instances, n_labels)
    """

    name: str
    feature_names: tuple
    X: np.ndarray
    label_names: tuple
    Y: np.ndarray

    def __post_init__(self):
        fnames = tuple(str(n) for n in self.feature_names)
        lnames = tuple(str(n) for n in self.label_names)
        X = np.asarray(self.X, dtype=np.float64)
        Y = np.asarray(self.Y)
        if X.ndim == 1 and X.size == 0:
            X = X.reshape(0, len(fnames))
        if Y.ndim == 1:
            Y = Y.reshape(-1, len(lnames)) if lnames else Y.reshape(X.shape[0], 0)
        _validate(fnames, X, lnames, Y)
        object.__setattr__(self, "feature_names", fnames)
        object.__setattr__(self, "label_names", lnames)
        object.__setattr__(self, "X", _frozen(X, np.float64))
        object.__setattr__(self, "Y", _frozen(Y, np.int8))

    @property
    def n_instances(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_labels(self) -> int:
        return self.Y.shape[1]

    @property
    def features(self):
        return [(n, self.X[:, j]) for j, n in enumerate(self.feature_names)]

    @property
    def labels(self):
        return [(n, self.Y[:, j]) for j, n in enumerate(self.label_names)]

    def label_column(self, name: str) -> np.ndarray:
        try:
            return self.Y[:, self.label_names.index(name)]
        except ValueError:
            raise SchemaError(f"unknown label {name!r}") from None

    def take(self, rows) -> "TabularDataset":
        rows = np.asarray(rows, dtype=np.intp)
        return TabularDataset(self.name, self.feature_names, self.X[rows], self.label_names, self.Y[rows])

    def __eq__(self, other):
        if not isinstance(other, TabularDataset):
            return NotImplemented
        return (
            self.name == other.name
            and self.feature_names == other.feature_names
            and self.label_names == other.label_names
            and self.X.shape == other.X.shape
            and self.Y.shape == other.Y.shape
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.Y, other.Y)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"TabularDataset(name={self.name!r}, n_instances={self.n_instances}, "
            f"n_features={self.n_features}, labels={list(self.label_names)})"
        )


@dataclass(frozen=True, eq=False)
class MultiLabelDataset:
    """Feature matrix plus an ``n x L`` binary label matrix, ``L >= 1``."""

    name: str
    feature_names: tuple
    X: np.ndarray
    label_names: tuple
    Y: np.ndarray

    def __post_init__(self):
        fnames = tuple(str(n) for n in self.feature_names)
        lnames = tuple(str(n) for n in self.label_names)
        if not lnames:
            raise SchemaError("a multilabel dataset needs at least one label")
        X = np.asarray(self.X, dtype=np.float64)
        Y = np.asarray(self.Y)
        if Y.ndim == 1:
            Y = Y.reshape(-1, len(lnames))
        _validate(fnames, X, lnames, Y)
        object.__setattr__(self, "feature_names", fnames)
        object.__setattr__(self, "label_names", lnames)
        object.__setattr__(self, "X", _frozen(X, np.float64))
        object.__setattr__(self, "Y", _frozen(Y, np.int8))

    @property
    def label_matrix(self) -> np.ndarray:
        return self.Y

    @property
    def n_instances(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_labels(self) -> int:
        return self.Y.shape[1]

    def label_sets(self) -> dict:
        """Count of each distinct label row, keyed by its bit string."""
        counts = {}
        for row in self.Y:
            key = label_set_string(row)
            counts[key] = counts.get(key, 0) + 1
        return dict(sorted(counts.items()))

    def take(self, rows) -> "MultiLabelDataset":
        rows = np.asarray(rows, dtype=np.intp)
        return MultiLabelDataset(self.name, self.feature_names, self.X[rows], self.label_names, self.Y[rows])

    def to_tabular(self) -> TabularDataset:
        return TabularDataset(self.name, self.feature_names, self.X, self.label_names, self.Y)

    def __eq__(self, other):
        if not isinstance(other, MultiLabelDataset):
            return NotImplemented
        return self.to_tabular() == other.to_tabular()

    __hash__ = None

    def __repr__(self):
        return (
            f"MultiLabelDataset(name={self.name!r}, n_instances={self.n_instances}, "
            f"n_features={self.n_features}, labels={list(self.label_names)})"
        )


def label_set_string(row) -> str:
    return "".join("1" if v else "0" for v in row)


def to_multilabel(d: TabularDataset) -> MultiLabelDataset:
    if d.n_labels == 0:
        raise SchemaError(f"dataset {d.name!r} has no label columns")
    return MultiLabelDataset(d.name, d.feature_names, d.X, d.label_names, d.Y)


def fingerprint(d) -> str:
    """SHA-256 of the dataset's canonical CSV serialization."""
    if isinstance(d, MultiLabelDataset):
        d = d.to_tabular()
    return hashlib.sha256(write_csv(d).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------- parsing

def _parse_feature(token, line, column):
    if token == MISSING_TOKEN:
        raise MissingValue("missing value", line=line, column=column)
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric value {token!r}", line=line, column=column) from None
    if math.isnan(value):
        raise MissingValue("NaN value", line=line, column=column)
    if math.isinf(value):
        raise ParseError(f"non-finite value {token!r}", line=line, column=column)
    return value


def _label_decoder(name, nominal_values, positive):
    """Return a function mapping a raw token to 0/1 for one label column."""
    if nominal_values is not None:
        if len(nominal_values) > 2:
            raise SchemaError(f"label {name!r} has {len(nominal_values)} nominal values; expected 2")
        if positive is not None:
            if positive not in nominal_values:
                raise SchemaError(f"positive value {positive!r} not declared for label {name!r}")
            pos = positive
        else:
            hits = [v for v in nominal_values if v.lower() in POSITIVE_TOKENS]
            if len(hits) != 1:
                raise SchemaError(
                    f"cannot tell the positive value of label {name!r} among {list(nominal_values)}; "
                    "configure it explicitly"
                )
            pos = hits[0]
        allowed = set(nominal_values)

        def decode(token, line):
            if token == MISSING_TOKEN:
                raise MissingValue("missing value", line=line, column=name)
            if token not in allowed:
                raise ParseError(f"undeclared nominal value {token!r}", line=line, column=name)
            return 1 if token == pos else 0

        return decode

    def decode(token, line):
        if token == MISSING_TOKEN:
            raise MissingValue("missing value", line=line, column=name)
        if positive is not None:
            return 1 if token == positive else 0
        low = token.lower()
        if low in POSITIVE_TOKENS:
            return 1
        if low in NEGATIVE_TOKENS:
            return 0
        try:
            value = float(token)
        except ValueError:
            value = None
        if value == 1.0:
            return 1
        if value == 0.0:
            return 0
        raise ParseError(f"label value {token!r} is not binary", line=line, column=name)

    return decode


def _unquote(s):
    s = s.strip()
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "'\"":
        return s[1:-1].replace("\\" + s[0], s[0])
    return s


def _split_name(rest, line):
    """Split '<name> <type...>' where name may be quoted."""
    rest = rest.strip()
    if not rest:
        raise ParseError("attribute declaration without a name", line=line)
    if rest[0] in "'\"":
        q = rest[0]
        i = 1
        while i < len(rest):
            if rest[i] == "\\":
                i += 2
                continue
            if rest[i] == q:
                break
            i += 1
        else:
            raise ParseError("unterminated quoted attribute name", line=line)
        return _unquote(rest[: i + 1]), rest[i + 1:].strip()
    parts = rest.split(None, 1)
    return parts[0], (parts[1].strip() if len(parts) > 1 else "")


def _split_row(text):
    return [_unquote(t) for t in next(csv.reader([text], skipinitialspace=True, quotechar="'"))]


def _read_arff_header(text):
    relation = ""
    attributes = []  # (name, None | tuple of nominal values, line number)
    data_lines = []
    in_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            data_lines.append((lineno, line))
            continue
        low = line.lower()
        if low.startswith("@relation"):
            relation = _unquote(line[len("@relation"):])
        elif low.startswith("@attribute"):
            name, kind = _split_name(line[len("@attribute"):], lineno)
            kind_low = kind.lower()
            if kind.startswith("{"):
                if not kind.endswith("}"):
                    raise ParseError("unterminated nominal value list", line=lineno)
                values = tuple(v for v in _split_row(kind[1:-1]) if v != "")
                attributes.append((name, values, lineno))
            elif kind_low in ("numeric", "real", "integer"):
                attributes.append((name, None, lineno))
            elif kind_low.split(None, 1)[0:1] in (["string"], ["date"], ["relational"]):
                raise SchemaError(f"attribute {name!r} has unsupported type {kind!r}")
            else:
                raise ParseError(f"unknown attribute type {kind!r}", line=lineno)
        elif low.startswith("@data"):
            in_data = True
        else:
            raise ParseError(f"unexpected header line {line!r}", line=lineno)
    if not in_data:
        raise ParseError("document has no @data section")
    return relation, attributes, data_lines


def arff_nominal_attributes(text: str) -> list:
    """Names of the nominal attributes declared in an ARFF document."""
    _, attributes, _ = _read_arff_header(text)
    return [name for name, values, _ in attributes if values is not None]


def _assemble(name, columns, label_names, positive_values, rows, column_kinds):
    """Shared back end of the two parsers.

    ``columns`` lists every column name in file order, ``column_kinds`` maps a
    column to its nominal values (or None) and ``rows`` yields
    ``(line, tokens)``.
    """
    positive_values = dict(positive_values or {})
    if len(set(columns)) != len(columns):
        raise SchemaError("duplicate column names")
    for label in label_names:
        if label not in columns:
            raise SchemaError(f"unknown label column {label!r}")
    if len(set(label_names)) != len(label_names):
        raise SchemaError("duplicate label names")
    label_set = set(label_names)
    feature_idx = [i for i, c in enumerate(columns) if c not in label_set]
    for i in feature_idx:
        if column_kinds.get(columns[i]) is not None:
            raise SchemaError(f"nominal attribute {columns[i]!r} is not declared as a label")
    label_idx = [columns.index(label) for label in label_names]
    decoders = [
        _label_decoder(label, column_kinds.get(label), positive_values.get(label))
        for label in label_names
    ]
    feats, labs = [], []
    for lineno, tokens in rows:
        if len(tokens) != len(columns):
            raise ParseError(f"expected {len(columns)} values, found {len(tokens)}", line=lineno)
        feats.append([_parse_feature(tokens[i], lineno, columns[i]) for i in feature_idx])
        labs.append([dec(tokens[i], lineno) for dec, i in zip(decoders, label_idx)])
    n_feat, n_lab = len(feature_idx), len(label_idx)
    X = np.array(feats, dtype=np.float64).reshape(len(feats), n_feat)
    Y = np.array(labs, dtype=np.int8).reshape(len(labs), n_lab)
    return TabularDataset(name, [columns[i] for i in feature_idx], X, list(label_names), Y)


def parse_arff(text: str, label_names: Sequence[str], positive_values: Mapping[str, str] | None = None) -> TabularDataset:
    """Parse a dense ARFF document.

    Attributes named in ``label_names`` become label columns, in the order
    given; every other attribute must be numeric and becomes a feature.
    ``positive_values`` overrides which nominal value of a label counts as 1.
    """
    relation, attributes, data_lines = _read_arff_header(text)
    columns = [a[0] for a in attributes]
    kinds = {a[0]: a[1] for a in attributes}

    def rows():
        for lineno, line in data_lines:
            if line.startswith("{"):
                raise ParseError("sparse ARFF rows are not supported", line=lineno)
            yield lineno, _split_row(line)

    return _assemble(relation, columns, list(label_names), positive_values, rows(), kinds)


def parse_csv(
    text: str,
    label_names: Sequence[str],
    has_header: bool = True,
    positive_values: Mapping[str, str] | None = None,
    name: str = "dataset",
) -> TabularDataset:
    """Parse comma-separated numeric data.

    Without a header the columns are named ``f1 .. fN``.
    """
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if ln]
    rows = [(i, [t.strip() for t in next(csv.reader([ln]))]) for i, ln in lines]
    if has_header:
        if not rows:
            raise ParseError("CSV document has no header row")
        columns = rows[0][1]
        rows = rows[1:]
    else:
        width = len(rows[0][1]) if rows else 0
        columns = [f"f{j + 1}" for j in range(width)]
    return _assemble(name, columns, list(label_names), positive_values, rows, {})


# ---------------------------------------------------------------- writing

def _fmt(value: float) -> str:
    if value.is_integer() and abs(value) < 2.0 ** 53:
        return str(int(value))
    return repr(value)


def _quote(name: str) -> str:
    if name and not any(c in name for c in " \t,'\"{}%\\"):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _rows(d: TabularDataset) -> Iterable[str]:
    for x, y in zip(d.X.tolist(), d.Y.tolist()):
        yield ",".join([_fmt(v) for v in x] + [str(v) for v in y])


def write_arff(d: TabularDataset) -> str:
    out = io.StringIO()
    out.write(f"@relation {_quote(d.name)}\n\n")
    for n in d.feature_names:
        out.write(f"@attribute {_quote(n)} numeric\n")
    for n in d.label_names:
        out.write(f"@attribute {_quote(n)} {{0,1}}\n")
    out.write("\n@data\n")
    for row in _rows(d):
        out.write(row + "\n")
    return out.getvalue()


def write_csv(d: TabularDataset) -> str:
    out = io.StringIO()
    out.write(",".join(list(d.feature_names) + list(d.label_names)) + "\n")
    for row in _rows(d):
        out.write(row + "\n")
    return out.getvalue()
