"""Exception hierarchy.

Data errors (bad input files, degenerate datasets) derive from
:class:`DataError`; the CLI maps them to exit code 1. Configuration
problems raise :class:`ConfigError` (exit code 2).
"""


class SmellMLError(Exception):
    """Base class for every error raised by this package."""


class DataError(SmellMLError):
    """Input data cannot be used as given."""


class ParseError(DataError):
    """A document could not be tokenized or a value could not be read."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class MissingValue(ParseError):
    """A missing-value token was found; missing values are never imputed."""


class SchemaError(DataError):
    """Column names, label declarations or dimensions are inconsistent."""


class DegenerateLabel(DataError):
    """A label has no positive instance, so its imbalance ratio is undefined."""

    def __init__(self, label):
        self.label = label
        super().__init__(f"label {label!r} has no positive instances")


class EmptyData(DataError):
    """A learner was asked to train on zero instances."""


class ConfigError(SmellMLError):
    """Invalid experiment or CLI configuration."""
