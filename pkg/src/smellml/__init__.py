"""Multilabel code smell detection: dataset construction, tree learners,
problem-transformation methods and the evaluation harness."""

__version__ = "0.1.0"

from .dataset import (  # noqa: E402
    MultiLabelDataset,
    TabularDataset,
    parse_arff,
    parse_csv,
    to_multilabel,
    write_arff,
    write_csv,
)
from .errors import (  # noqa: E402
    ConfigError,
    DataError,
    DegenerateLabel,
    EmptyData,
    MissingValue,
    ParseError,
    SchemaError,
    SmellMLError,
)
