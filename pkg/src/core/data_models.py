"""
Data models for mixed-attribute datasets
"""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from core.exceptions import ArityMismatch, SchemaError, SchemaFileError
from utils.key_value import read_key_value_file, split_list

NUMERIC = "numeric"
CATEGORICAL = "categorical"
COLUMN_KINDS = (NUMERIC, CATEGORICAL)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ColumnSpec:
    """One feature column of a schema."""

    name: str
    kind: str


@dataclass(frozen=True)
class FeatureSchema:
    """
    Column roles of a dataset.

    Column order is the canonical feature order: numeric features keep their
    relative order in ``numeric_names`` and categorical features in
    ``categorical_names``.
    """

    columns: Tuple[ColumnSpec, ...]
    class_column: str
    categorical_domains: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    interval_columns: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "categorical_domains",
                           {name: tuple(values) for name, values in self.categorical_domains.items()})
        object.__setattr__(self, "interval_columns", frozenset(self.interval_columns))
        errors = self.validate()
        if errors:
            raise SchemaError("; ".join(errors))

    def validate(self) -> List[str]:
        """Validate the schema and return the list of problems found."""
        errors = []
        names = [column.name for column in self.columns]
        if self.class_column in names:
            errors.append(f"class column '{self.class_column}' is listed among the features")
        if len(set(names)) != len(names):
            errors.append("duplicate feature names")
        for column in self.columns:
            if column.kind not in COLUMN_KINDS:
                errors.append(f"column '{column.name}' has unknown kind '{column.kind}'")
        categorical = set(self.categorical_names)
        for name, values in self.categorical_domains.items():
            if name not in categorical:
                errors.append(f"domain given for non-categorical column '{name}'")
            if len(values) == 0:
                errors.append(f"domain of '{name}' is empty")
            if len(set(values)) != len(values):
                errors.append(f"domain of '{name}' has duplicate values")
        for name in self.interval_columns:
            if name not in self.numeric_names:
                errors.append(f"interval column '{name}' is not numeric")
        return errors

    @property
    def numeric_names(self) -> List[str]:
        return [column.name for column in self.columns if column.kind == NUMERIC]

    @property
    def categorical_names(self) -> List[str]:
        return [column.name for column in self.columns if column.kind == CATEGORICAL]

    @property
    def n(self) -> int:
        return len(self.numeric_names)

    @property
    def r(self) -> int:
        return len(self.categorical_names)

    def has_complete_domains(self) -> bool:
        return all(name in self.categorical_domains for name in self.categorical_names)

    def with_domains(self, domains: Dict[str, Sequence[str]]) -> "FeatureSchema":
        merged = dict(self.categorical_domains)
        merged.update({name: tuple(values) for name, values in domains.items()})
        return replace(self, categorical_domains=merged)

    def subset(self, keep_numeric: bool = True, keep_categorical: bool = True) -> "FeatureSchema":
        """Schema restricted to one or both feature kinds."""
        columns = [column for column in self.columns
                   if (column.kind == NUMERIC and keep_numeric)
                   or (column.kind == CATEGORICAL and keep_categorical)]
        kept = {column.name for column in columns}
        return FeatureSchema(
            columns=tuple(columns),
            class_column=self.class_column,
            categorical_domains={k: v for k, v in self.categorical_domains.items() if k in kept},
            interval_columns=frozenset(name for name in self.interval_columns if name in kept)
        )

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "FeatureSchema":
        """
        Load a schema from a key-value file.

        Recognised keys: ``class_column``, ``column.<name>``,
        ``domain.<name>`` and ``interval.<name>``.

        Args:
            path: Schema file path

        Returns:
            FeatureSchema

        Raises:
            SchemaFileError: If the file is malformed
        """
        try:
            entries = read_key_value_file(path)
        except (OSError, ValueError) as e:
            raise SchemaFileError(f"cannot read schema {path}: {e}")

        class_column = None
        columns = []
        domains = {}
        intervals = set()
        for key, value, line_number in entries:
            if key == "class_column":
                class_column = value
            elif key.startswith("column."):
                columns.append(ColumnSpec(key[len("column."):], value))
            elif key.startswith("domain."):
                domains[key[len("domain."):]] = tuple(split_list(value))
            elif key.startswith("interval."):
                intervals.add(key[len("interval."):])
            else:
                raise SchemaFileError(f"{path}:{line_number}: unknown key '{key}'")

        if class_column is None:
            raise SchemaFileError(f"{path}: missing 'class_column'")
        schema = cls(tuple(columns), class_column, domains, frozenset(intervals))
        logger.debug(f"Schema loaded from {path}: n={schema.n}, r={schema.r}")
        return schema

    def to_file(self, path: Union[str, Path]):
        """Write the schema in the key-value format read by ``from_file``."""
        lines = [f"class_column = {self.class_column}"]
        for column in self.columns:
            lines.append(f"column.{column.name} = {column.kind}")
        for name in self.categorical_names:
            if name in self.categorical_domains:
                lines.append(f"domain.{name} = {', '.join(self.categorical_domains[name])}")
        for name in sorted(self.interval_columns):
            lines.append(f"interval.{name} = {NUMERIC}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True, eq=False)
class MixedSample:
    """A single (possibly hyperbox-valued) input pattern."""

    lower: np.ndarray
    upper: np.ndarray
    categorical: Tuple[str, ...] = ()
    label: Optional[int] = None
    unseen: Tuple[bool, ...] = ()

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != upper.shape:
            raise ArityMismatch("lower and upper bounds differ in length")
        if np.any(lower > upper):
            raise SchemaError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "categorical", tuple(self.categorical))
        if not self.unseen:
            object.__setattr__(self, "unseen", tuple(False for _ in self.categorical))

    @property
    def is_crisp(self) -> bool:
        return bool(np.array_equal(self.lower, self.upper))

    @property
    def center(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    A labelled (or unlabelled) table of mixed samples.

    Numeric bounds are stored as N x n arrays, categorical values as an N x r
    object array and labels as integer codes into ``class_set``. All arrays
    are read-only.
    """

    schema: FeatureSchema
    lower: np.ndarray
    upper: np.ndarray
    categorical: np.ndarray
    labels: Optional[np.ndarray]
    class_set: Tuple[str, ...]
    unseen: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        size = len(self.lower)
        lower = np.asarray(self.lower, dtype=float).reshape(size, self.schema.n)
        upper = np.asarray(self.upper, dtype=float).reshape(size, self.schema.n)
        categorical = np.asarray(self.categorical, dtype=object).reshape(size, self.schema.r)
        if upper.shape[0] != size or categorical.shape[0] != size:
            raise ArityMismatch("numeric and categorical parts differ in row count")
        if np.any(lower > upper):
            row = int(np.argwhere(lower > upper)[0][0])
            raise SchemaError("lower bound exceeds upper bound", row=row)
        unseen = self.unseen
        if unseen is None:
            unseen = np.zeros((size, self.schema.r), dtype=bool)
        object.__setattr__(self, "lower", _frozen(lower))
        object.__setattr__(self, "upper", _frozen(upper))
        object.__setattr__(self, "categorical", _frozen(categorical))
        object.__setattr__(self, "unseen", _frozen(np.asarray(unseen, dtype=bool).reshape(size, self.schema.r)))
        object.__setattr__(self, "class_set", tuple(self.class_set))
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int).reshape(size)
            if size and (labels.min() < 0 or labels.max() >= len(self.class_set)):
                raise SchemaError("label code outside the class set")
            object.__setattr__(self, "labels", _frozen(labels))

    def __len__(self) -> int:
        return len(self.lower)

    @property
    def n(self) -> int:
        return self.schema.n

    @property
    def r(self) -> int:
        return self.schema.r

    @property
    def p(self) -> int:
        return len(self.class_set)

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def sample(self, index: int) -> MixedSample:
        label = None if self.labels is None else int(self.labels[index])
        return MixedSample(self.lower[index], self.upper[index], tuple(self.categorical[index]),
                           label, tuple(bool(flag) for flag in self.unseen[index]))

    @property
    def samples(self) -> Iterator[MixedSample]:
        for index in range(len(self)):
            yield self.sample(index)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        """Rows ``indices`` in the given order."""
        indices = np.asarray(indices, dtype=int)
        return Dataset(
            schema=self.schema,
            lower=self.lower[indices],
            upper=self.upper[indices],
            categorical=self.categorical[indices],
            labels=None if self.labels is None else self.labels[indices],
            class_set=self.class_set,
            unseen=self.unseen[indices],
            name=self.name
        )

    def with_numeric(self, lower: np.ndarray, upper: np.ndarray) -> "Dataset":
        """Copy with replaced numeric bounds."""
        return replace(self, lower=lower, upper=upper)

    def drop_categorical(self) -> "Dataset":
        """Numeric-only view of the dataset."""
        return Dataset(
            schema=self.schema.subset(keep_categorical=False),
            lower=self.lower,
            upper=self.upper,
            categorical=np.empty((len(self), 0), dtype=object),
            labels=self.labels,
            class_set=self.class_set,
            unseen=np.zeros((len(self), 0), dtype=bool),
            name=self.name
        )

    def drop_numeric(self) -> "Dataset":
        """Categorical-only view of the dataset."""
        return Dataset(
            schema=self.schema.subset(keep_numeric=False),
            lower=np.empty((len(self), 0)),
            upper=np.empty((len(self), 0)),
            categorical=self.categorical,
            labels=self.labels,
            class_set=self.class_set,
            unseen=self.unseen,
            name=self.name
        )

    def class_counts(self) -> np.ndarray:
        if self.labels is None:
            return np.zeros(self.p, dtype=int)
        return np.bincount(self.labels, minlength=self.p)

    def label_names(self) -> List[str]:
        if self.labels is None:
            return []
        return [self.class_set[code] for code in self.labels]

    def categorical_column(self, name: str) -> np.ndarray:
        return self.categorical[:, self.schema.categorical_names.index(name)]
