"""
CSV ingestion driven by a FeatureSchema
"""

from pathlib import Path
import csv
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd

from core.data_models import Dataset, FeatureSchema
from core.exceptions import (ArityMismatch, MissingCell, MissingColumn, MissingDataset, NumericParseError,
                             SchemaError, UnknownCategoryError)

logger = logging.getLogger(__name__)

ROLES = ("train", "test")


def _first_appearance(values: Sequence[str]) -> List[str]:
    return list(dict.fromkeys(values))


def _check_arity(path: Path) -> None:
    # pandas pads short rows with "" when NA detection is off, so count fields here
    with open(path, newline="", encoding="utf-8") as handle:
        rows = (fields for fields in csv.reader(handle) if fields)
        header = next(rows, None)
        if header is None:
            return
        for row, fields in enumerate(rows, start=1):
            if len(fields) != len(header):
                relation = "fewer" if len(fields) < len(header) else "more"
                raise ArityMismatch(f"row has {relation} fields than the header in {path} "
                                    f"({len(fields)} vs {len(header)})", row=row)


def _read_frame(path: Path) -> pd.DataFrame:
    _check_arity(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8",
                            skipinitialspace=True)
    except pd.errors.ParserError as e:
        raise ArityMismatch(f"malformed row in {path}: {e}")
    frame.columns = [str(column).strip() for column in frame.columns]
    return frame


def _required_columns(schema: FeatureSchema) -> List[str]:
    required = []
    for name in schema.numeric_names:
        if name in schema.interval_columns:
            required.extend([f"{name}.lo", f"{name}.hi"])
        else:
            required.append(name)
    required.extend(schema.categorical_names)
    return required


def _to_float(value: str) -> float:
    try:
        return float(value)
    except ValueError:
        return np.nan


def _parse_numeric(frame: pd.DataFrame, column: str) -> np.ndarray:
    raw = frame[column].str.strip()
    empty = (raw == "").to_numpy()
    if empty.any():
        raise MissingCell("empty cell", column=column, row=int(np.flatnonzero(empty)[0]) + 1)
    parsed = raw.map(_to_float)
    bad = parsed.isna().to_numpy()
    if bad.any():
        row = int(np.flatnonzero(bad)[0]) + 1
        raise NumericParseError(f"cannot parse '{raw.iloc[row - 1]}' as a number",
                                column=column, row=row)
    return parsed.to_numpy(dtype=float)


def load_csv(path: Union[str, Path], schema: FeatureSchema, role: str = "train",
             class_set: Optional[Sequence[str]] = None, name: Optional[str] = None) -> Dataset:
    """
    Load a UTF-8 CSV file with a header row into a Dataset.

    Rows keep their file order. On the training role every categorical value
    must belong to the declared domain (domains missing from the schema are
    inferred in first-appearance order); on the test role values outside the
    domain are flagged unseen instead.

    Args:
        path: CSV file path
        schema: Column roles
        role: 'train' or 'test'
        class_set: Known class labels (inferred from the file when omitted)
        name: Dataset name (defaults to the file stem)

    Returns:
        Dataset whose schema carries complete categorical domains

    Raises:
        MissingColumn, ArityMismatch, NumericParseError, MissingCell,
        UnknownCategoryError
    """
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got '{role}'")
    path = Path(path)
    frame = _read_frame(path)

    for column in _required_columns(schema):
        if column not in frame.columns:
            raise MissingColumn("column declared in schema is absent from header", column=column)
    has_labels = schema.class_column in frame.columns
    if role == "train" and not has_labels:
        raise MissingColumn("class column is absent from header", column=schema.class_column)

    size = len(frame)
    lower = np.empty((size, schema.n))
    upper = np.empty((size, schema.n))
    for j, column in enumerate(schema.numeric_names):
        if column in schema.interval_columns:
            lower[:, j] = _parse_numeric(frame, f"{column}.lo")
            upper[:, j] = _parse_numeric(frame, f"{column}.hi")
            inverted = lower[:, j] > upper[:, j]
            if inverted.any():
                raise SchemaError("interval lower bound exceeds upper bound", column=column,
                                  row=int(np.flatnonzero(inverted)[0]) + 1)
        else:
            lower[:, j] = _parse_numeric(frame, column)
            upper[:, j] = lower[:, j]

    categorical = np.empty((size, schema.r), dtype=object)
    unseen = np.zeros((size, schema.r), dtype=bool)
    domains: Dict[str, tuple] = {}
    for j, column in enumerate(schema.categorical_names):
        values = frame[column].str.strip().to_numpy(dtype=object)
        empty = values == ""
        if empty.any():
            raise MissingCell("empty cell", column=column, row=int(np.flatnonzero(empty)[0]) + 1)
        categorical[:, j] = values
        domain = schema.categorical_domains.get(column)
        if domain is None:
            domains[column] = tuple(_first_appearance(values))
            continue
        outside = ~np.isin(values, np.asarray(domain, dtype=object))
        if outside.any():
            row = int(np.flatnonzero(outside)[0]) + 1
            if role == "train":
                raise UnknownCategoryError(f"value '{values[row - 1]}' is not in the declared domain",
                                           column=column, row=row)
            unseen[:, j] = outside
            logger.warning(f"{int(outside.sum())} unseen value(s) in column '{column}' of {path.name}")

    labels = None
    if has_labels:
        raw_labels = frame[schema.class_column].str.strip().to_numpy(dtype=object)
        empty = raw_labels == ""
        if empty.any():
            raise MissingCell("empty cell", column=schema.class_column,
                              row=int(np.flatnonzero(empty)[0]) + 1)
        if class_set is None:
            class_set = _first_appearance(raw_labels)
        lookup = {label: code for code, label in enumerate(class_set)}
        labels = np.empty(size, dtype=int)
        for row, label in enumerate(raw_labels):
            if label not in lookup:
                raise UnknownCategoryError(f"unknown class '{label}'", column=schema.class_column,
                                           row=row + 1)
            labels[row] = lookup[label]
    elif class_set is None:
        class_set = ()

    dataset = Dataset(
        schema=schema.with_domains(domains) if domains else schema,
        lower=lower,
        upper=upper,
        categorical=categorical,
        labels=labels,
        class_set=tuple(class_set),
        unseen=unseen,
        name=name or path.stem
    )
    logger.info(f"Loaded {path.name} as {role} data: N={size}, n={schema.n}, r={schema.r}, "
                f"classes={len(dataset.class_set)}")
    return dataset


def dataset_paths(name: str, data_dir: Union[str, Path], schema_dir: Union[str, Path]) -> Tuple[Path, Path]:
    """
    Locate ``<data_dir>/<name>.csv`` and its schema file.

    The schema file may also sit next to the CSV.

    Raises:
        MissingDataset: Either file is absent
    """
    data_dir = Path(data_dir)
    csv_path = data_dir / f"{name}.csv"
    if not csv_path.exists():
        raise MissingDataset(f"dataset '{name}' not found at {csv_path}; run fetch_datasets.py first")
    schema_path = Path(schema_dir) / f"{name}.schema"
    if not schema_path.exists():
        schema_path = data_dir / f"{name}.schema"
    if not schema_path.exists():
        raise MissingDataset(f"schema for dataset '{name}' not found in {schema_dir} or {data_dir}")
    return csv_path, schema_path


def load_named_dataset(name: str, data_dir: Union[str, Path], schema_dir: Union[str, Path]) -> Dataset:
    """Load a benchmark dataset by name (see dataset_paths)."""
    csv_path, schema_path = dataset_paths(name, data_dir, schema_dir)
    return load_csv(csv_path, FeatureSchema.from_file(schema_path), role="train", name=name)


def save_csv(dataset: Dataset, path: Union[str, Path]) -> Path:
    """
    Write ``dataset`` in the layout ``load_csv`` reads: schema columns in
    canonical order, interval features as ``<name>.lo``/``<name>.hi`` pairs,
    then the class column when labels are present.
    """
    schema = dataset.schema
    columns: Dict[str, Any] = {}
    for j, name in enumerate(schema.numeric_names):
        if name in schema.interval_columns:
            columns[f"{name}.lo"] = dataset.lower[:, j]
            columns[f"{name}.hi"] = dataset.upper[:, j]
        else:
            columns[name] = dataset.lower[:, j]
    for j, name in enumerate(schema.categorical_names):
        columns[name] = dataset.categorical[:, j]
    if dataset.has_labels:
        columns[schema.class_column] = dataset.label_names()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(columns).to_csv(path, index=False)
    logger.info(f"Wrote {len(dataset)} rows to {path}")
    return path
