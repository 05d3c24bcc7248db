"""
Small in-memory datasets shared by the test suites
"""

from pathlib import Path
import sys
from typing import Optional, Sequence

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.data_models import CATEGORICAL, NUMERIC, ColumnSpec, Dataset, FeatureSchema  # noqa: E402


def make_dataset(numeric: Optional[Sequence[Sequence[float]]] = None,
                 categorical: Optional[Sequence[Sequence[str]]] = None,
                 labels: Optional[Sequence[str]] = None,
                 class_set: Optional[Sequence[str]] = None,
                 name: str = "fixture") -> Dataset:
    """
    Build a crisp dataset. Feature names are x0.. and c0..; categorical
    domains are first-appearance order.
    """
    rows = len(labels) if labels is not None else len(numeric if numeric is not None else categorical)
    numeric = np.asarray(numeric, dtype=float) if numeric is not None else np.empty((rows, 0))
    categorical = (np.asarray(categorical, dtype=object) if categorical is not None
                   else np.empty((rows, 0), dtype=object))
    columns = [ColumnSpec(f"x{j}", NUMERIC) for j in range(numeric.shape[1])]
    columns += [ColumnSpec(f"c{j}", CATEGORICAL) for j in range(categorical.shape[1])]
    domains = {f"c{j}": tuple(dict.fromkeys(categorical[:, j])) for j in range(categorical.shape[1])}
    schema = FeatureSchema(tuple(columns), "class", domains)
    codes = None
    if labels is not None:
        class_set = tuple(class_set or dict.fromkeys(labels))
        codes = np.array([class_set.index(label) for label in labels], dtype=int)
    return Dataset(schema, numeric, numeric, categorical, codes, tuple(class_set or ()), name=name)


def xor_dataset(copies: int = 1) -> Dataset:
    """Two categorical features whose XOR is the class."""
    rows = [["a", "a"], ["a", "b"], ["b", "a"], ["b", "b"]] * copies
    labels = ["0", "1", "1", "0"] * copies
    return make_dataset(categorical=rows, labels=labels)


def write_text(directory: Path, name: str, text: str) -> Path:
    path = Path(directory) / name
    path.write_text(text, encoding="utf-8")
    return path
