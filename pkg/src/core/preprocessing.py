"""
Min-max normalization and cross-validation splitting
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple
import logging

import numpy as np
from sklearn.model_selection import KFold, StratifiedKFold, train_test_split

from core.data_models import Dataset
from core.exceptions import TooFewSamples

logger = logging.getLogger(__name__)

CLIP_TO_UNIT = "clip-to-unit-interval"


@dataclass(frozen=True, eq=False)
class Normalizer:
    """Per-feature min-max scaling fitted on training data."""

    minimum: np.ndarray
    maximum: np.ndarray
    clip_policy: str = CLIP_TO_UNIT

    def __post_init__(self):
        for name in ("minimum", "maximum"):
            array = np.array(getattr(self, name), dtype=float, copy=True)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def span(self) -> np.ndarray:
        return self.maximum - self.minimum

    def scale(self, values: np.ndarray) -> Tuple[np.ndarray, int]:
        """
        Scale a value matrix and clip it to [0, 1].

        Returns:
            (scaled values, number of clipped entries)
        """
        values = np.asarray(values, dtype=float)
        span = self.span
        safe_span = np.where(span > 0, span, 1.0)
        scaled = np.where(span > 0, (values - self.minimum) / safe_span, 0.0)
        outside = (scaled < 0.0) | (scaled > 1.0)
        return np.clip(scaled, 0.0, 1.0), int(outside.sum())

    def transform(self, data: Dataset) -> Dataset:
        """Return ``data`` with numeric bounds mapped into the unit interval."""
        if data.n == 0:
            return data
        lower, clipped_lower = self.scale(data.lower)
        upper, clipped_upper = self.scale(data.upper)
        clipped = clipped_lower + clipped_upper
        if clipped:
            logger.warning(f"Clipped {clipped} numeric value(s) outside the training range of "
                           f"'{data.name or 'dataset'}' to [0, 1]")
        return data.with_numeric(lower, upper)

    def inverse_transform(self, values: np.ndarray) -> np.ndarray:
        """Map unit-interval values back to the original scale."""
        return np.asarray(values, dtype=float) * self.span + self.minimum


def fit_normalizer(train: Dataset) -> Normalizer:
    """
    Fit a normalizer on the lower and upper bounds of the training data jointly.

    Args:
        train: Training dataset with at least one sample

    Returns:
        Normalizer
    """
    if len(train) == 0:
        raise TooFewSamples("cannot fit a normalizer on an empty dataset")
    if train.n == 0:
        return Normalizer(np.empty(0), np.empty(0))
    stacked = np.vstack([train.lower, train.upper])
    normalizer = Normalizer(stacked.min(axis=0), stacked.max(axis=0))
    constant = int((normalizer.span == 0).sum())
    if constant:
        logger.debug(f"{constant} constant numeric feature(s) will map to 0")
    return normalizer


def _repeat_seeds(seed: int, repeats: int) -> List[int]:
    return [int(value) for value in np.random.default_rng(seed).integers(0, 2 ** 31 - 1, size=repeats)]


def kfold_splits(data: Dataset, k: int, repeats: int = 1, seed: int = 0) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Repeated k-fold cross-validation splits.

    Each repeat reshuffles with its own seed derived from ``seed``. Folds are
    stratified by class when every class has at least ``k`` members and plain
    otherwise.

    Args:
        data: Dataset to split
        k: Number of folds (>= 2)
        repeats: Number of repetitions
        seed: Base seed

    Returns:
        List of (train indices, test indices), repeat-major

    Raises:
        TooFewSamples: If k < 2 or the dataset has fewer than k samples
    """
    if k < 2:
        raise TooFewSamples(f"k must be at least 2, got {k}")
    if len(data) < k:
        raise TooFewSamples(f"{len(data)} samples cannot be split into {k} folds")

    labels = data.labels
    stratify = labels is not None and np.all(np.bincount(labels)[np.unique(labels)] >= k)
    if not stratify:
        logger.warning(f"Stratification disabled for '{data.name}': a class has fewer than {k} members")

    indices = np.arange(len(data))
    splits = []
    for repeat_seed in _repeat_seeds(seed, repeats):
        if stratify:
            splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=repeat_seed)
            folds = splitter.split(indices, labels)
        else:
            splitter = KFold(n_splits=k, shuffle=True, random_state=repeat_seed)
            folds = splitter.split(indices)
        for train_index, test_index in folds:
            splits.append((np.asarray(train_index), np.asarray(test_index)))
    return splits


def holdout_split(labels: np.ndarray, fraction: float = 0.5, seed: int = 0,
                  stratify: Optional[bool] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Seeded split into two parts whose sizes differ by at most one.

    Stratified by class unless a class has fewer than two members.

    Returns:
        (first part indices, second part indices), each sorted
    """
    labels = np.asarray(labels)
    indices = np.arange(len(labels))
    if len(indices) < 2:
        raise TooFewSamples("a hold-out split needs at least two samples")
    if stratify is None:
        stratify = bool(np.all(np.bincount(labels)[np.unique(labels)] >= 2))
        if not stratify:
            logger.warning("Hold-out split is not stratified: a class has fewer than two members")
    first, second = train_test_split(indices, test_size=fraction, random_state=seed,
                                     stratify=labels if stratify else None)
    return np.sort(first), np.sort(second)
