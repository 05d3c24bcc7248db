"""
Two-class synthetic datasets with bimodal numeric features and one
categorical feature
"""

from typing import Any, Dict, Optional, Tuple
import logging

import numpy as np

from config.settings import SYNTHETIC_CONFIG, SYNTHETIC_DATASETS
from core.data_models import CATEGORICAL, NUMERIC, ColumnSpec, Dataset, FeatureSchema

logger = logging.getLogger(__name__)


def _draw_class(rng: np.random.Generator, means: np.ndarray, variance: float, count: int) -> np.ndarray:
    """Draw ``count`` points from an equal-weight Gaussian mixture."""
    components = rng.integers(0, len(means), size=count)
    noise = rng.normal(0.0, np.sqrt(variance), size=(count, means.shape[1]))
    return means[components] + noise


def _build_part(rng: np.random.Generator, schema: FeatureSchema, config: Dict[str, Any],
                per_class: int, name: str) -> Dataset:
    domain = schema.categorical_domains[config["categorical_name"]]
    classes = sorted(config["component_means"])
    points = []
    labels = []
    for code, class_id in enumerate(classes):
        means = np.asarray(config["component_means"][class_id], dtype=float)
        points.append(_draw_class(rng, means, config["variance"], per_class))
        labels.append(np.full(per_class, code))
    points = np.vstack(points)
    labels = np.concatenate(labels)
    categories = rng.integers(0, len(domain), size=len(labels))
    categorical = np.asarray(domain, dtype=object)[categories].reshape(-1, 1)

    order = rng.permutation(len(labels))
    return Dataset(
        schema=schema,
        lower=points[order],
        upper=points[order],
        categorical=categorical[order],
        labels=labels[order],
        class_set=tuple(str(class_id) for class_id in classes),
        name=name
    )


def synthetic_schema(variant: str, config: Optional[Dict[str, Any]] = None) -> FeatureSchema:
    config = config or SYNTHETIC_CONFIG
    columns = [ColumnSpec(name, NUMERIC) for name in config["numeric_names"]]
    columns.append(ColumnSpec(config["categorical_name"], CATEGORICAL))
    return FeatureSchema(
        columns=tuple(columns),
        class_column=config["class_column"],
        categorical_domains={config["categorical_name"]: tuple(config["categorical_domains"][variant])}
    )


def generate_synthetic(variant: str, seed: int = 0,
                       config: Optional[Dict[str, Any]] = None) -> Tuple[Dataset, Dataset]:
    """
    Generate the training and testing parts of a synthetic dataset.

    Numeric features follow a two-component Gaussian mixture per class; the
    categorical feature is drawn uniformly from the variant's domain and
    carries no class information. Rows of each part are shuffled.

    Args:
        variant: 'synthetic-1' (two categorical values) or 'synthetic-2' (ten)
        seed: Random seed
        config: Overrides for SYNTHETIC_CONFIG

    Returns:
        (train, test)
    """
    if variant not in SYNTHETIC_DATASETS:
        raise ValueError(f"unknown synthetic variant '{variant}', expected one of {SYNTHETIC_DATASETS}")
    merged = dict(SYNTHETIC_CONFIG)
    if config:
        merged.update(config)

    schema = synthetic_schema(variant, merged)
    rng = np.random.default_rng(seed)
    train = _build_part(rng, schema, merged, merged["train_per_class"], variant)
    test = _build_part(rng, schema, merged, merged["test_per_class"], variant)
    logger.info(f"Generated {variant} with seed {seed}: {len(train)} training and {len(test)} testing samples")
    return train, test
