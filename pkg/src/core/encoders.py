"""
Categorical-to-numeric encoders

Every encoder is fitted on training rows only and then applied to any data
with ``transform``. Encoded columns are min-max rescaled into [0, 1] with
statistics of the training-phase encoding, so the output can be fed to the
hyperbox learners next to the normalized numeric features.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
import pandas as pd

from config.settings import ENCODER_CONFIG
from core.data_models import NUMERIC, ColumnSpec, Dataset, FeatureSchema
from core.exceptions import EmptyDomain, EncoderError, MissingLabels
from core.preprocessing import Normalizer

logger = logging.getLogger(__name__)

ENCODER_KINDS = ("label", "onehot", "sum", "helmert", "target", "jamesstein", "loo", "catboost")
SUPERVISED_KINDS = ("target", "jamesstein", "loo", "catboost")
PHASES = ("train", "test")

_ALIASES = {
    "one-hot": "onehot",
    "one_hot": "onehot",
    "james-stein": "jamesstein",
    "james_stein": "jamesstein",
    "leave-one-out": "loo",
}

_HYPERPARAMS = {
    "target": {"m": ENCODER_CONFIG["target.m"], "z": ENCODER_CONFIG["target.z"]},
    "catboost": {"z": ENCODER_CONFIG["catboost.z"], "p": None},
}


def canonical_kind(kind: str) -> str:
    """Map an encoder name (or alias) to its canonical form."""
    name = _ALIASES.get(kind.strip().lower(), kind.strip().lower())
    if name not in ENCODER_KINDS:
        raise EncoderError(f"unknown encoder '{kind}', expected one of {ENCODER_KINDS}")
    return name


@dataclass(frozen=True, eq=False)
class FeatureState:
    """Value table and class statistics of one categorical feature."""

    name: str
    domain: Tuple[str, ...]
    counts: np.ndarray           # N_k per value
    class_counts: np.ndarray     # N_ck, shape (len(domain), p)
    code_sums: np.ndarray        # sum of class codes per value

    @property
    def size(self) -> int:
        return len(self.domain)

    def codes(self, values: Sequence[str]) -> np.ndarray:
        """Domain index of each value, -1 for values outside the domain."""
        return pd.Categorical(np.asarray(values, dtype=object), categories=list(self.domain)).codes.astype(int)


@dataclass(frozen=True, eq=False)
class EncodedMatrix:
    """Encoded rows plus the (source feature, component) of every column."""

    values: np.ndarray
    provenance: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "provenance", tuple(self.provenance))
        if self.values.ndim != 2 or self.values.shape[1] != len(self.provenance):
            raise EncoderError("encoded values and column provenance disagree in width")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def column_names(self) -> List[str]:
        return [f"{feature}#{component}" for feature, component in self.provenance]


@dataclass(frozen=True, eq=False)
class FittedEncoder:
    """
    State of an encoder fitted on training data.

    Attributes:
        kind: Canonical encoder name
        features: Per-feature value tables and class statistics
        hyperparams: m, z (target) or z, p (catboost)
        class_totals: N_c per class code
        n_train: Number of training rows
        global_mean: Mean training class code (loo / catboost prior)
        target_columns: Class codes that get their own column (target / jamesstein)
        rescaler: Min-max rescaler fitted on the training-phase encoding
    """

    kind: str
    features: Tuple[FeatureState, ...]
    hyperparams: Dict[str, float] = field(default_factory=dict)
    class_totals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    n_train: int = 0
    global_mean: float = 0.0
    target_columns: Tuple[int, ...] = ()
    rescaler: Optional[Normalizer] = None

    @property
    def feature_names(self) -> List[str]:
        return [state.name for state in self.features]

    @property
    def provenance(self) -> Tuple[Tuple[str, int], ...]:
        return tuple((state.name, component)
                     for state in self.features
                     for component in range(self.width(state)))

    @property
    def output_arity(self) -> int:
        return len(self.provenance)

    def width(self, state: FeatureState) -> int:
        if self.kind == "onehot":
            return state.size
        if self.kind in ("sum", "helmert"):
            return state.size - 1
        if self.kind in ("target", "jamesstein"):
            return len(self.target_columns)
        return 1

    def feature(self, name: str) -> FeatureState:
        for state in self.features:
            if state.name == name:
                return state
        raise EncoderError(f"encoder was not fitted on feature '{name}'")


def _training_domain(train: Dataset, column: int) -> Tuple[str, ...]:
    """Training values in first-appearance order; declared schema domains are not consulted."""
    return tuple(dict.fromkeys(train.categorical[:, column]))


def _resolve_hyperparams(kind: str, hyperparams: Dict[str, Any]) -> Dict[str, float]:
    defaults = dict(_HYPERPARAMS.get(kind, {}))
    unknown = set(hyperparams) - set(defaults)
    if unknown:
        raise EncoderError(f"encoder '{kind}' does not accept {sorted(unknown)}")
    defaults.update({key: value for key, value in hyperparams.items() if value is not None})
    if "z" in defaults and defaults["z"] <= 0:
        raise EncoderError(f"smoothing z must be positive, got {defaults['z']}")
    return defaults


def fit_encoder(kind: str, train: Dataset, **hyperparams) -> FittedEncoder:
    """
    Fit an encoder on training data.

    Args:
        kind: One of ENCODER_KINDS (aliases such as 'one-hot' accepted)
        train: Training dataset
        **hyperparams: m, z for target; z, p for catboost

    Returns:
        FittedEncoder whose rescaler is fitted on the training-phase encoding

    Raises:
        EmptyDomain: If the training set is empty or a feature has no values
        MissingLabels: If a class-statistic encoder gets unlabelled data
    """
    kind = canonical_kind(kind)
    params = _resolve_hyperparams(kind, hyperparams)
    if len(train) == 0:
        raise EmptyDomain(f"cannot fit '{kind}' encoder on an empty training set")
    if kind in SUPERVISED_KINDS and not train.has_labels:
        raise MissingLabels(f"'{kind}' encoder needs class labels")

    p = max(train.p, 1)
    labels = train.labels if train.has_labels else np.zeros(len(train), dtype=int)
    states = []
    for column, name in enumerate(train.schema.categorical_names):
        domain = _training_domain(train, column)
        if not domain:
            raise EmptyDomain(f"feature '{name}' has an empty domain")
        codes = pd.Categorical(train.categorical[:, column], categories=list(domain)).codes
        class_counts = np.zeros((len(domain), p))
        np.add.at(class_counts, (codes, labels), 1.0)
        states.append(FeatureState(
            name=name,
            domain=domain,
            counts=class_counts.sum(axis=1),
            class_counts=class_counts,
            code_sums=class_counts @ np.arange(p, dtype=float)
        ))

    global_mean = float(labels.mean())
    if kind == "catboost" and params.get("p") is None:
        params["p"] = global_mean
    target_columns = (1,) if p == 2 else tuple(range(p))

    encoder = FittedEncoder(
        kind=kind,
        features=tuple(states),
        hyperparams=params,
        class_totals=np.bincount(labels, minlength=p).astype(float),
        n_train=len(train),
        global_mean=global_mean,
        target_columns=target_columns
    )
    raw = _encode(encoder, train, "train").values
    if raw.shape[1]:
        rescaler = Normalizer(raw.min(axis=0), raw.max(axis=0))
    else:
        rescaler = Normalizer(np.empty(0), np.empty(0))
    logger.info(f"Fitted '{kind}' encoder on {len(train)} rows: {len(states)} feature(s) -> "
                f"{encoder.output_arity} column(s)")
    return replace(encoder, rescaler=rescaler)


def _contrast_table(kind: str, size: int) -> np.ndarray:
    """Rows are the sum or Helmert codes of each domain value."""
    table = np.zeros((size, size - 1))
    if kind == "sum":
        table[:size - 1] = np.eye(size - 1)
        table[size - 1] = -1.0
        return table
    table[0] = -1.0
    for j in range(2, size + 1):
        table[j - 1, j - 2] = j - 1
        table[j - 1, j - 1:] = -1.0
    return table


def _posterior_table(encoder: FittedEncoder, state: FeatureState) -> np.ndarray:
    """Target or James-Stein value of every domain value, one column per target class."""
    columns = list(encoder.target_columns)
    counts = state.counts[:, None]
    seen = counts > 0
    p_k = np.divide(state.class_counts[:, columns], counts,
                    out=np.zeros((state.size, len(columns))), where=seen)
    prior = (encoder.class_totals[columns] / encoder.n_train)[None, :]

    if encoder.kind == "target":
        m, z = encoder.hyperparams["m"], encoder.hyperparams["z"]
        weight = 1.0 / (1.0 + np.exp(-(counts - m) / z))
        table = weight * p_k + (1.0 - weight) * prior
    else:
        group_var = np.divide(p_k * (1.0 - p_k), counts, out=np.zeros_like(p_k), where=seen)
        population_var = prior * (1.0 - prior) / encoder.n_train
        total = group_var + population_var
        shrink = np.divide(group_var, total, out=np.zeros_like(total), where=total > 0)
        table = (1.0 - shrink) * p_k + shrink * prior
    return np.where(seen, table, np.broadcast_to(prior, table.shape))


def unseen_policy(encoder: FittedEncoder, feature: str, value: Any = None) -> np.ndarray:
    """
    Encoded components (before rescaling) used for a value the encoder never saw.

    label gets the next free integer code; one-hot, sum and Helmert get an
    all-zero vector; target and James-Stein get the class priors; LOO and
    CatBoost get the training prior (global mean class code or p).
    """
    state = encoder.feature(feature)
    logger.debug(f"Unseen value '{value}' of '{feature}' encoded by the '{encoder.kind}' fallback")
    if encoder.kind == "label":
        return np.array([float(state.size)])
    if encoder.kind in ("onehot", "sum", "helmert"):
        return np.zeros(encoder.width(state))
    if encoder.kind in ("target", "jamesstein"):
        return encoder.class_totals[list(encoder.target_columns)] / encoder.n_train
    if encoder.kind == "catboost":
        return np.array([encoder.hyperparams["p"]])
    return np.array([encoder.global_mean])


def _phase_labels(data: Dataset, kind: str) -> np.ndarray:
    if not data.has_labels:
        raise MissingLabels(f"train-phase '{kind}' encoding needs class labels")
    return np.asarray(data.labels, dtype=float)


def _encode_feature(encoder: FittedEncoder, state: FeatureState, values: np.ndarray,
                    codes: np.ndarray, phase: str, data: Dataset) -> Tuple[np.ndarray, int]:
    """Raw encoding of one feature, plus the number of singleton fallbacks used."""
    kind = encoder.kind
    known = codes >= 0
    if kind in SUPERVISED_KINDS:
        known &= state.counts[np.maximum(codes, 0)] > 0
    fallback = unseen_policy(encoder, state.name) if not known.all() else None
    width = encoder.width(state)
    output = np.empty((len(codes), width))
    singletons = 0

    if kind == "label":
        output[:, 0] = codes
    elif kind == "onehot":
        output[:] = np.eye(state.size)[np.maximum(codes, 0)]
    elif kind in ("sum", "helmert"):
        output[:] = _contrast_table(kind, state.size)[np.maximum(codes, 0)]
    elif kind in ("target", "jamesstein"):
        output[:] = _posterior_table(encoder, state)[np.maximum(codes, 0)]
    elif kind == "loo":
        safe = np.maximum(codes, 0)
        if phase == "train":
            own = _phase_labels(data, kind)
            remaining = state.counts[safe] - 1.0
            singleton = known & (remaining <= 0)
            singletons = int(singleton.sum())
            output[:, 0] = np.divide(state.code_sums[safe] - own, remaining,
                                     out=np.full(len(codes), encoder.global_mean), where=remaining > 0)
        else:
            output[:, 0] = np.divide(state.code_sums[safe], state.counts[safe],
                                     out=np.zeros(len(codes)), where=state.counts[safe] > 0)
    else:
        z, prior = encoder.hyperparams["z"], encoder.hyperparams["p"]
        if phase == "train":
            own = pd.Series(_phase_labels(data, kind))
            groups = own.groupby(pd.Series(values, dtype=object).to_numpy())
            history_sum = (groups.cumsum() - own).to_numpy()
            history_count = groups.cumcount().to_numpy()
            output[:, 0] = (history_sum + z * prior) / (history_count + z)
        else:
            safe = np.maximum(codes, 0)
            output[:, 0] = (state.code_sums[safe] + z * prior) / (state.counts[safe] + z)

    if fallback is not None:
        output[~known] = fallback
    return output, singletons


def _encode(encoder: FittedEncoder, data: Dataset, phase: str) -> EncodedMatrix:
    if phase not in PHASES:
        raise EncoderError(f"phase must be one of {PHASES}, got '{phase}'")
    names = data.schema.categorical_names
    blocks = []
    unseen_total = 0
    singleton_total = 0
    for state in encoder.features:
        if state.name not in names:
            raise EncoderError(f"data has no categorical feature '{state.name}'")
        values = data.categorical[:, names.index(state.name)]
        codes = state.codes(values)
        unseen_total += int((codes < 0).sum())
        block, singletons = _encode_feature(encoder, state, values, codes, phase, data)
        singleton_total += singletons
        blocks.append(block)

    if unseen_total:
        logger.warning(f"'{encoder.kind}' encoder met {unseen_total} unseen value(s) in "
                       f"'{data.name or 'dataset'}' and used its fallback encoding")
    if singleton_total:
        logger.warning(f"LOO encoding fell back to the global mean for {singleton_total} "
                       f"singleton categor{'y' if singleton_total == 1 else 'ies'}")
    values = np.hstack(blocks) if blocks else np.empty((len(data), 0))
    return EncodedMatrix(values, encoder.provenance)


def transform(encoder: FittedEncoder, data: Dataset, phase: str = "test", rescale: bool = True) -> EncodedMatrix:
    """
    Encode the categorical features of ``data``.

    Only 'loo' and 'catboost' behave differently in the two phases: in the
    train phase ``data`` must be the labelled training set in its original
    row order.

    Args:
        encoder: Fitted encoder
        data: Rows to encode
        phase: 'train' or 'test'
        rescale: Map columns into [0, 1] with the training statistics

    Returns:
        EncodedMatrix with one row per input row
    """
    encoded = _encode(encoder, data, phase)
    if not rescale or encoder.rescaler is None or encoded.shape[1] == 0:
        return encoded
    values, clipped = encoder.rescaler.scale(encoded.values)
    if clipped:
        logger.debug(f"Clipped {clipped} encoded value(s) outside the training range")
    return EncodedMatrix(values, encoded.provenance)


def encoded_dataset(data: Dataset, encoded: EncodedMatrix) -> Dataset:
    """
    Purely numeric dataset made of the numeric features of ``data`` followed
    by the encoded columns (as crisp values).
    """
    if len(encoded.values) != len(data):
        raise EncoderError("encoded rows do not match the dataset")
    columns = [ColumnSpec(name, NUMERIC) for name in data.schema.numeric_names]
    columns.extend(ColumnSpec(name, NUMERIC) for name in encoded.column_names)
    schema = FeatureSchema(
        columns=tuple(columns),
        class_column=data.schema.class_column,
        interval_columns=frozenset(name for name in data.schema.interval_columns)
    )
    return Dataset(
        schema=schema,
        lower=np.hstack([data.lower, encoded.values]),
        upper=np.hstack([data.upper, encoded.values]),
        categorical=np.empty((len(data), 0), dtype=object),
        labels=data.labels,
        class_set=data.class_set,
        name=data.name
    )
