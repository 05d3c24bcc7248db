"""
Online hyperbox learners for mixed numeric and categorical features

M1 keeps a pair of categorical bounds (E, F) per dimension and measures
categorical distances through class-conditional probabilities. M2 keeps a
bit string per categorical dimension and matches values by bitwise AND.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np

from config.settings import GFMM_CONFIG
from core.data_models import Dataset, MixedSample
from core.exceptions import ConfigError, DimensionMismatch, TooFewSamples
from core.hyperbox import (A0, TIE_BREAK_MODES, BitStrings, BoundPair, Hyperbox, MembershipParams, Prediction,
                           TieBreaker, contract_bounds, membership_values, overlap_test_bounds,
                           resolve_manhattan)
from core.numeric_learners import BoxStore, GfmmModel, _contract_against_others, _ranked

logger = logging.getLogger(__name__)

# Integer codes used for categorical values inside the learners
UNSET = -1
UNSEEN = -2


@dataclass(frozen=True, eq=False)
class FeatureDistances:
    """Class-conditional distances between the values of one categorical feature."""

    name: str
    domain: Tuple[str, ...]
    conditionals: np.ndarray   # P(c | A = a), shape (L, p)
    distances: np.ndarray      # d, shape (L, L)
    normalized: np.ndarray     # h = d / max d

    def __post_init__(self):
        size = len(self.domain)
        # rows/columns L and L + 1 stand for the unset bound and unseen values
        extended = np.ones((size + 2, size + 2))
        extended[:size, :size] = self.normalized
        extended[size, :] = 0.0
        extended[:, size] = 0.0
        object.__setattr__(self, "_extended", extended)

    def codes(self, values: Sequence[Optional[str]]) -> np.ndarray:
        lookup = {value: code for code, value in enumerate(self.domain)}
        return np.array([UNSET if value is A0 else lookup.get(value, UNSEEN) for value in values], dtype=int)

    def h(self, a, b) -> np.ndarray:
        """Normalized distance between code arrays; the unset bound is 0 from everything, unseen values 1."""
        size = len(self.domain)
        a = np.asarray(a)
        b = np.asarray(b)
        index_a = np.where(a >= 0, a, size - 1 - a)
        index_b = np.where(b >= 0, b, size - 1 - b)
        return self._extended[index_a, index_b]


@dataclass(frozen=True, eq=False)
class CategoricalDistanceTable:
    """Distance tables of every categorical feature, in schema order."""

    features: Tuple[FeatureDistances, ...]

    @property
    def r(self) -> int:
        return len(self.features)

    def encode(self, categorical: np.ndarray) -> np.ndarray:
        """Code matrix of an N x r value array (unseen values get UNSEEN)."""
        categorical = np.asarray(categorical, dtype=object)
        if self.r == 0:
            return np.empty((len(categorical), 0), dtype=int)
        categorical = categorical.reshape(-1, self.r)
        return np.column_stack([feature.codes(categorical[:, j]) for j, feature in enumerate(self.features)])

    def h(self, j: int, a, b) -> np.ndarray:
        return self.features[j].h(a, b)


def feature_distances(name: str, domain: Sequence[str], conditionals: np.ndarray) -> FeatureDistances:
    """Distance tables of one feature from its class-conditional probabilities."""
    conditionals = np.asarray(conditionals, dtype=float)
    difference = conditionals[:, None, :] - conditionals[None, :, :]
    distances = np.sqrt((difference ** 2).sum(axis=2))
    largest = distances.max() if distances.size else 0.0
    normalized = distances / largest if largest > 0 else np.zeros_like(distances)
    return FeatureDistances(name, tuple(domain), conditionals, distances, normalized)


def fit_distance_table(train: Dataset) -> CategoricalDistanceTable:
    """
    Estimate P(c | A_j = a) from labelled training data and derive the
    distance d(a, a') = sqrt(sum_c (P(c|a) - P(c|a'))^2) and its normalized
    form h = d / max d for every categorical feature (h = 0 when max d = 0).
    """
    if not train.has_labels:
        raise TooFewSamples("a distance table needs class labels")
    p = max(train.p, 1)
    features = []
    for j, name in enumerate(train.schema.categorical_names):
        column = train.categorical[:, j]
        domain = tuple(dict.fromkeys(column))
        lookup = {value: code for code, value in enumerate(domain)}
        codes = np.array([lookup[value] for value in column], dtype=int)
        counts = np.zeros((len(domain), p))
        np.add.at(counts, (codes, train.labels), 1.0)
        feature = feature_distances(name, domain, counts / counts.sum(axis=1, keepdims=True))
        features.append(feature)
        if not feature.distances.any():
            logger.debug(f"All values of '{name}' have identical class profiles; its distances are zero")
    return CategoricalDistanceTable(tuple(features))


def _common_errors(theta: float, gamma, tie_break: str) -> List[str]:
    errors = []
    if not 0 < theta <= 1:
        errors.append(f"theta must lie in (0, 1], got {theta}")
    if np.any(np.asarray(gamma, dtype=float) <= 0):
        errors.append("gamma must be positive")
    if tie_break not in TIE_BREAK_MODES:
        errors.append(f"unknown tie-break mode '{tie_break}'")
    return errors


@dataclass(frozen=True)
class M1Config:
    """Hyper-parameters of the bound-pair mixed learner."""

    theta: float = 0.1
    eta: float = 0.1
    gamma: Union[float, Tuple[float, ...]] = GFMM_CONFIG["gamma"]
    tie_break: str = GFMM_CONFIG["tie_break"]
    seed: int = 0

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ConfigError("; ".join(errors))

    def validate(self) -> List[str]:
        errors = _common_errors(self.theta, self.gamma, self.tie_break)
        if not 0 <= self.eta <= 1:
            errors.append(f"eta must lie in [0, 1], got {self.eta}")
        return errors

    def tie_breaker(self) -> TieBreaker:
        return TieBreaker(self.tie_break, self.seed)


@dataclass(frozen=True)
class M2Config:
    """Hyper-parameters of the bit-string mixed learner; ``beta`` is a count of dimensions."""

    theta: float = 0.1
    beta: int = 1
    gamma: Union[float, Tuple[float, ...]] = GFMM_CONFIG["gamma"]
    tie_break: str = GFMM_CONFIG["tie_break"]
    seed: int = 0

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ConfigError("; ".join(errors))

    def validate(self) -> List[str]:
        errors = _common_errors(self.theta, self.gamma, self.tie_break)
        if self.beta < 0:
            errors.append(f"beta must be non-negative, got {self.beta}")
        return errors

    def tie_breaker(self) -> TieBreaker:
        return TieBreaker(self.tie_break, self.seed)


def beta_from_fraction(fraction: float, r: int) -> int:
    """floor(fraction * r), at least 1 whenever the fraction is positive."""
    if not 0 <= fraction <= 1:
        raise ConfigError(f"beta fraction must lie in [0, 1], got {fraction}")
    if fraction == 0 or r == 0:
        return 0
    return max(1, int(math.floor(fraction * r)))


# M1

def _m1_categorical_terms(E: np.ndarray, F: np.ndarray, codes: np.ndarray,
                          table: CategoricalDistanceTable) -> np.ndarray:
    """Per box, min over categorical dimensions of min(1 - h(a, e), 1 - h(a, f))."""
    terms = np.ones(E.shape[0])
    for j in range(table.r):
        a = codes[j]
        value = np.minimum(1.0 - table.h(j, a, E[:, j]), 1.0 - table.h(j, a, F[:, j]))
        covered = (a >= 0) & ((E[:, j] == a) | (F[:, j] == a))
        terms = np.minimum(terms, np.where(covered, 1.0, value))
    return terms


def _m1_memberships(V, W, E, F, lower, upper, codes, table, gamma) -> np.ndarray:
    numeric = membership_values(V, W, lower, upper, gamma)
    return np.minimum(numeric, _m1_categorical_terms(E, F, codes, table))


def membership_m1(box: Hyperbox, sample: MixedSample, table: CategoricalDistanceTable,
                  params: Optional[MembershipParams] = None) -> float:
    """Membership of a mixed sample to a box carrying categorical bounds (E, F)."""
    if not isinstance(box.categorical, BoundPair):
        raise DimensionMismatch("M1 membership needs a box with categorical bounds")
    if len(box.categorical.lower) != table.r or len(sample.categorical) != table.r:
        raise DimensionMismatch("categorical arity differs from the distance table")
    params = params or MembershipParams()
    E = np.array([feature.codes([value])[0] for feature, value in zip(table.features, box.categorical.lower)])
    F = np.array([feature.codes([value])[0] for feature, value in zip(table.features, box.categorical.upper)])
    codes = table.encode(np.array([sample.categorical], dtype=object))[0] if table.r else np.empty(0, dtype=int)
    if table.r:
        codes = np.where(np.asarray(sample.unseen, dtype=bool), UNSEEN, codes)
    return float(_m1_memberships(box.min_point[None, :], box.max_point[None, :], E[None, :], F[None, :],
                                 sample.lower, sample.upper, codes, table, params.vector(box.n))[0])


def _m1_gate(e: np.ndarray, f: np.ndarray, a: np.ndarray, table: CategoricalDistanceTable,
             eta: float) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Categorical expansion check of one box.

    Returns:
        Updated (E, F) when every dimension admits the sample, else None
    """
    e, f = e.copy(), f.copy()
    for j in range(table.r):
        value = a[j]
        if value < 0 or value == e[j] or value == f[j]:
            continue
        if e[j] == UNSET and f[j] == UNSET:
            e[j] = value
        elif f[j] == UNSET:
            if table.h(j, e[j], value) > eta:
                return None
            f[j] = value
        elif e[j] == UNSET:
            if table.h(j, f[j], value) > eta:
                return None
            e[j] = value
        else:
            to_e = table.h(j, e[j], value)
            to_f = table.h(j, value, f[j])
            old_size = table.h(j, e[j], f[j])
            new_size = max(to_e, to_f)
            if new_size > old_size:
                if new_size > eta:
                    return None
                if to_f > to_e:
                    e[j] = value
                else:
                    f[j] = value
    return e, f


def _categorical_overlap(ei, fi, ek, fk) -> np.ndarray:
    """Per dimension: any equality between a bound of i and a bound of k, unset bounds excluded."""
    overlap = np.zeros(len(ei), dtype=bool)
    for left in (ei, fi):
        for right in (ek, fk):
            overlap |= (left == right) & (left != UNSET)
    return overlap


def _categorical_contraction(ei, fi, ek, fk, table: CategoricalDistanceTable) -> Optional[Tuple[int, int, int]]:
    """
    Cheapest replacement of one categorical bound of box i removing its overlap with box k.

    Returns:
        (dimension, which bound (0 = E, 1 = F), new code) or None
    """
    best = None
    best_key = None
    for j in range(table.r):
        old_size = table.h(j, ei[j], fi[j])
        forbidden = {int(ek[j]), int(fk[j])}
        for which, replaced, retained in ((1, fi[j], ei[j]), (0, ei[j], fi[j])):
            if retained == UNSET or int(retained) in forbidden:
                continue
            candidates = np.array([code for code in range(len(table.features[j].domain))
                                   if code not in forbidden and code != replaced], dtype=int)
            if len(candidates) == 0:
                continue
            distances = table.h(j, candidates, retained)
            chosen = int(candidates[np.argmin(distances)])
            change = abs(old_size - float(distances.min()))
            key = (change, j)
            if best_key is None or key < best_key:
                best_key = key
                best = (j, which, chosen)
    return best


def train_m1(train: Dataset, cfg: M1Config) -> GfmmModel:
    """
    Single-pass training with categorical bounds.

    Candidates are the same-class boxes in descending membership. A box is
    expanded when the numeric size stays within θ and every categorical
    dimension admits the sample within η. The expanded box is then tested
    against every other-class box; a full overlap is removed by replacing
    one categorical bound of the expanded box, else by numeric contraction,
    else (no numeric features) the expansion is undone and a new box is made.
    """
    if len(train) == 0 or not train.has_labels:
        raise TooFewSamples("M1 training needs labelled samples")
    table = fit_distance_table(train)
    codes = table.encode(train.categorical)
    gamma = MembershipParams(cfg.gamma).vector(train.n)
    store = BoxStore(train.n)
    E = np.empty((len(train), train.r), dtype=int)
    F = np.empty((len(train), train.r), dtype=int)
    absorbed_by = np.empty(len(train), dtype=int)
    categorical_contractions = numeric_contractions = reverted = 0

    for row in range(len(train)):
        lower, upper, label, a = train.lower[row], train.upper[row], int(train.labels[row]), codes[row]
        same = store.of_class(label)
        placed = False
        if len(same):
            b = _m1_memberships(store.V[same], store.W[same], E[same], F[same], lower, upper, a, table, gamma)
            order = _ranked(b, same)
            if b[order[0]] == 1.0:
                store.cardinality[same[order[0]]] += 1
                absorbed_by[row] = same[order[0]]
                continue
            new_v = np.minimum(store.V[same], lower)
            new_w = np.maximum(store.W[same], upper)
            fits = ((new_w - new_v) <= cfg.theta).all(axis=1)
            for position in order[fits[order]]:
                index = same[position]
                bounds = _m1_gate(E[index], F[index], a, table, cfg.eta)
                if bounds is None:
                    continue
                saved = (store.V[index].copy(), store.W[index].copy(), E[index].copy(), F[index].copy())
                store.V[index], store.W[index] = new_v[position], new_w[position]
                E[index], F[index] = bounds
                outcome = _resolve_m1_overlaps(store, E, F, index, table)
                if outcome is None:
                    store.V[index], store.W[index], E[index], F[index] = saved
                    reverted += 1
                    break
                categorical_contractions += outcome[0]
                numeric_contractions += outcome[1]
                store.cardinality[index] += 1
                absorbed_by[row] = index
                placed = True
                break
        if not placed:
            index = store.add(lower, upper, label)
            E[index] = a
            F[index] = UNSET
            absorbed_by[row] = index

    count = store.count
    payloads = [BoundPair(_decode(table, E[i]), _decode(table, F[i])) for i in range(count)]
    logger.info(f"Onln-GFMM-M1 (theta={cfg.theta}, eta={cfg.eta}) built {count} boxes from {len(train)} "
                f"samples; {categorical_contractions} categorical and {numeric_contractions} numeric "
                f"contraction(s), {reverted} reverted expansion(s)")
    return GfmmModel(store.to_box_set(payloads=payloads), cfg, "m1", train.class_set, absorbed_by,
                     store.contracted[:count].copy(), distance_table=table)


def _decode(table: CategoricalDistanceTable, codes: np.ndarray) -> Tuple[Optional[str], ...]:
    return tuple(A0 if code == UNSET else table.features[j].domain[code] for j, code in enumerate(codes))


def _resolve_m1_overlaps(store: BoxStore, E: np.ndarray, F: np.ndarray, index: int,
                         table: CategoricalDistanceTable) -> Optional[Tuple[int, int]]:
    """
    Remove full overlaps between the expanded box and other-class boxes, in creation order.

    Returns:
        (categorical contractions, numeric contractions), or None when the
        expansion must be undone
    """
    categorical = numeric = 0
    for other in store.not_of_class(store.classes[index]):
        if store.n:
            result = overlap_test_bounds(store.V[index], store.W[index], store.V[other], store.W[other])
            if not result.overlaps:
                continue
        else:
            result = None
        if table.r and not _categorical_overlap(E[index], F[index], E[other], F[other]).all():
            continue
        replacement = _categorical_contraction(E[index], F[index], E[other], F[other], table) if table.r else None
        if replacement is not None:
            j, which, code = replacement
            (E if which == 0 else F)[index, j] = code
            store.contracted[index] = True
            categorical += 1
        elif result is not None:
            contract_bounds(store.V[index], store.W[index], store.V[other], store.W[other],
                            result.dimension, result.case)
            store.contracted[index] = store.contracted[other] = True
            numeric += 1
        else:
            return None
    return categorical, numeric


# M2

@dataclass(frozen=True, eq=False)
class _BitLayout:
    domains: Tuple[Tuple[str, ...], ...]
    offsets: np.ndarray

    @classmethod
    def from_domains(cls, domains: Sequence[Sequence[str]]) -> "_BitLayout":
        sizes = [len(domain) for domain in domains]
        return cls(tuple(tuple(domain) for domain in domains), np.concatenate([[0], np.cumsum(sizes)]).astype(int))

    @property
    def r(self) -> int:
        return len(self.domains)

    @property
    def width(self) -> int:
        return int(self.offsets[-1])

    def positions(self, categorical: np.ndarray, unseen: Optional[np.ndarray] = None) -> np.ndarray:
        """Bit position of each value (-1 for unseen), shape (N, r)."""
        categorical = np.asarray(categorical, dtype=object)
        if self.r == 0:
            return np.empty((len(categorical), 0), dtype=int)
        categorical = categorical.reshape(-1, self.r)
        positions = np.full(categorical.shape, -1, dtype=int)
        for j, domain in enumerate(self.domains):
            lookup = {value: code for code, value in enumerate(domain)}
            for row, value in enumerate(categorical[:, j]):
                code = lookup.get(value)
                if code is not None and not (unseen is not None and unseen[row, j]):
                    positions[row, j] = self.offsets[j] + code
        return positions

    def split(self, bits: np.ndarray) -> BitStrings:
        return BitStrings(tuple(bits[self.offsets[j]:self.offsets[j + 1]] for j in range(self.r)))

    def join(self, strings: BitStrings) -> np.ndarray:
        return np.concatenate(strings.bits) if strings.bits else np.zeros(0, dtype=bool)


def _m2_matches(S: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Per box, the number of categorical dimensions whose bit string contains the value."""
    seen = positions[positions >= 0]
    if len(seen) == 0:
        return np.zeros(S.shape[0], dtype=int)
    return S[:, seen].sum(axis=1)


def _m2_memberships(V, W, S, lower, upper, positions, r, gamma) -> np.ndarray:
    if r == 0:
        return membership_values(V, W, lower, upper, gamma)
    categorical = _m2_matches(S, positions) / r
    if V.shape[1] == 0:
        return categorical
    return 0.5 * (membership_values(V, W, lower, upper, gamma) + categorical)


def membership_m2(box: Hyperbox, sample: MixedSample, domains: Sequence[Sequence[str]],
                  params: Optional[MembershipParams] = None) -> float:
    """
    Membership of a mixed sample to a box carrying bit strings: the mean of
    the numeric membership and the share of matching categorical dimensions
    (only the part that exists when n = 0 or r = 0).
    """
    if not isinstance(box.categorical, BitStrings):
        raise DimensionMismatch("M2 membership needs a box with bit strings")
    layout = _BitLayout.from_domains(domains)
    if len(box.categorical.bits) != layout.r or len(sample.categorical) != layout.r:
        raise DimensionMismatch("categorical arity differs from the bit-string layout")
    params = params or MembershipParams()
    unseen = np.asarray(sample.unseen, dtype=bool).reshape(1, -1) if sample.unseen else None
    positions = layout.positions(np.array([sample.categorical], dtype=object), unseen)[0]
    S = layout.join(box.categorical)[None, :]
    return float(_m2_memberships(box.min_point[None, :], box.max_point[None, :], S, sample.lower, sample.upper,
                                 positions, layout.r, params.vector(box.n))[0])


def train_m2(train: Dataset, cfg: M2Config) -> GfmmModel:
    """
    Single-pass training with bit strings.

    Expansion needs the numeric size within θ and at least β matching
    categorical dimensions; the bit strings are then OR-ed with the sample.
    Overlap testing and contraction use the numeric features only.
    """
    if len(train) == 0 or not train.has_labels:
        raise TooFewSamples("M2 training needs labelled samples")
    if cfg.beta > train.r:
        raise ConfigError(f"beta {cfg.beta} exceeds the {train.r} categorical feature(s)")
    domains = [tuple(dict.fromkeys(train.categorical[:, j])) for j in range(train.r)]
    layout = _BitLayout.from_domains(domains)
    positions = layout.positions(train.categorical)
    gamma = MembershipParams(cfg.gamma).vector(train.n)
    store = BoxStore(train.n)
    S = np.zeros((len(train), layout.width), dtype=bool)
    absorbed_by = np.empty(len(train), dtype=int)
    contractions = 0

    for row in range(len(train)):
        lower, upper, label, a = train.lower[row], train.upper[row], int(train.labels[row]), positions[row]
        same = store.of_class(label)
        placed = False
        if len(same):
            b = _m2_memberships(store.V[same], store.W[same], S[same], lower, upper, a, layout.r, gamma)
            order = _ranked(b, same)
            if b[order[0]] == 1.0:
                store.cardinality[same[order[0]]] += 1
                absorbed_by[row] = same[order[0]]
                continue
            new_v = np.minimum(store.V[same], lower)
            new_w = np.maximum(store.W[same], upper)
            fits = ((new_w - new_v) <= cfg.theta).all(axis=1)
            matches = _m2_matches(S[same], a)
            admissible = fits & (matches >= cfg.beta)
            expandable = order[admissible[order]]
            if len(expandable):
                position = expandable[0]
                index = same[position]
                store.V[index] = new_v[position]
                store.W[index] = new_w[position]
                S[index, a[a >= 0]] = True
                store.cardinality[index] += 1
                absorbed_by[row] = index
                if store.n:
                    contractions += _contract_against_others(store, index)
                placed = True
        if not placed:
            index = store.add(lower, upper, label)
            S[index, a[a >= 0]] = True
            absorbed_by[row] = index

    count = store.count
    payloads = [layout.split(S[i]) for i in range(count)]
    logger.info(f"Onln-GFMM-M2 (theta={cfg.theta}, beta={cfg.beta}) built {count} boxes from {len(train)} "
                f"samples with {contractions} contraction(s)")
    return GfmmModel(store.to_box_set(payloads=payloads), cfg, "m2", train.class_set, absorbed_by,
                     store.contracted[:count].copy(), categorical_domains=layout.domains)


# Prediction

class _MixedScorer:
    """Membership evaluation of a trained mixed model, with payloads unpacked once."""

    def __init__(self, model: GfmmModel):
        if model.algorithm not in ("m1", "m2"):
            raise ValueError(f"'{model.algorithm}' is not a mixed-attribute model")
        self.model = model
        self.boxes = model.boxes
        self.gamma = MembershipParams(model.config.gamma).vector(self.boxes.n)
        if model.algorithm == "m1":
            table = model.distance_table
            self.E = np.array([[f.codes([v])[0] for f, v in zip(table.features, box.lower)]
                               for box in self.boxes.payloads], dtype=int).reshape(len(self.boxes), table.r)
            self.F = np.array([[f.codes([v])[0] for f, v in zip(table.features, box.upper)]
                               for box in self.boxes.payloads], dtype=int).reshape(len(self.boxes), table.r)
        else:
            self.layout = _BitLayout.from_domains(model.categorical_domains)
            self.S = np.array([self.layout.join(box) for box in self.boxes.payloads],
                              dtype=bool).reshape(len(self.boxes), self.layout.width)

    def memberships(self, lower, upper, categorical, unseen) -> np.ndarray:
        boxes = self.boxes
        if self.model.algorithm == "m1":
            table = self.model.distance_table
            codes = table.encode(np.array([categorical], dtype=object))[0] if table.r else np.empty(0, dtype=int)
            if table.r and unseen is not None:
                codes = np.where(np.asarray(unseen, dtype=bool), UNSEEN, codes)
            return _m1_memberships(boxes.V, boxes.W, self.E, self.F, lower, upper, codes, table, self.gamma)
        flags = np.asarray(unseen, dtype=bool).reshape(1, -1) if unseen is not None and len(unseen) else None
        positions = self.layout.positions(np.array([categorical], dtype=object), flags)[0]
        return _m2_memberships(boxes.V, boxes.W, self.S, lower, upper, positions, self.layout.r, self.gamma)

    def predict(self, sample: MixedSample, tie_breaker: TieBreaker) -> Prediction:
        b = self.memberships(sample.lower, sample.upper, sample.categorical, sample.unseen)
        return resolve_manhattan(b, self.boxes.centers, self.boxes.classes, self.boxes.creation,
                                 sample.center, tie_breaker)


def predict_mixed(model: GfmmModel, sample: MixedSample, tie_breaker: Optional[TieBreaker] = None) -> Prediction:
    """
    Class of the box with maximum membership; ties across classes are
    settled by Manhattan distance on the numeric centers and, when there are
    no numeric features, by the tie breaker alone.
    """
    return _MixedScorer(model).predict(sample, tie_breaker or model.config.tie_breaker())


def predict_mixed_many(model: GfmmModel, data: Dataset, tie_breaker: Optional[TieBreaker] = None) -> List[Prediction]:
    scorer = _MixedScorer(model)
    tie_breaker = tie_breaker or model.config.tie_breaker()
    return [scorer.predict(data.sample(row), tie_breaker) for row in range(len(data))]
