"""
Hyperbox learners for numeric features: online (Onln-GFMM), improved
online (IOL-GFMM) and agglomerative (AGGLO-SM, AGGLO-2) training
"""

from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple, Union
import heapq
import logging

import numpy as np

from config.settings import GFMM_CONFIG
from core.data_models import Dataset
from core.exceptions import ConfigError, TooFewSamples
from core.hyperbox import (TIE_BREAK_MODES, BoxSet, Hyperbox, MembershipParams, Prediction, TieBreaker,
                           contract_bounds, membership_values, overlap_mask, overlap_test_bounds, ramp,
                           resolve_cardinality, resolve_manhattan)

logger = logging.getLogger(__name__)

NUMERIC_ALGORITHMS = ("onln", "iol", "agglo-sm", "agglo-2")
SIMILARITY_KINDS = ("longest", "shortest", "midpoint")


@dataclass(frozen=True)
class NumericLearnerConfig:
    """Hyper-parameters of the numeric learners."""

    algorithm: str = "onln"
    theta: float = 0.1
    gamma: Union[float, Tuple[float, ...]] = GFMM_CONFIG["gamma"]
    sigma: float = GFMM_CONFIG["sigma"]
    similarity: str = GFMM_CONFIG["similarity"]
    tie_break: str = GFMM_CONFIG["tie_break"]
    seed: int = 0

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ConfigError("; ".join(errors))

    def validate(self) -> List[str]:
        errors = []
        if self.algorithm not in NUMERIC_ALGORITHMS:
            errors.append(f"unknown algorithm '{self.algorithm}', expected one of {NUMERIC_ALGORITHMS}")
        if not 0 < self.theta <= 1:
            errors.append(f"theta must lie in (0, 1], got {self.theta}")
        if not 0 <= self.sigma <= 1:
            errors.append(f"sigma must lie in [0, 1], got {self.sigma}")
        if self.similarity not in SIMILARITY_KINDS:
            errors.append(f"unknown similarity '{self.similarity}', expected one of {SIMILARITY_KINDS}")
        if self.tie_break not in TIE_BREAK_MODES:
            errors.append(f"unknown tie-break mode '{self.tie_break}'")
        if np.any(np.asarray(self.gamma, dtype=float) <= 0):
            errors.append("gamma must be positive")
        return errors

    @property
    def params(self) -> MembershipParams:
        return MembershipParams(self.gamma)

    def tie_breaker(self) -> TieBreaker:
        return TieBreaker(self.tie_break, self.seed)


@dataclass(frozen=True, eq=False)
class GfmmModel:
    """
    A trained hyperbox model.

    Attributes:
        boxes: Final boxes in creation order
        config: Learner configuration
        algorithm: Training algorithm name
        class_set: Class labels indexed by class code
        absorbed_by: Per training row, position in ``boxes`` of the box covering it
        contracted: Per box, whether a contraction ever shrank it
        creation_overlaps: Creation-index pairs (new box, other-class box) that
            overlapped when a sample had to be seeded as a new box (IOL only)
        distance_table: Categorical distance table of M1 models
        categorical_domains: Bit-string domains of M2 models
    """

    boxes: BoxSet
    config: Any
    algorithm: str
    class_set: Tuple[str, ...] = ()
    absorbed_by: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    contracted: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=bool))
    creation_overlaps: Tuple[Tuple[int, int], ...] = ()
    distance_table: Any = None
    categorical_domains: Tuple[Tuple[str, ...], ...] = ()

    @property
    def box_count(self) -> int:
        return len(self.boxes)

    @property
    def n(self) -> int:
        return self.boxes.n

    @property
    def uses_cardinality(self) -> bool:
        return self.algorithm in ("iol", "agglo-sm", "agglo-2")


class BoxStore:
    """Growable column storage used while a model is being trained."""

    def __init__(self, n: int, capacity: int = 64):
        self.n = n
        self.count = 0
        self.V = np.empty((capacity, n))
        self.W = np.empty((capacity, n))
        self.classes = np.empty(capacity, dtype=int)
        self.cardinality = np.zeros(capacity, dtype=int)
        self.contracted = np.zeros(capacity, dtype=bool)
        self.payloads: List[Any] = []

    def _grow(self):
        capacity = 2 * len(self.classes)
        for name in ("V", "W"):
            grown = np.empty((capacity, self.n))
            grown[:self.count] = getattr(self, name)[:self.count]
            setattr(self, name, grown)
        for name, dtype in (("classes", int), ("cardinality", int), ("contracted", bool)):
            grown = np.zeros(capacity, dtype=dtype)
            grown[:self.count] = getattr(self, name)[:self.count]
            setattr(self, name, grown)

    def add(self, lower: np.ndarray, upper: np.ndarray, class_id: int, payload: Any = None) -> int:
        if self.count == len(self.classes):
            self._grow()
        index = self.count
        self.V[index] = lower
        self.W[index] = upper
        self.classes[index] = class_id
        self.cardinality[index] = 1
        self.contracted[index] = False
        self.payloads.append(payload)
        self.count += 1
        return index

    def of_class(self, class_id: int) -> np.ndarray:
        return np.flatnonzero(self.classes[:self.count] == class_id)

    def not_of_class(self, class_id: int) -> np.ndarray:
        return np.flatnonzero(self.classes[:self.count] != class_id)

    def to_box_set(self, keep: Optional[np.ndarray] = None, payloads: Optional[List[Any]] = None) -> BoxSet:
        keep = np.arange(self.count) if keep is None else keep
        source = payloads if payloads is not None else self.payloads
        return BoxSet(
            V=self.V[keep],
            W=self.W[keep],
            classes=self.classes[keep],
            cardinality=self.cardinality[keep],
            creation=keep,
            payloads=tuple(source[i] for i in keep) if any(p is not None for p in source) else ()
        )


def _check_training_data(train: Dataset):
    if len(train) == 0:
        raise TooFewSamples("cannot train on an empty dataset")
    if not train.has_labels:
        raise TooFewSamples("training data needs class labels")


def _ranked(memberships: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Positions sorted by membership descending, then creation order."""
    return np.lexsort((candidates, -memberships))


def _contract_against_others(store: BoxStore, index: int) -> int:
    """Contract box ``index`` against every overlapping box of another class, in creation order."""
    others = store.not_of_class(store.classes[index])
    if len(others) == 0:
        return 0
    suspects = others[overlap_mask(store.V[index], store.W[index], store.V[others], store.W[others])]
    contractions = 0
    for other in suspects:
        result = overlap_test_bounds(store.V[index], store.W[index], store.V[other], store.W[other])
        if result.overlaps:
            contract_bounds(store.V[index], store.W[index], store.V[other], store.W[other],
                            result.dimension, result.case)
            store.contracted[index] = store.contracted[other] = True
            contractions += 1
            logger.debug(f"Contracted boxes {index} and {other} on dimension {result.dimension} "
                         f"(case {result.case})")
    return contractions


def train_onln(train: Dataset, cfg: NumericLearnerConfig) -> GfmmModel:
    """
    Single-pass online training with expansion, overlap test and contraction.

    Args:
        train: Numeric training data in [0, 1] (categorical columns are ignored)
        cfg: Learner configuration

    Returns:
        GfmmModel
    """
    _check_training_data(train)
    gamma = cfg.params.vector(train.n)
    store = BoxStore(train.n)
    absorbed_by = np.empty(len(train), dtype=int)
    contractions = 0

    for row in range(len(train)):
        lower, upper, label = train.lower[row], train.upper[row], int(train.labels[row])
        same = store.of_class(label)
        if len(same):
            b = membership_values(store.V[same], store.W[same], lower, upper, gamma)
            order = _ranked(b, same)
            if b[order[0]] == 1.0:
                store.cardinality[same[order[0]]] += 1
                absorbed_by[row] = same[order[0]]
                continue
            new_v = np.minimum(store.V[same], lower)
            new_w = np.maximum(store.W[same], upper)
            fits = ((new_w - new_v) <= cfg.theta).all(axis=1)
            expandable = order[fits[order]]
            if len(expandable):
                position = expandable[0]
                index = same[position]
                store.V[index] = new_v[position]
                store.W[index] = new_w[position]
                store.cardinality[index] += 1
                absorbed_by[row] = index
                contractions += _contract_against_others(store, index)
                continue
        absorbed_by[row] = store.add(lower, upper, label)

    logger.info(f"Onln-GFMM (theta={cfg.theta}) built {store.count} boxes from {len(train)} samples "
                f"with {contractions} contraction(s)")
    return GfmmModel(store.to_box_set(), cfg, "onln", train.class_set, absorbed_by,
                     store.contracted[:store.count].copy())


def train_iol(train: Dataset, cfg: NumericLearnerConfig) -> GfmmModel:
    """
    Single-pass online training where expansion is allowed only if the
    expanded box overlaps no box of another class; nothing is ever contracted.
    """
    _check_training_data(train)
    gamma = cfg.params.vector(train.n)
    store = BoxStore(train.n)
    absorbed_by = np.empty(len(train), dtype=int)
    creation_overlaps = []

    for row in range(len(train)):
        lower, upper, label = train.lower[row], train.upper[row], int(train.labels[row])
        same = store.of_class(label)
        if len(same):
            b = membership_values(store.V[same], store.W[same], lower, upper, gamma)
            order = _ranked(b, same)
            if b[order[0]] == 1.0:
                store.cardinality[same[order[0]]] += 1
                absorbed_by[row] = same[order[0]]
                continue
            new_v = np.minimum(store.V[same], lower)
            new_w = np.maximum(store.W[same], upper)
            fits = ((new_w - new_v) <= cfg.theta).all(axis=1)
            others = store.not_of_class(label)
            chosen = None
            for position in order[fits[order]]:
                if len(others) == 0 or not overlap_mask(new_v[position], new_w[position],
                                                        store.V[others], store.W[others]).any():
                    chosen = position
                    break
            if chosen is not None:
                index = same[chosen]
                store.V[index] = new_v[chosen]
                store.W[index] = new_w[chosen]
                store.cardinality[index] += 1
                absorbed_by[row] = index
                continue

        index = store.add(lower, upper, label)
        absorbed_by[row] = index
        others = store.not_of_class(label)
        if len(others):
            hits = others[overlap_mask(lower, upper, store.V[others], store.W[others])]
            creation_overlaps.extend((index, int(other)) for other in hits)

    if creation_overlaps:
        logger.debug(f"IOL-GFMM seeded {len(creation_overlaps)} box(es) inside other-class boxes")
    logger.info(f"IOL-GFMM (theta={cfg.theta}) built {store.count} boxes from {len(train)} samples")
    return GfmmModel(store.to_box_set(), cfg, "iol", train.class_set, absorbed_by,
                     np.zeros(store.count, dtype=bool), tuple(creation_overlaps))


def similarity_values(vi: np.ndarray, wi: np.ndarray, V: np.ndarray, W: np.ndarray,
                      kind: str = "longest", gamma: Union[float, np.ndarray] = 1.0) -> np.ndarray:
    """Similarity of box [vi, wi] to every box of [V, W]."""
    V = np.atleast_2d(V)
    W = np.atleast_2d(W)
    if V.shape[1] == 0:
        return np.ones(V.shape[0])
    if kind == "longest":
        distance = np.maximum(W - vi, wi - V)
    elif kind == "shortest":
        distance = np.maximum(np.maximum(V - wi, vi - W), 0.0)
    elif kind == "midpoint":
        distance = np.abs((V + W) / 2.0 - (vi + wi) / 2.0)
    else:
        raise ConfigError(f"unknown similarity '{kind}', expected one of {SIMILARITY_KINDS}")
    return (1.0 - ramp(distance, gamma)).min(axis=1)


def similarity(box_i: Hyperbox, box_k: Hyperbox, kind: str = "longest",
               gamma: Union[float, np.ndarray] = 1.0) -> float:
    """
    Similarity of two boxes in [0, 1].

    'longest' uses the largest distance between the boxes' far ends,
    'shortest' the gap between them and 'midpoint' the distance between
    their centers.
    """
    return float(similarity_values(box_i.min_point, box_i.max_point, box_k.min_point[None, :],
                                   box_k.max_point[None, :], kind, gamma)[0])


class _Agglomeration:
    """Shared state of the agglomerative learners: one initial box per sample."""

    def __init__(self, train: Dataset, cfg: NumericLearnerConfig):
        self.cfg = cfg
        self.gamma = cfg.params.vector(train.n)
        self.V = train.lower.copy()
        self.W = train.upper.copy()
        self.classes = train.labels.copy()
        self.cardinality = np.ones(len(train), dtype=int)
        self.alive = np.ones(len(train), dtype=bool)
        self.owner = np.arange(len(train))
        self.merges = 0

    def alive_of_class(self, class_id: int) -> np.ndarray:
        return np.flatnonzero(self.alive & (self.classes == class_id))

    def alive_not_of_class(self, class_id: int) -> np.ndarray:
        return np.flatnonzero(self.alive & (self.classes != class_id))

    def try_merge(self, i: int, k: int) -> bool:
        """Merge boxes i and k if the result respects θ and overlaps no other class."""
        merged_v = np.minimum(self.V[i], self.V[k])
        merged_w = np.maximum(self.W[i], self.W[k])
        if np.any(merged_w - merged_v > self.cfg.theta):
            return False
        others = self.alive_not_of_class(self.classes[i])
        if len(others) and overlap_mask(merged_v, merged_w, self.V[others], self.W[others]).any():
            return False
        survivor, removed = min(i, k), max(i, k)
        self.V[survivor] = merged_v
        self.W[survivor] = merged_w
        self.cardinality[survivor] += self.cardinality[removed]
        self.alive[removed] = False
        self.owner[removed] = survivor
        self.merges += 1
        return True

    def to_model(self, train: Dataset, algorithm: str) -> GfmmModel:
        keep = np.flatnonzero(self.alive)
        roots = self.owner.copy()
        while True:
            parents = roots[roots]
            if np.array_equal(parents, roots):
                break
            roots = parents
        position = np.full(len(self.alive), -1)
        position[keep] = np.arange(len(keep))
        boxes = BoxSet(self.V[keep], self.W[keep], self.classes[keep], self.cardinality[keep], keep)
        logger.info(f"{algorithm.upper()} (theta={self.cfg.theta}, sigma={self.cfg.sigma}) merged "
                    f"{len(train)} samples into {len(keep)} boxes")
        return GfmmModel(boxes, self.cfg, algorithm, train.class_set, position[roots],
                         np.zeros(len(keep), dtype=bool))


def train_agglo_sm(train: Dataset, cfg: NumericLearnerConfig) -> GfmmModel:
    """
    Agglomerative training driven by the full intra-class similarity matrix.

    The most similar mergeable pair (similarity >= σ) is merged first;
    equal similarities are taken in (creation_i, creation_k) order. The
    similarity structure is a lazy max-heap whose stale entries are skipped.
    """
    _check_training_data(train)
    state = _Agglomeration(train, cfg)
    version = np.zeros(len(train), dtype=int)
    heap: List[Tuple[float, int, int, int, int]] = []

    def push_pairs(anchor: int, partners: np.ndarray):
        partners = partners[partners != anchor]
        if len(partners) == 0:
            return
        scores = similarity_values(state.V[anchor], state.W[anchor], state.V[partners], state.W[partners],
                                   cfg.similarity, state.gamma)
        for partner, score in zip(partners[scores >= cfg.sigma], scores[scores >= cfg.sigma]):
            i, k = (anchor, int(partner)) if anchor < partner else (int(partner), anchor)
            heapq.heappush(heap, (-float(score), i, k, version[i], version[k]))

    for class_id in np.unique(state.classes):
        members = state.alive_of_class(class_id)
        for position, anchor in enumerate(members[:-1]):
            push_pairs(int(anchor), members[position + 1:])

    while heap:
        _, i, k, version_i, version_k = heapq.heappop(heap)
        if not (state.alive[i] and state.alive[k]) or version[i] != version_i or version[k] != version_k:
            continue
        if state.try_merge(i, k):
            version[i] += 1
            version[k] += 1
            push_pairs(i, state.alive_of_class(state.classes[i]))

    return state.to_model(train, "agglo-sm")


def train_agglo2(train: Dataset, cfg: NumericLearnerConfig) -> GfmmModel:
    """
    Agglomerative training anchored on each box in turn.

    Every pass visits the live boxes in order; an anchor is merged with the
    first same-class partner (by similarity descending, then creation order)
    that passes the size and non-overlap conditions. Passes repeat until one
    makes no merge.
    """
    _check_training_data(train)
    state = _Agglomeration(train, cfg)
    passes = 0
    while True:
        passes += 1
        merged_in_pass = 0
        for anchor in np.flatnonzero(state.alive):
            if not state.alive[anchor]:
                continue
            partners = state.alive_of_class(state.classes[anchor])
            partners = partners[partners != anchor]
            if len(partners) == 0:
                continue
            scores = similarity_values(state.V[anchor], state.W[anchor], state.V[partners], state.W[partners],
                                       cfg.similarity, state.gamma)
            eligible = scores >= cfg.sigma
            partners, scores = partners[eligible], scores[eligible]
            for position in np.lexsort((partners, -scores)):
                if state.try_merge(int(anchor), int(partners[position])):
                    merged_in_pass += 1
                    break
        logger.debug(f"AGGLO-2 pass {passes}: {merged_in_pass} merge(s)")
        if merged_in_pass == 0:
            break
    return state.to_model(train, "agglo-2")


_TRAINERS = {
    "onln": train_onln,
    "iol": train_iol,
    "agglo-sm": train_agglo_sm,
    "agglo-2": train_agglo2,
}


def train_numeric(train: Dataset, cfg: NumericLearnerConfig) -> GfmmModel:
    """Train with the algorithm named in ``cfg``."""
    return _TRAINERS[cfg.algorithm](train, cfg)


def predict(model: GfmmModel, lower: np.ndarray, upper: Optional[np.ndarray] = None,
            tie_breaker: Optional[TieBreaker] = None) -> Prediction:
    """
    Classify one input.

    Online models settle ties by Manhattan distance between centers; IOL and
    agglomerative models by the cardinality-weighted class probability. Without
    an explicit tie breaker the model's configured tie-break mode applies.
    """
    tie_breaker = tie_breaker or model.config.tie_breaker()
    boxes = model.boxes
    upper = lower if upper is None else upper
    gamma = MembershipParams(model.config.gamma).vector(boxes.n)
    memberships = membership_values(boxes.V, boxes.W, lower, upper, gamma)
    if model.uses_cardinality:
        return resolve_cardinality(memberships, boxes.classes, boxes.cardinality, boxes.creation, tie_breaker)
    center = (np.asarray(lower, dtype=float) + np.asarray(upper, dtype=float)) / 2.0
    return resolve_manhattan(memberships, boxes.centers, boxes.classes, boxes.creation, center, tie_breaker)


def predict_many(model: GfmmModel, data: Dataset, tie_breaker: Optional[TieBreaker] = None) -> List[Prediction]:
    """Classify every row of ``data``."""
    tie_breaker = tie_breaker or model.config.tie_breaker()
    return [predict(model, data.lower[row], data.upper[row], tie_breaker) for row in range(len(data))]
