"""
Hyperbox geometry shared by all learners: membership, overlap testing,
contraction and tie-aware prediction
"""

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from config.settings import GFMM_CONFIG
from core.exceptions import DimensionMismatch

logger = logging.getLogger(__name__)

# Unset categorical bound of a BoundPair
A0 = None

TIE_BREAK_MODES = ("deterministic", "seeded-random")


@dataclass(frozen=True)
class BoundPair:
    """Categorical bounds (E, F) of a mixed hyperbox; ``A0`` marks an unset bound."""

    lower: Tuple[Optional[str], ...]
    upper: Tuple[Optional[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(self.lower))
        object.__setattr__(self, "upper", tuple(self.upper))
        if len(self.lower) != len(self.upper):
            raise DimensionMismatch("categorical bound vectors differ in length")


@dataclass(frozen=True, eq=False)
class BitStrings:
    """One occupancy bit vector per categorical dimension."""

    bits: Tuple[np.ndarray, ...]

    def __post_init__(self):
        frozen = []
        for vector in self.bits:
            vector = np.array(vector, dtype=bool, copy=True)
            vector.setflags(write=False)
            frozen.append(vector)
        object.__setattr__(self, "bits", tuple(frozen))

    def __eq__(self, other):
        return (isinstance(other, BitStrings) and len(self.bits) == len(other.bits)
                and all(np.array_equal(a, b) for a, b in zip(self.bits, other.bits)))


CategoricalPayload = Optional[Union[BoundPair, BitStrings]]


@dataclass(frozen=True, eq=False)
class Hyperbox:
    """
    A labelled box [V, W] in the unit cube.

    Attributes:
        min_point: V, length n
        max_point: W, length n
        class_id: Class code of the box
        cardinality: Number of absorbed training samples
        creation_index: Monotone id assigned at creation
        categorical: None, BoundPair (E, F) or BitStrings (S)
    """

    min_point: np.ndarray
    max_point: np.ndarray
    class_id: int
    cardinality: int = 1
    creation_index: int = 0
    categorical: CategoricalPayload = None

    def __post_init__(self):
        v = np.array(self.min_point, dtype=float, copy=True).reshape(-1)
        w = np.array(self.max_point, dtype=float, copy=True).reshape(-1)
        if v.shape != w.shape:
            raise DimensionMismatch("min and max points differ in length")
        if np.any(v > w):
            raise ValueError("hyperbox min point exceeds max point")
        v.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "min_point", v)
        object.__setattr__(self, "max_point", w)

    @property
    def n(self) -> int:
        return len(self.min_point)

    @property
    def center(self) -> np.ndarray:
        return (self.min_point + self.max_point) / 2.0

    @property
    def size(self) -> np.ndarray:
        return self.max_point - self.min_point

    def __eq__(self, other):
        return (isinstance(other, Hyperbox)
                and np.array_equal(self.min_point, other.min_point)
                and np.array_equal(self.max_point, other.max_point)
                and self.class_id == other.class_id
                and self.cardinality == other.cardinality
                and self.creation_index == other.creation_index
                and self.categorical == other.categorical)


@dataclass(frozen=True, eq=False)
class BoxSet:
    """Column-wise storage of a list of hyperboxes."""

    V: np.ndarray
    W: np.ndarray
    classes: np.ndarray
    cardinality: np.ndarray
    creation: np.ndarray
    payloads: Tuple[CategoricalPayload, ...] = ()

    def __post_init__(self):
        count = len(self.classes)
        for name in ("V", "W"):
            array = np.array(getattr(self, name), dtype=float, copy=True)
            if array.ndim != 2 or array.shape[0] != count:
                raise DimensionMismatch(f"{name} must have one row per box")
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        for name in ("classes", "cardinality", "creation"):
            array = np.array(getattr(self, name), dtype=int, copy=True).reshape(count)
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        payloads = tuple(self.payloads) if self.payloads else tuple(None for _ in range(count))
        if len(payloads) != count:
            raise DimensionMismatch("payload count differs from box count")
        object.__setattr__(self, "payloads", payloads)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def n(self) -> int:
        return self.V.shape[1]

    @property
    def centers(self) -> np.ndarray:
        return (self.V + self.W) / 2.0

    def box(self, index: int) -> Hyperbox:
        return Hyperbox(self.V[index], self.W[index], int(self.classes[index]), int(self.cardinality[index]),
                        int(self.creation[index]), self.payloads[index])

    def __iter__(self) -> Iterator[Hyperbox]:
        for index in range(len(self)):
            yield self.box(index)

    @classmethod
    def from_boxes(cls, boxes: Sequence[Hyperbox], n: Optional[int] = None) -> "BoxSet":
        if not boxes:
            width = n or 0
            return cls(np.empty((0, width)), np.empty((0, width)), np.empty(0, dtype=int),
                       np.empty(0, dtype=int), np.empty(0, dtype=int))
        return cls(
            V=np.vstack([box.min_point for box in boxes]),
            W=np.vstack([box.max_point for box in boxes]),
            classes=np.array([box.class_id for box in boxes]),
            cardinality=np.array([box.cardinality for box in boxes]),
            creation=np.array([box.creation_index for box in boxes]),
            payloads=tuple(box.categorical for box in boxes)
        )


@dataclass(frozen=True, eq=False)
class MembershipParams:
    """Sensitivity γ of the ramp function, a scalar or one value per dimension."""

    gamma: Union[float, np.ndarray] = GFMM_CONFIG["gamma"]

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=float, copy=True)
        if np.any(gamma <= 0):
            raise ValueError("gamma must be positive")
        gamma.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)

    def vector(self, n: int) -> np.ndarray:
        if self.gamma.ndim == 0:
            return np.full(n, float(self.gamma))
        if len(self.gamma) != n:
            raise DimensionMismatch(f"gamma has {len(self.gamma)} entries for {n} dimensions")
        return self.gamma


def ramp(value, gamma=1.0):
    """Ramp threshold function f(λ, γ) clipped to [0, 1]."""
    return np.clip(np.asarray(value, dtype=float) * gamma, 0.0, 1.0)


def membership_values(V: np.ndarray, W: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                      gamma: Union[float, np.ndarray] = 1.0) -> np.ndarray:
    """
    Membership of one (interval) input to each box of [V, W].

    Args:
        V: Box min points, shape (m, n)
        W: Box max points, shape (m, n)
        lower: Input lower bound, length n
        upper: Input upper bound, length n
        gamma: Sensitivity, scalar or length n

    Returns:
        Array of m memberships; all ones when n = 0
    """
    V = np.atleast_2d(V)
    W = np.atleast_2d(W)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if V.shape[1] != len(lower) or len(lower) != len(upper):
        raise DimensionMismatch(f"input has {len(lower)} dimensions, boxes have {V.shape[1]}")
    if V.shape[1] == 0:
        return np.ones(V.shape[0])
    above = 1.0 - ramp(upper - W, gamma)
    below = 1.0 - ramp(V - lower, gamma)
    return np.minimum(above, below).min(axis=1)


def membership(box: Hyperbox, lower: np.ndarray, upper: Optional[np.ndarray] = None,
               params: Optional[MembershipParams] = None) -> float:
    """Membership of a point or interval input to a single box."""
    params = params or MembershipParams()
    upper = lower if upper is None else upper
    gamma = params.vector(box.n)
    return float(membership_values(box.min_point[None, :], box.max_point[None, :], lower, upper, gamma)[0])


@dataclass(frozen=True)
class OverlapResult:
    """Outcome of the four-case overlap test; ``dimension`` is None for no overlap."""

    dimension: Optional[int] = None
    case: Optional[int] = None
    delta: float = 0.0

    @property
    def overlaps(self) -> bool:
        return self.dimension is not None


NO_OVERLAP = OverlapResult()


def overlap_cases(vi, wi, vk, wk) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Boolean masks of the four overlap cases, elementwise over dimensions."""
    c1 = (vi <= vk) & (vk < wi) & (wi <= wk)
    c2 = (vk <= vi) & (vi < wk) & (wk <= wi)
    c3 = (vi < vk) & (vk <= wk) & (wk < wi)
    c4 = (vk < vi) & (vi <= wi) & (wi < wk)
    return c1, c2, c3, c4


def overlap_test_bounds(vi: np.ndarray, wi: np.ndarray, vk: np.ndarray, wk: np.ndarray) -> OverlapResult:
    """
    Four-case overlap test between box i and box k given by their bounds.

    Every dimension must satisfy one of the cases for the boxes to overlap;
    the dimension with the smallest overlap δ (first one on ties) is returned
    together with the case that matched there.
    """
    c1, c2, c3, c4 = overlap_cases(vi, wi, vk, wk)
    matched = c1 | c2 | c3 | c4
    if len(vi) == 0 or not matched.all():
        return NO_OVERLAP

    best = OverlapResult()
    best_delta = np.inf
    for j in range(len(vi)):
        if c1[j]:
            case, delta = 1, wi[j] - vk[j]
        elif c2[j]:
            case, delta = 2, wk[j] - vi[j]
        elif c3[j]:
            case, delta = 3, min(wk[j] - vi[j], wi[j] - vk[j])
        else:
            case, delta = 4, min(wi[j] - vk[j], wk[j] - vi[j])
        if delta < best_delta:
            best_delta = delta
            best = OverlapResult(j, case, float(delta))
    return best


def overlap_test(box_i: Hyperbox, box_k: Hyperbox) -> OverlapResult:
    """Four-case overlap test between two boxes of different classes."""
    if box_i.n != box_k.n:
        raise DimensionMismatch("boxes differ in numeric arity")
    return overlap_test_bounds(box_i.min_point, box_i.max_point, box_k.min_point, box_k.max_point)


def overlap_mask(vi: np.ndarray, wi: np.ndarray, V: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Which boxes of [V, W] overlap box [vi, wi] under the four-case test."""
    V = np.atleast_2d(V)
    W = np.atleast_2d(W)
    if V.shape[1] == 0:
        return np.zeros(V.shape[0], dtype=bool)
    c1, c2, c3, c4 = overlap_cases(vi[None, :], wi[None, :], V, W)
    return (c1 | c2 | c3 | c4).all(axis=1)


def contract_bounds(vi: np.ndarray, wi: np.ndarray, vk: np.ndarray, wk: np.ndarray,
                    dimension: int, case: int):
    """Apply the contraction case in place on dimension ``dimension``."""
    d = dimension
    if case == 1:
        wi[d] = vk[d] = (wi[d] + vk[d]) / 2.0
    elif case == 2:
        wk[d] = vi[d] = (wk[d] + vi[d]) / 2.0
    elif case == 3:
        if wk[d] - vi[d] <= wi[d] - vk[d]:
            vi[d] = wk[d]
        else:
            wi[d] = vk[d]
    elif case == 4:
        if wk[d] - vi[d] <= wi[d] - vk[d]:
            wk[d] = vi[d]
        else:
            vk[d] = wi[d]
    else:
        raise ValueError(f"unknown contraction case {case}")


def contract(box_i: Hyperbox, box_k: Hyperbox, result: OverlapResult) -> Tuple[Hyperbox, Hyperbox]:
    """
    Remove the overlap reported by ``overlap_test`` on its dimension.

    Returns:
        (contracted box_i, contracted box_k)
    """
    if not result.overlaps:
        return box_i, box_k
    vi, wi = box_i.min_point.copy(), box_i.max_point.copy()
    vk, wk = box_k.min_point.copy(), box_k.max_point.copy()
    contract_bounds(vi, wi, vk, wk, result.dimension, result.case)
    return (Hyperbox(vi, wi, box_i.class_id, box_i.cardinality, box_i.creation_index, box_i.categorical),
            Hyperbox(vk, wk, box_k.class_id, box_k.cardinality, box_k.creation_index, box_k.categorical))


class TieBreaker:
    """
    Resolves residual ties between boxes.

    Deterministic mode picks the box with the lowest creation index; the
    seeded-random mode draws uniformly from a seeded generator.
    """

    def __init__(self, mode: str = GFMM_CONFIG["tie_break"], seed: int = 0):
        if mode not in TIE_BREAK_MODES:
            raise ValueError(f"tie-break mode must be one of {TIE_BREAK_MODES}, got '{mode}'")
        self.mode = mode
        self.seed = seed
        self.rng = np.random.default_rng(seed) if mode == "seeded-random" else None

    def choose(self, candidates: np.ndarray, creation: np.ndarray) -> int:
        """Pick one of ``candidates`` (box indices)."""
        candidates = np.asarray(candidates)
        if len(candidates) == 1:
            return int(candidates[0])
        if self.rng is not None:
            return int(candidates[self.rng.integers(len(candidates))])
        return int(candidates[np.argmin(creation[candidates])])


@dataclass(frozen=True)
class Prediction:
    """
    Predicted class code with tie diagnostics.

    ``secondary`` is set when the winning boxes span two or more classes and
    a secondary criterion decided the class.
    """

    class_id: int
    membership: float
    winners: Tuple[int, ...] = ()
    secondary: bool = False
    probabilities: Tuple[Tuple[int, float], ...] = field(default=())


def _winners(memberships: np.ndarray) -> Tuple[np.ndarray, float]:
    if len(memberships) == 0:
        raise ValueError("cannot predict with an empty model")
    best = memberships.max()
    return np.flatnonzero(memberships == best), float(best)


def resolve_manhattan(memberships: np.ndarray, centers: np.ndarray, classes: np.ndarray,
                      creation: np.ndarray, input_center: np.ndarray,
                      tie_breaker: Optional[TieBreaker] = None) -> Prediction:
    """Winner by maximum membership, ties by L1 distance between centers."""
    tie_breaker = tie_breaker or TieBreaker()
    winners, best = _winners(memberships)
    winner_classes = classes[winners]
    if len(np.unique(winner_classes)) == 1:
        return Prediction(int(winner_classes[0]), best, tuple(int(i) for i in winners))
    distances = np.abs(centers[winners] - input_center).sum(axis=1)
    nearest = winners[distances == distances.min()]
    chosen = tie_breaker.choose(nearest, creation)
    return Prediction(int(classes[chosen]), best, tuple(int(i) for i in winners), secondary=True)


def resolve_cardinality(memberships: np.ndarray, classes: np.ndarray, cardinality: np.ndarray,
                        creation: np.ndarray, tie_breaker: Optional[TieBreaker] = None) -> Prediction:
    """Winner by maximum membership, ties by cardinality-weighted class probability."""
    tie_breaker = tie_breaker or TieBreaker()
    winners, best = _winners(memberships)
    winner_classes = classes[winners]
    if len(np.unique(winner_classes)) == 1:
        return Prediction(int(winner_classes[0]), best, tuple(int(i) for i in winners),
                          probabilities=((int(winner_classes[0]), 1.0),))

    weights = cardinality[winners] * memberships[winners]
    contenders = np.unique(winner_classes)
    scores = np.array([weights[winner_classes == label].sum() for label in contenders])
    total = scores.sum()
    probabilities = tuple((int(label), float(score / total) if total > 0 else 1.0 / len(contenders))
                          for label, score in zip(contenders, scores))
    top = contenders[scores == scores.max()]
    if len(top) == 1:
        chosen_class = int(top[0])
    else:
        candidates = winners[np.isin(winner_classes, top)]
        chosen_class = int(classes[tie_breaker.choose(candidates, creation)])
    return Prediction(chosen_class, best, tuple(int(i) for i in winners), secondary=True,
                      probabilities=probabilities)


def _as_box_set(boxes: Union[BoxSet, Sequence[Hyperbox]]) -> BoxSet:
    return boxes if isinstance(boxes, BoxSet) else BoxSet.from_boxes(list(boxes))


def predict_manhattan(boxes: Union[BoxSet, Sequence[Hyperbox]], lower: np.ndarray,
                      upper: Optional[np.ndarray] = None, params: Optional[MembershipParams] = None,
                      tie_breaker: Optional[TieBreaker] = None) -> Prediction:
    """
    Class of the box with maximum membership; equal memberships across
    classes are settled by the L1 distance from the input's center to the
    winners' centers, then by the tie breaker.
    """
    boxes = _as_box_set(boxes)
    params = params or MembershipParams()
    upper = lower if upper is None else upper
    memberships = membership_values(boxes.V, boxes.W, lower, upper, params.vector(boxes.n))
    center = (np.asarray(lower, dtype=float) + np.asarray(upper, dtype=float)) / 2.0
    return resolve_manhattan(memberships, boxes.centers, boxes.classes, boxes.creation, center, tie_breaker)


def predict_cardinality(boxes: Union[BoxSet, Sequence[Hyperbox]], lower: np.ndarray,
                        upper: Optional[np.ndarray] = None, params: Optional[MembershipParams] = None,
                        tie_breaker: Optional[TieBreaker] = None) -> Prediction:
    """
    Class of the box with maximum membership; equal memberships across
    classes are settled by the class probability Σ n_j b_j / Σ n_i b_i over
    the winners, then by the tie breaker.
    """
    boxes = _as_box_set(boxes)
    params = params or MembershipParams()
    upper = lower if upper is None else upper
    memberships = membership_values(boxes.V, boxes.W, lower, upper, params.vector(boxes.n))
    return resolve_cardinality(memberships, boxes.classes, boxes.cardinality, boxes.creation, tie_breaker)
