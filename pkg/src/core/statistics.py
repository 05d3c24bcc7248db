"""
Class-balanced accuracy and the rank-based comparison of several methods
over several datasets (Friedman, Iman-Davenport, Nemenyi)
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.special import betaincinv
from scipy.stats import rankdata
from sklearn.metrics import confusion_matrix as _sklearn_confusion_matrix

from config.settings import STATS_CONFIG
from core.exceptions import DegenerateRanks, DimensionMismatch, EmptyMatrix, StatisticsError, UnsupportedAlpha

logger = logging.getLogger(__name__)

# Critical values q_alpha of the two-tailed Nemenyi test for M = 2..30 methods
# (Studentized range statistic divided by sqrt(2)).
Q_TABLE = {
    0.05: (1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320, 3.030879, 3.101730,
           3.163684, 3.218654, 3.268004, 3.312739, 3.353618, 3.391230, 3.426041, 3.458425,
           3.488685, 3.517073, 3.543799, 3.569040, 3.592946, 3.615646, 3.637253, 3.657861,
           3.677556, 3.696413, 3.714490, 3.731834, 3.748496),
    0.10: (1.644854, 2.052293, 2.291341, 2.459516, 2.588521, 2.692732, 2.779884, 2.854606,
           2.919889, 2.977768, 3.029694, 3.076733, 3.119693, 3.159199, 3.195743, 3.229723,
           3.261461, 3.291224, 3.319233, 3.345676, 3.370711, 3.394477, 3.417089, 3.438653,
           3.459262, 3.478995, 3.497923, 3.516110, 3.533616),
}


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """p x p counts; rows are actual classes, columns predicted classes."""

    counts: np.ndarray
    class_set: Tuple[str, ...] = ()

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=int)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise DimensionMismatch(f"a confusion matrix must be square, got shape {counts.shape}")
        if np.any(counts < 0):
            raise StatisticsError("confusion matrix entries must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        if self.total == 0:
            raise EmptyMatrix("no predictions in the confusion matrix")
        return float(np.trace(self.counts) / self.total)


def confusion_matrix(actual: Sequence[int], predicted: Sequence[int], class_count: int,
                     class_set: Tuple[str, ...] = ()) -> ConfusionMatrix:
    counts = _sklearn_confusion_matrix(np.asarray(actual, dtype=int), np.asarray(predicted, dtype=int),
                                       labels=np.arange(class_count))
    return ConfusionMatrix(counts, class_set)


def cba(cm: ConfusionMatrix) -> float:
    """
    Class-balanced accuracy: (1/p) sum_i cm[i][i] / max(row_i, column_i).

    A class that is neither present nor predicted contributes 0.

    Raises:
        EmptyMatrix: No predictions were recorded
    """
    if cm.total == 0:
        raise EmptyMatrix("cannot compute CBA without predictions")
    counts = cm.counts
    denominators = np.maximum(counts.sum(axis=1), counts.sum(axis=0)).astype(float)
    diagonal = np.diag(counts).astype(float)
    terms = np.divide(diagonal, denominators, out=np.zeros_like(diagonal), where=denominators > 0)
    return float(terms.mean())


@dataclass(frozen=True, eq=False)
class RankTable:
    """N datasets x M methods matrix of ranks, 1 = best."""

    ranks: np.ndarray
    methods: Tuple[str, ...] = ()
    datasets: Tuple[str, ...] = ()

    def __post_init__(self):
        ranks = np.atleast_2d(np.asarray(self.ranks, dtype=float))
        ranks.setflags(write=False)
        object.__setattr__(self, "ranks", ranks)
        if not self.methods:
            object.__setattr__(self, "methods", tuple(f"method-{j + 1}" for j in range(ranks.shape[1])))
        if len(self.methods) != ranks.shape[1]:
            raise DimensionMismatch(f"{len(self.methods)} method names for {ranks.shape[1]} rank columns")

    @property
    def N(self) -> int:
        return self.ranks.shape[0]

    @property
    def M(self) -> int:
        return self.ranks.shape[1]

    @property
    def mean_ranks(self) -> np.ndarray:
        return self.ranks.mean(axis=0)


def rank_methods(table: np.ndarray, methods: Sequence[str] = (), datasets: Sequence[str] = (),
                 higher_better: bool = True) -> RankTable:
    """Rank the methods of every row; ties share the mean of the ranks they span."""
    table = np.atleast_2d(np.asarray(table, dtype=float))
    if np.isnan(table).any():
        raise StatisticsError("the result table has missing cells")
    scores = -table if higher_better else table
    ranks = rankdata(scores, method="average", axis=1)
    return RankTable(ranks, tuple(methods), tuple(datasets))


def f_critical_value(df1: float, df2: float, alpha: float = STATS_CONFIG["alpha"]) -> float:
    """Upper ``alpha`` quantile of the F distribution with (df1, df2) degrees of freedom."""
    if df1 <= 0 or df2 <= 0:
        raise StatisticsError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    if not 0 < alpha < 1:
        raise UnsupportedAlpha(f"alpha must lie in (0, 1), got {alpha}")
    x = float(betaincinv(df1 / 2.0, df2 / 2.0, 1.0 - alpha))
    return df2 * x / (df1 * (1.0 - x))


def _q_value(M: int, alpha: float) -> float:
    for level, values in Q_TABLE.items():
        if math.isclose(alpha, level):
            if M - 2 >= len(values):
                raise UnsupportedAlpha(f"the Nemenyi table covers at most {len(values) + 1} methods, got {M}")
            return values[M - 2]
    raise UnsupportedAlpha(f"Nemenyi critical values are tabulated for alpha in {sorted(Q_TABLE)}, got {alpha}")


def nemenyi_cd(M: int, N: int, alpha: float = STATS_CONFIG["alpha"]) -> float:
    """Critical difference q_alpha * sqrt(M (M + 1) / (6 N)) of mean ranks."""
    if M < 2 or N < 1:
        raise StatisticsError(f"the Nemenyi test needs M >= 2 and N >= 1, got M={M}, N={N}")
    return _q_value(M, alpha) * math.sqrt(M * (M + 1) / (6.0 * N))


@dataclass(frozen=True, eq=False)
class TestResult:
    __test__ = False

    chi2_f: float
    f_f: float
    df1: int
    df2: int
    critical_value: float
    reject: bool
    cd: Optional[float]
    mean_ranks: np.ndarray
    methods: Tuple[str, ...]
    alpha: float
    N: int
    groups: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def M(self) -> int:
        return len(self.methods)


def friedman(ranks: RankTable, alpha: float = STATS_CONFIG["alpha"]) -> TestResult:
    """
    Friedman test with the Iman-Davenport F statistic.

    chi2_F = 12N / (M(M+1)) * (sum_j R_j^2 - M(M+1)^2 / 4)
    F_F = (N-1) chi2_F / (N(M-1) - chi2_F), F-distributed with
    (M-1, (M-1)(N-1)) degrees of freedom. The hypothesis of equal methods is
    rejected when F_F exceeds the critical value.

    Raises:
        StatisticsError: Fewer than two datasets or methods
        DegenerateRanks: chi2_F reaches N(M-1) and F_F is undefined
    """
    return friedman_from_mean_ranks(ranks.mean_ranks, ranks.N, ranks.methods, alpha)


def friedman_from_mean_ranks(mean_ranks: Sequence[float], N: int, methods: Sequence[str] = (),
                             alpha: float = STATS_CONFIG["alpha"]) -> TestResult:
    """Friedman and Iman-Davenport statistics from published mean ranks over N datasets."""
    mean_ranks = np.asarray(mean_ranks, dtype=float)
    M = len(mean_ranks)
    methods = tuple(methods) or tuple(f"method-{j + 1}" for j in range(M))
    if N < 2 or M < 2:
        raise StatisticsError(f"the Friedman test needs at least two datasets and two methods, got N={N}, M={M}")
    chi2 = 12.0 * N / (M * (M + 1)) * (float((mean_ranks ** 2).sum()) - M * (M + 1) ** 2 / 4.0)
    denominator = N * (M - 1) - chi2
    if denominator <= 1e-12:
        raise DegenerateRanks(f"chi2_F = {chi2:.6g} leaves the Iman-Davenport statistic undefined")
    f_f = (N - 1) * chi2 / denominator
    df1, df2 = M - 1, (M - 1) * (N - 1)
    critical = f_critical_value(df1, df2, alpha)
    try:
        cd = nemenyi_cd(M, N, alpha)
    except UnsupportedAlpha as e:
        logger.warning(f"No critical difference available: {e}")
        cd = None
    groups = cd_groups(mean_ranks, cd) if cd is not None else []
    result = TestResult(chi2, f_f, df1, df2, critical, bool(f_f > critical), cd, mean_ranks, methods,
                        alpha, N, groups)
    logger.info(f"Friedman test over {N} datasets and {M} methods: chi2_F={chi2:.4f}, F_F={f_f:.4f}, "
                f"F({df1}, {df2}, {alpha})={critical:.4f}, {'reject' if result.reject else 'retain'} H0")
    return result


def cd_groups(mean_ranks: Sequence[float], cd: float) -> List[Tuple[int, ...]]:
    """
    Maximal runs of methods whose mean ranks differ by less than ``cd``.

    Returns:
        Method index tuples ordered by mean rank; runs of one method are omitted
    """
    mean_ranks = np.asarray(mean_ranks, dtype=float)
    order = np.argsort(mean_ranks, kind="stable")
    ordered = mean_ranks[order]
    groups: List[Tuple[int, ...]] = []
    last_end = -1
    for start in range(len(order)):
        end = start
        while end + 1 < len(order) and ordered[end + 1] - ordered[start] < cd:
            end += 1
        if end > start and end > last_end:
            groups.append(tuple(int(i) for i in order[start:end + 1]))
            last_end = end
    return groups
