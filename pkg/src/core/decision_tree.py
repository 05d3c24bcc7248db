"""
CART-style classification tree with Gini impurity

Numeric features split on the best midpoint threshold; categorical features
split multiway over the values present at the node.
"""

from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple
import logging

import numpy as np
import pandas as pd

from config.settings import HYBRID_CONFIG
from core.data_models import CATEGORICAL, NUMERIC
from core.exceptions import ConfigError, DimensionMismatch, TooFewSamples

logger = logging.getLogger(__name__)


def gini(counts: np.ndarray) -> float:
    """Gini impurity 1 - sum_c (n_c / N)^2 of a class-count vector (0 for an empty node)."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total == 0:
        return 0.0
    return float(1.0 - ((counts / total) ** 2).sum())


@dataclass(frozen=True, eq=False)
class TreeNode:
    """
    A tree node. Leaves have no children.

    Attributes:
        counts: Training class counts reaching the node
        depth: Distance from the root
        feature: Column tested by an internal node
        threshold: Numeric split point (left child takes values <= threshold)
        branch_values: Categorical value of each child of a multiway split
        children: Child nodes
    """

    counts: np.ndarray
    depth: int = 0
    feature: int = -1
    threshold: float = 0.0
    branch_values: Tuple[Any, ...] = ()
    children: Tuple["TreeNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def samples(self) -> int:
        return int(self.counts.sum())

    @property
    def majority(self) -> int:
        return int(np.argmax(self.counts))

    @property
    def fallback(self) -> int:
        """Child with the largest training mass; unseen categorical values go there."""
        return int(np.argmax([child.samples for child in self.children]))

    def child_for(self, value: Any, kind: str) -> "TreeNode":
        if kind == NUMERIC:
            return self.children[0] if float(value) <= self.threshold else self.children[1]
        try:
            return self.children[self.branch_values.index(value)]
        except ValueError:
            return self.children[self.fallback]


@dataclass(frozen=True, eq=False)
class DecisionTree:
    root: TreeNode
    kinds: Tuple[str, ...]
    max_depth: int
    class_count: int
    feature_names: Tuple[str, ...] = ()

    def predict_row(self, row: Sequence[Any]) -> int:
        if len(row) != len(self.kinds):
            raise DimensionMismatch(f"row has {len(row)} values, the tree expects {len(self.kinds)}")
        node = self.root
        while not node.is_leaf:
            node = node.child_for(row[node.feature], self.kinds[node.feature])
        return node.majority

    def predict(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=object).reshape(-1, len(self.kinds))
        return np.array([self.predict_row(row) for row in rows], dtype=int)

    def nodes(self) -> List[TreeNode]:
        pending = [self.root]
        found = []
        while pending:
            node = pending.pop()
            found.append(node)
            pending.extend(reversed(node.children))
        return found

    def leaves(self) -> List[TreeNode]:
        return [node for node in self.nodes() if node.is_leaf]

    @property
    def depth(self) -> int:
        return max(node.depth for node in self.leaves())


@dataclass(frozen=True)
class _Split:
    impurity: float
    feature: int
    threshold: float = 0.0
    values: Tuple[int, ...] = ()


class _TreeBuilder:
    """Greedy top-down induction on pre-encoded columns."""

    def __init__(self, columns: List[np.ndarray], uniques: List[Optional[np.ndarray]],
                 kinds: Tuple[str, ...], labels: np.ndarray, class_count: int, max_depth: int):
        self.columns = columns
        self.uniques = uniques
        self.kinds = kinds
        self.labels = labels
        self.class_count = class_count
        self.max_depth = max_depth

    def counts(self, rows: np.ndarray) -> np.ndarray:
        return np.bincount(self.labels[rows], minlength=self.class_count).astype(float)

    def numeric_split(self, feature: int, rows: np.ndarray) -> Optional[_Split]:
        values = self.columns[feature][rows]
        order = np.argsort(values, kind="stable")
        ordered = values[order]
        distinct = ordered[1:] > ordered[:-1]
        if not distinct.any():
            return None
        total = len(rows)
        onehot = np.zeros((total, self.class_count))
        onehot[np.arange(total), self.labels[rows][order]] = 1.0
        left = np.cumsum(onehot, axis=0)[:-1]
        right = left[-1] + onehot[-1] - left
        left_size = np.arange(1, total, dtype=float)
        right_size = total - left_size
        left_gini = 1.0 - ((left / left_size[:, None]) ** 2).sum(axis=1)
        right_gini = 1.0 - ((right / right_size[:, None]) ** 2).sum(axis=1)
        weighted = (left_size * left_gini + right_size * right_gini) / total
        weighted = np.where(distinct, weighted, np.inf)
        position = int(np.argmin(weighted))
        threshold = (ordered[position] + ordered[position + 1]) / 2.0
        return _Split(float(weighted[position]), feature, threshold=float(threshold))

    def categorical_split(self, feature: int, rows: np.ndarray) -> Optional[_Split]:
        codes = self.columns[feature][rows]
        present = np.unique(codes)
        if len(present) < 2:
            return None
        table = np.zeros((len(present), self.class_count))
        np.add.at(table, (np.searchsorted(present, codes), self.labels[rows]), 1.0)
        sizes = table.sum(axis=1)
        impurities = 1.0 - ((table / sizes[:, None]) ** 2).sum(axis=1)
        weighted = float((sizes * impurities).sum() / len(rows))
        return _Split(weighted, feature, values=tuple(int(code) for code in present))

    def best_split(self, rows: np.ndarray) -> Optional[_Split]:
        best = None
        for feature, kind in enumerate(self.kinds):
            if kind == NUMERIC:
                split = self.numeric_split(feature, rows)
            else:
                split = self.categorical_split(feature, rows)
            if split is not None and (best is None or split.impurity < best.impurity - 1e-12):
                best = split
        return best

    def build(self, rows: np.ndarray, depth: int) -> TreeNode:
        counts = self.counts(rows)
        if depth >= self.max_depth or len(rows) < 2 or np.count_nonzero(counts) <= 1:
            return TreeNode(counts, depth)
        # Zero-gain splits are taken (XOR needs one at the root); a node without
        # any admissible split is the no-gain leaf
        split = self.best_split(rows)
        if split is None:
            return TreeNode(counts, depth)

        column = self.columns[split.feature][rows]
        if self.kinds[split.feature] == NUMERIC:
            parts = [rows[column <= split.threshold], rows[column > split.threshold]]
            children = tuple(self.build(part, depth + 1) for part in parts)
            return TreeNode(counts, depth, split.feature, split.threshold, children=children)

        children = tuple(self.build(rows[column == code], depth + 1) for code in split.values)
        values = tuple(self.uniques[split.feature][code] for code in split.values)
        return TreeNode(counts, depth, split.feature, branch_values=values, children=children)


def train_tree(rows: np.ndarray, labels: np.ndarray, max_depth: int = HYBRID_CONFIG["tree_max_depth"],
               kinds: Optional[Sequence[str]] = None, class_count: Optional[int] = None,
               feature_names: Sequence[str] = ()) -> DecisionTree:
    """
    Grow a tree by greedy Gini-impurity splits.

    A node becomes a leaf when it is pure, when it reaches ``max_depth`` or
    when no feature takes two different values among its rows. Among the
    admissible splits the lowest weighted child impurity wins, the lower
    feature index on ties.

    Args:
        rows: N x d table of feature values
        labels: Class codes 0..p-1
        max_depth: Maximum depth (0 gives a majority-class stump)
        kinds: 'numeric' or 'categorical' per column (all categorical when omitted)
        class_count: Number of classes p (defaults to max label + 1)
        feature_names: Optional column names

    Returns:
        DecisionTree
    """
    labels = np.asarray(labels, dtype=int)
    if len(labels) == 0:
        raise TooFewSamples("a tree needs at least one training row")
    rows = np.asarray(rows, dtype=object).reshape(len(labels), -1)
    if max_depth < 0:
        raise ConfigError(f"max_depth must be non-negative, got {max_depth}")
    kinds = tuple(kinds) if kinds is not None else tuple(CATEGORICAL for _ in range(rows.shape[1]))
    if len(kinds) != rows.shape[1]:
        raise DimensionMismatch(f"{len(kinds)} column kinds given for {rows.shape[1]} columns")
    class_count = class_count or int(labels.max()) + 1

    columns: List[np.ndarray] = []
    uniques: List[Optional[np.ndarray]] = []
    for j, kind in enumerate(kinds):
        if kind == NUMERIC:
            columns.append(rows[:, j].astype(float))
            uniques.append(None)
        else:
            codes, values = pd.factorize(pd.Series(rows[:, j], dtype=object), sort=False)
            columns.append(codes)
            uniques.append(np.asarray(values, dtype=object))

    builder = _TreeBuilder(columns, uniques, kinds, labels, class_count, max_depth)
    root = builder.build(np.arange(len(labels)), 0)
    tree = DecisionTree(root, kinds, max_depth, class_count, tuple(feature_names))
    logger.debug(f"Grew a tree with {len(tree.leaves())} leaves and depth {tree.depth} from {len(labels)} rows")
    return tree

