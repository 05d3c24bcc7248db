"""
Two-level stacking of a numeric hyperbox model and a categorical decision tree

Scheme A trains level 1 and level 2 on the same training rows. Scheme B
splits the training rows into two halves: level 1 learns from the first,
level 2 from level-1 predictions on the second.
"""

from dataclasses import dataclass
from typing import Optional, Tuple
import logging

import numpy as np

from config.settings import HYBRID_CONFIG
from core.data_models import CATEGORICAL, Dataset, MixedSample
from core.decision_tree import DecisionTree, train_tree
from core.exceptions import ConfigError, NoCategoricalFeatures, NoNumericFeatures
from core.hyperbox import TieBreaker
from core.numeric_learners import GfmmModel, NumericLearnerConfig, predict, train_numeric
from core.preprocessing import holdout_split

logger = logging.getLogger(__name__)

SCHEMES = ("A", "B")


@dataclass(frozen=True, eq=False)
class StackedModel:
    """
    Attributes:
        level1_gfmm: Hyperbox model over the numeric features
        level1_tree: Tree over the categorical features
        level2_tree: Tree over the two level-1 predicted labels
        scheme: 'A' (training data only) or 'B' (training and validation halves)
        class_set: Class labels indexed by class code
    """

    level1_gfmm: GfmmModel
    level1_tree: DecisionTree
    level2_tree: DecisionTree
    scheme: str
    class_set: Tuple[str, ...] = ()

    @property
    def box_count(self) -> int:
        return self.level1_gfmm.box_count


def _check_features(train: Dataset):
    if train.n == 0:
        raise NoNumericFeatures(f"stacking needs numeric features; '{train.name or 'dataset'}' has none")
    if train.r == 0:
        raise NoCategoricalFeatures(f"stacking needs categorical features; '{train.name or 'dataset'}' has none")


def _fit_level1(train: Dataset, gfmm_cfg: NumericLearnerConfig, max_depth: int) -> Tuple[GfmmModel, DecisionTree]:
    gfmm = train_numeric(train.drop_categorical(), gfmm_cfg)
    tree = train_tree(train.categorical, train.labels, max_depth, class_count=train.p,
                      feature_names=train.schema.categorical_names)
    return gfmm, tree


def _level1_table(gfmm: GfmmModel, tree: DecisionTree, data: Dataset,
                  tie_breaker: Optional[TieBreaker] = None) -> np.ndarray:
    """N x 2 table of level-1 predicted class codes (hyperbox model, tree)."""
    tie_breaker = tie_breaker or gfmm.config.tie_breaker()
    numeric = [predict(gfmm, data.lower[row], data.upper[row], tie_breaker).class_id for row in range(len(data))]
    categorical = tree.predict(data.categorical)
    return np.column_stack([np.asarray(numeric, dtype=int), categorical]).astype(object)


def _fit_level2(table: np.ndarray, labels: np.ndarray, class_count: int, max_depth: int) -> DecisionTree:
    return train_tree(table, labels, max_depth, kinds=(CATEGORICAL, CATEGORICAL), class_count=class_count,
                      feature_names=("gfmm", "tree"))


def train_stacked_A(train: Dataset, gfmm_cfg: NumericLearnerConfig,
                    max_depth: int = HYBRID_CONFIG["tree_max_depth"]) -> StackedModel:
    """
    Stack using the training data only.

    The level-1 models are re-applied to the rows they were trained on and
    their predictions form the level-2 training table.
    """
    _check_features(train)
    gfmm, tree = _fit_level1(train, gfmm_cfg, max_depth)
    table = _level1_table(gfmm, tree, train)
    level2 = _fit_level2(table, train.labels, train.p, max_depth)
    agreement = float(np.mean(table[:, 0] == table[:, 1]))
    logger.info(f"Stacked model A: {gfmm.box_count} boxes, tree with {len(tree.leaves())} leaves, "
                f"level-1 agreement {agreement:.3f}")
    return StackedModel(gfmm, tree, level2, "A", train.class_set)


def train_stacked_B(train: Dataset, gfmm_cfg: NumericLearnerConfig, seed: int = HYBRID_CONFIG["seed"],
                    max_depth: int = HYBRID_CONFIG["tree_max_depth"]) -> StackedModel:
    """
    Stack using a training half and a validation half.

    Args:
        train: Training data with numeric and categorical features
        gfmm_cfg: Configuration of the level-1 hyperbox learner
        seed: Seed of the (stratified when possible) 50/50 split
        max_depth: Depth limit of both trees

    Returns:
        StackedModel
    """
    _check_features(train)
    first, second = holdout_split(train.labels, 0.5, seed)
    fit_part, valid_part = train.subset(first), train.subset(second)
    gfmm, tree = _fit_level1(fit_part, gfmm_cfg, max_depth)
    table = _level1_table(gfmm, tree, valid_part)
    level2 = _fit_level2(table, valid_part.labels, train.p, max_depth)
    logger.info(f"Stacked model B: level 1 on {len(fit_part)} rows, level 2 on {len(valid_part)} rows, "
                f"{gfmm.box_count} boxes")
    return StackedModel(gfmm, tree, level2, "B", train.class_set)


def train_stacked(train: Dataset, scheme: str, gfmm_cfg: NumericLearnerConfig, seed: int = HYBRID_CONFIG["seed"],
                  max_depth: int = HYBRID_CONFIG["tree_max_depth"]) -> StackedModel:
    if scheme == "A":
        return train_stacked_A(train, gfmm_cfg, max_depth)
    if scheme == "B":
        return train_stacked_B(train, gfmm_cfg, seed, max_depth)
    raise ConfigError(f"unknown stacking scheme '{scheme}', expected one of {SCHEMES}")


def predict_stacked(model: StackedModel, sample: MixedSample, tie_breaker: Optional[TieBreaker] = None) -> int:
    """Feed the level-1 predictions of one sample to the level-2 tree."""
    tie_breaker = tie_breaker or model.level1_gfmm.config.tie_breaker()
    numeric = predict(model.level1_gfmm, sample.lower, sample.upper, tie_breaker).class_id
    categorical = model.level1_tree.predict_row(sample.categorical)
    return model.level2_tree.predict_row((numeric, categorical))


def predict_stacked_many(model: StackedModel, data: Dataset, tie_breaker: Optional[TieBreaker] = None) -> np.ndarray:
    table = _level1_table(model.level1_gfmm, model.level1_tree, data, tie_breaker)
    return model.level2_tree.predict(table)
