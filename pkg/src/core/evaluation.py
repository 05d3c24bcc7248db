"""
Per-fold evaluation of trained models and model diagnostics
"""

from dataclasses import dataclass
from typing import List, Optional, Set, Tuple, Union
import logging

import numpy as np

from core.data_models import Dataset
from core.exceptions import EmptyMatrix
from core.hyperbox import Prediction, TieBreaker, overlap_mask
from core.mixed_learners import predict_mixed_many
from core.numeric_learners import GfmmModel, predict_many
from core.stacking import StackedModel, predict_stacked_many
from core.statistics import ConfusionMatrix, cba, confusion_matrix

logger = logging.getLogger(__name__)

Model = Union[GfmmModel, StackedModel]


@dataclass(frozen=True)
class SecondaryReport:
    """Box count and how often the secondary criterion decided a prediction."""

    boxes: int
    secondary: int
    secondary_correct: int


@dataclass(frozen=True, eq=False)
class FoldEvaluation:
    labels: np.ndarray
    predicted: np.ndarray
    matrix: ConfusionMatrix
    cba: float
    accuracy: float
    boxes: int
    secondary: SecondaryReport
    overlaps: int


def predict_gfmm(model: GfmmModel, data: Dataset, tie_breaker: Optional[TieBreaker] = None) -> List[Prediction]:
    """Predictions of a numeric or mixed hyperbox model."""
    if model.algorithm in ("m1", "m2"):
        return predict_mixed_many(model, data, tie_breaker)
    return predict_many(model, data, tie_breaker)


def secondary_criterion_report(model: GfmmModel, test: Dataset,
                               predictions: Optional[List[Prediction]] = None) -> SecondaryReport:
    """
    Count test samples whose maximum-membership boxes span several classes
    and how many of those the secondary criterion classified correctly.
    """
    predictions = predictions if predictions is not None else predict_gfmm(model, test)
    secondary = [index for index, prediction in enumerate(predictions) if prediction.secondary]
    correct = 0
    if test.has_labels:
        correct = sum(1 for index in secondary if predictions[index].class_id == int(test.labels[index]))
    return SecondaryReport(model.box_count, len(secondary), correct)


def inter_class_overlaps(model: GfmmModel, skip_creation: bool = False) -> List[Tuple[int, int]]:
    """
    Pairs of different-class boxes (as creation indices) that overlap under the four-case test.

    Args:
        model: Trained model
        skip_creation: Leave out pairs recorded when a sample was seeded as a
            new box inside another class's box
    """
    boxes = model.boxes
    if boxes.n == 0:
        return []
    recorded: Set[Tuple[int, int]] = set()
    if skip_creation:
        for i, k in model.creation_overlaps:
            recorded.update({(i, k), (k, i)})
    pairs = []
    for i in range(len(boxes) - 1):
        later = np.arange(i + 1, len(boxes))
        later = later[boxes.classes[later] != boxes.classes[i]]
        if len(later) == 0:
            continue
        hits = later[overlap_mask(boxes.V[i], boxes.W[i], boxes.V[later], boxes.W[later])]
        for k in hits:
            pair = (int(boxes.creation[i]), int(boxes.creation[k]))
            if pair not in recorded:
                pairs.append(pair)
    return pairs


def count_inter_class_overlaps(model: GfmmModel, skip_creation: bool = False) -> int:
    return len(inter_class_overlaps(model, skip_creation))


def evaluate_model(model: Model, test: Dataset, tie_breaker: Optional[TieBreaker] = None) -> FoldEvaluation:
    """
    Classify a labelled test set and collect CBA, accuracy and diagnostics.

    Raises:
        EmptyMatrix: The test set is empty
    """
    if len(test) == 0:
        raise EmptyMatrix("cannot evaluate on an empty test set")
    if isinstance(model, StackedModel):
        predicted = predict_stacked_many(model, test, tie_breaker)
        secondary = SecondaryReport(model.box_count, 0, 0)
        overlaps = count_inter_class_overlaps(model.level1_gfmm, skip_creation=True)
    else:
        predictions = predict_gfmm(model, test, tie_breaker)
        predicted = np.array([prediction.class_id for prediction in predictions], dtype=int)
        secondary = secondary_criterion_report(model, test, predictions)
        overlaps = count_inter_class_overlaps(model, skip_creation=True)
    matrix = confusion_matrix(test.labels, predicted, test.p, test.class_set)
    score = cba(matrix)
    evaluation = FoldEvaluation(np.asarray(test.labels), predicted, matrix, score, matrix.accuracy,
                                model.box_count, secondary, overlaps)
    logger.debug(f"Evaluated {len(test)} samples: CBA {score:.5f}, accuracy {evaluation.accuracy:.5f}, "
                 f"{evaluation.boxes} boxes, {secondary.secondary} secondary decisions")
    return evaluation
