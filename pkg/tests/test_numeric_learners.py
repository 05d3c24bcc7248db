"""
Unit tests for the online and agglomerative hyperbox learners
"""

import unittest
from pathlib import Path
import sys

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))
sys.path.insert(0, str(Path(__file__).parent))

from core.evaluation import count_inter_class_overlaps
from core.exceptions import ConfigError, TooFewSamples
from core.hyperbox import Hyperbox
from core.numeric_learners import (NUMERIC_ALGORITHMS, SIMILARITY_KINDS, NumericLearnerConfig, predict,
                                   predict_many, similarity, train_numeric)
from fixtures import make_dataset

GRID = [round(0.05 * step, 2) for step in range(21)]

training_sets = st.integers(2, 25).flatmap(lambda rows: st.tuples(
    st.lists(st.lists(st.sampled_from(GRID), min_size=2, max_size=2), min_size=rows, max_size=rows),
    st.lists(st.sampled_from(["a", "b", "c"]), min_size=rows, max_size=rows)
))


def train(rows, labels, algorithm, theta=0.3, **options):
    data = make_dataset(numeric=rows, labels=labels)
    return data, train_numeric(data, NumericLearnerConfig(algorithm=algorithm, theta=theta, **options))


class TestLearnerConfig(unittest.TestCase):
    """Test cases for NumericLearnerConfig validation."""

    def test_defaults_are_valid(self):
        self.assertEqual(NumericLearnerConfig().validate(), [])

    def test_rejects_bad_values(self):
        for options in ({"algorithm": "fmnn"}, {"theta": 0.0}, {"theta": 1.5}, {"sigma": -0.1},
                        {"similarity": "hausdorff"}, {"tie_break": "coin"}, {"gamma": 0.0}):
            with self.assertRaises(ConfigError, msg=str(options)):
                NumericLearnerConfig(**options)

    def test_empty_or_unlabelled_training_data(self):
        cfg = NumericLearnerConfig()
        with self.assertRaises(TooFewSamples):
            train_numeric(make_dataset(numeric=[[0.1]], labels=["a"]).subset([]), cfg)
        with self.assertRaises(TooFewSamples):
            train_numeric(make_dataset(numeric=[[0.1]]), cfg)


class TestOnlineLearners(unittest.TestCase):
    """Test cases for Onln-GFMM and IOL-GFMM."""

    def test_onln_expands_within_theta(self):
        _, model = train([[0.1], [0.2], [0.9]], ["a", "a", "b"], "onln")
        self.assertEqual(model.box_count, 2)
        box = model.boxes.box(0)
        np.testing.assert_allclose([box.min_point[0], box.max_point[0]], [0.1, 0.2])
        self.assertEqual(box.cardinality, 2)
        np.testing.assert_array_equal(model.absorbed_by, [0, 0, 1])
        self.assertEqual(predict(model, np.array([0.15])).class_id, 0)

    def test_onln_theta_one_keeps_one_box_per_class(self):
        rows = [[0.1, 0.9], [0.8, 0.2], [0.5, 0.5], [0.3, 0.3], [0.7, 0.6], [0.2, 0.8]]
        _, model = train(rows, ["a", "b", "a", "b", "c", "a"], "onln", theta=1.0)
        self.assertEqual(model.box_count, 3)
        self.assertEqual(sorted(model.boxes.classes.tolist()), [0, 1, 2])

    def test_onln_contracts_overlapping_boxes(self):
        _, model = train([[0.1], [0.5], [0.3], [0.4]], ["a", "b", "b", "a"], "onln", theta=0.5)
        self.assertTrue(model.contracted.any())
        self.assertEqual(count_inter_class_overlaps(model), 0)

    def test_iol_seeds_new_box_inside_other_class(self):
        _, model = train([[0.1], [0.5], [0.3]], ["a", "a", "b"], "iol", theta=0.5)
        self.assertEqual(model.box_count, 2)
        self.assertEqual(model.creation_overlaps, ((1, 0),))
        self.assertEqual(count_inter_class_overlaps(model), 1)
        self.assertEqual(count_inter_class_overlaps(model, skip_creation=True), 0)

    def test_iol_refuses_overlapping_expansion(self):
        _, model = train([[0.1], [0.5], [0.3], [0.45]], ["a", "a", "b", "b"], "iol", theta=0.5)
        self.assertEqual(model.box_count, 3)
        self.assertFalse(model.contracted.any())

    def test_cardinality_resolves_iol_ties(self):
        data, model = train([[0.75], [0.25], [0.25], [0.25]], ["b", "a", "a", "a"], "iol", theta=0.2)
        self.assertTrue(model.uses_cardinality)
        prediction = predict(model, np.array([0.5]))
        self.assertTrue(prediction.secondary)
        self.assertEqual(data.class_set[prediction.class_id], "a")

    def test_predict_follows_configured_tie_break(self):
        chosen = set()
        for seed in range(30):
            _, model = train([[0.25], [0.75]], ["a", "b"], "onln", theta=0.2, tie_break="seeded-random", seed=seed)
            prediction = predict(model, np.array([0.5]))
            self.assertTrue(prediction.secondary)
            explicit = predict(model, np.array([0.5]), tie_breaker=model.config.tie_breaker())
            self.assertEqual(prediction.class_id, explicit.class_id)
            single = make_dataset(numeric=[[0.5]], labels=["a"], class_set=["a", "b"])
            self.assertEqual(prediction.class_id, predict_many(model, single)[0].class_id)
            chosen.add(prediction.class_id)
        self.assertEqual(chosen, {0, 1})

    def test_deterministic_tie_break_prefers_older_box(self):
        _, model = train([[0.25], [0.75]], ["a", "b"], "onln", theta=0.2)
        self.assertEqual(predict(model, np.array([0.5])).class_id, 0)


class TestAgglomerativeLearners(unittest.TestCase):
    """Test cases for AGGLO-SM and AGGLO-2."""

    def test_merges_same_class_neighbours(self):
        for algorithm in ("agglo-sm", "agglo-2"):
            _, model = train([[0.1], [0.15], [0.2], [0.8], [0.85]], ["a", "a", "a", "b", "b"], algorithm)
            self.assertEqual(model.box_count, 2, algorithm)
            np.testing.assert_array_equal(model.boxes.cardinality, [3, 2])
            np.testing.assert_array_equal(model.absorbed_by, [0, 0, 0, 1, 1])

    def test_merge_blocked_by_other_class(self):
        for algorithm in ("agglo-sm", "agglo-2"):
            _, model = train([[0.1], [0.2], [0.3]], ["a", "b", "a"], algorithm)
            self.assertEqual(model.box_count, 3, algorithm)

    def test_sigma_limits_merging(self):
        _, model = train([[0.1], [0.3]], ["a", "a"], "agglo-2", theta=1.0, sigma=0.9)
        self.assertEqual(model.box_count, 2)
        _, model = train([[0.1], [0.3]], ["a", "a"], "agglo-2", theta=1.0, sigma=0.5)
        self.assertEqual(model.box_count, 1)


class TestLearnerProperties(unittest.TestCase):
    """Properties every learner keeps on arbitrary training data."""

    @settings(max_examples=60, deadline=None)
    @given(training_sets, st.sampled_from(NUMERIC_ALGORITHMS), st.sampled_from([0.1, 0.3, 1.0]))
    def test_boxes_respect_theta_and_account_for_every_sample(self, drawn, algorithm, theta):
        rows, labels = drawn
        data, model = train(rows, labels, algorithm, theta=theta)
        sizes = model.boxes.W - model.boxes.V
        self.assertTrue(np.all(sizes <= theta))
        self.assertEqual(int(model.boxes.cardinality.sum()), len(data))
        self.assertEqual(len(model.absorbed_by), len(data))
        np.testing.assert_array_equal(model.boxes.classes[model.absorbed_by], data.labels)
        self.assertTrue(np.all(np.diff(model.boxes.creation) > 0))

    @settings(max_examples=60, deadline=None)
    @given(training_sets, st.sampled_from(["iol", "agglo-sm", "agglo-2"]))
    def test_overlap_free_learners_cover_their_samples(self, drawn, algorithm):
        rows, labels = drawn
        data, model = train(rows, labels, algorithm)
        self.assertEqual(count_inter_class_overlaps(model, skip_creation=True), 0)
        for row, position in enumerate(model.absorbed_by):
            box = model.boxes.box(position)
            self.assertTrue(np.all(box.min_point <= data.lower[row]) and np.all(data.upper[row] <= box.max_point))

    @settings(max_examples=40, deadline=None)
    @given(training_sets, st.sampled_from(NUMERIC_ALGORITHMS))
    def test_training_is_deterministic(self, drawn, algorithm):
        rows, labels = drawn
        data, first = train(rows, labels, algorithm)
        _, second = train(rows, labels, algorithm)
        self.assertEqual(list(first.boxes), list(second.boxes))
        self.assertEqual([p.class_id for p in predict_many(first, data)],
                         [p.class_id for p in predict_many(second, data)])


class TestSimilarity(unittest.TestCase):
    """Test cases for the box similarity measures."""

    def test_values(self):
        a, b = Hyperbox([0.1], [0.3], 0), Hyperbox([0.5], [0.6], 0)
        self.assertAlmostEqual(similarity(a, b, "longest"), 0.5)
        self.assertAlmostEqual(similarity(a, b, "shortest"), 0.8)
        self.assertAlmostEqual(similarity(a, b, "midpoint"), 0.65)

    def test_unknown_kind(self):
        with self.assertRaises(ConfigError):
            similarity(Hyperbox([0.1], [0.3], 0), Hyperbox([0.5], [0.6], 0), "hausdorff")

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.sampled_from(GRID), min_size=8, max_size=8), st.sampled_from(SIMILARITY_KINDS))
    def test_symmetric_and_bounded(self, values, kind):
        a = Hyperbox(np.minimum(values[0:2], values[2:4]), np.maximum(values[0:2], values[2:4]), 0)
        b = Hyperbox(np.minimum(values[4:6], values[6:8]), np.maximum(values[4:6], values[6:8]), 1)
        forward, backward = similarity(a, b, kind), similarity(b, a, kind)
        self.assertEqual(forward, backward)
        self.assertTrue(0.0 <= forward <= 1.0)


if __name__ == '__main__':
    unittest.main()
