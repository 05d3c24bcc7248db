"""
Unit tests for the mixed-attribute learners M1 (categorical bounds) and
M2 (bit strings)
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

from core.data_models import MixedSample
from core.exceptions import ConfigError, DimensionMismatch, TooFewSamples
from core.hyperbox import A0, BitStrings, BoundPair, Hyperbox, membership
from core.mixed_learners import (UNSEEN, UNSET, CategoricalDistanceTable, M1Config, M2Config, _categorical_overlap,
                                 beta_from_fraction, feature_distances, fit_distance_table, membership_m1,
                                 membership_m2, predict_mixed, predict_mixed_many, train_m1, train_m2)
from fixtures import make_dataset, xor_dataset

categorical_tables = st.integers(1, 20).flatmap(lambda rows: st.tuples(
    st.lists(st.lists(st.sampled_from(["p", "q", "r", "s"]), min_size=3, max_size=3), min_size=rows, max_size=rows),
    st.lists(st.sampled_from(["x", "y", "z"]), min_size=rows, max_size=rows)
))


def hand_table():
    """One feature whose values v0, v1, v2 sit at normalized distances 0.4, 1.0 and 0.6."""
    return CategoricalDistanceTable((feature_distances("c0", ("v0", "v1", "v2"),
                                                       [[1.0, 0.0], [0.6, 0.4], [0.0, 1.0]]),))


class TestDistanceTable(unittest.TestCase):
    """Test cases for class-conditional categorical distances."""

    def test_identical_class_profiles_have_zero_distance(self):
        data = make_dataset(categorical=[["p"], ["p"], ["q"], ["q"]], labels=["x", "y", "x", "y"])
        feature = fit_distance_table(data).features[0]
        np.testing.assert_array_equal(feature.distances, np.zeros((2, 2)))
        np.testing.assert_array_equal(feature.normalized, np.zeros((2, 2)))

    def test_opposite_values_are_maximally_distant(self):
        data = make_dataset(categorical=[["a"], ["a"], ["b"]], labels=["pos", "pos", "neg"])
        feature = fit_distance_table(data).features[0]
        self.assertAlmostEqual(float(feature.distances[0, 1]), np.sqrt(2.0))
        self.assertEqual(float(feature.normalized[0, 1]), 1.0)
        np.testing.assert_allclose(feature.conditionals, [[1.0, 0.0], [0.0, 1.0]])

    def test_xor_data_collapses_every_distance(self):
        table = fit_distance_table(xor_dataset(copies=2))
        self.assertEqual(table.r, 2)
        for feature in table.features:
            self.assertFalse(feature.distances.any())

    def test_unset_and_unseen_codes(self):
        feature = hand_table().features[0]
        self.assertAlmostEqual(float(feature.h(0, 1)), 0.4)
        self.assertEqual(float(feature.h(UNSET, 2)), 0.0)
        self.assertEqual(float(feature.h(1, UNSET)), 0.0)
        self.assertEqual(float(feature.h(UNSEEN, 0)), 1.0)
        np.testing.assert_array_equal(feature.codes(["v2", A0, "other"]), [2, UNSET, UNSEEN])

    def test_needs_labels(self):
        with self.assertRaises(TooFewSamples):
            fit_distance_table(make_dataset(categorical=[["a"]]))

    @settings(max_examples=100, deadline=None)
    @given(categorical_tables)
    def test_table_invariants(self, drawn):
        rows, labels = drawn
        for feature in fit_distance_table(make_dataset(categorical=rows, labels=labels)).features:
            np.testing.assert_allclose(feature.distances, feature.distances.T)
            np.testing.assert_array_equal(np.diag(feature.distances), 0.0)
            self.assertTrue(np.all(feature.distances >= 0))
            self.assertTrue(np.all((feature.normalized >= 0) & (feature.normalized <= 1)))


class TestMembershipM1(unittest.TestCase):
    """Test cases for the bound-pair membership function."""

    def setUp(self):
        self.table = hand_table()
        self.box = Hyperbox([0.2], [0.6], 0, categorical=BoundPair(("v1",), (A0,)))

    def test_matching_value_counts_as_inside(self):
        self.assertEqual(membership_m1(self.box, MixedSample([0.4], [0.4], ("v1",)), self.table), 1.0)

    def test_distance_to_bound(self):
        value = membership_m1(self.box, MixedSample([0.4], [0.4], ("v0",)), self.table)
        self.assertAlmostEqual(value, 0.6)

    def test_numeric_term_limits_membership(self):
        value = membership_m1(self.box, MixedSample([0.9], [0.9], ("v1",)), self.table)
        self.assertAlmostEqual(value, 0.7)

    def test_unseen_value_contributes_nothing(self):
        self.assertEqual(membership_m1(self.box, MixedSample([0.4], [0.4], ("v9",)), self.table), 0.0)
        flagged = MixedSample([0.4], [0.4], ("v1",), unseen=(True,))
        self.assertEqual(membership_m1(self.box, flagged, self.table), 0.0)

    def test_no_categorical_features_reduces_to_numeric_membership(self):
        box = Hyperbox([0.2], [0.6], 0, categorical=BoundPair((), ()))
        value = membership_m1(box, MixedSample([0.7], [0.7]), CategoricalDistanceTable(()))
        self.assertEqual(value, membership(Hyperbox([0.2], [0.6], 0), np.array([0.7])))

    def test_requires_bound_pair(self):
        with self.assertRaises(DimensionMismatch):
            membership_m1(Hyperbox([0.2], [0.6], 0), MixedSample([0.4], [0.4], ("v1",)), self.table)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(UNSET, 2), min_size=4, max_size=4))
    def test_categorical_overlap_is_symmetric(self, codes):
        ei, fi, ek, fk = (np.array([code]) for code in codes)
        np.testing.assert_array_equal(_categorical_overlap(ei, fi, ek, fk), _categorical_overlap(ek, fk, ei, fi))


class TestTrainM1(unittest.TestCase):
    """Test cases for Onln-GFMM-M1 training and prediction."""

    def test_first_sample_sets_lower_bounds_only(self):
        data = make_dataset(numeric=[[0.3]], categorical=[["a"]], labels=["x"])
        model = train_m1(data, M1Config(theta=0.3))
        self.assertEqual(model.boxes.payloads[0], BoundPair(("a",), (A0,)))
        self.assertEqual(model.algorithm, "m1")

    def test_zero_eta_admits_identical_profiles(self):
        data = make_dataset(numeric=[[0.1], [0.15]], categorical=[["a"], ["b"]], labels=["x", "x"])
        model = train_m1(data, M1Config(theta=0.3, eta=0.0))
        self.assertEqual(model.box_count, 1)
        self.assertEqual(model.boxes.payloads[0], BoundPair(("a",), ("b",)))
        self.assertEqual(int(model.boxes.cardinality[0]), 2)

    def test_eta_gates_categorical_expansion(self):
        data = make_dataset(numeric=[[0.1], [0.15], [0.9]], categorical=[["a"], ["b"], ["b"]],
                            labels=["x", "x", "y"])
        self.assertEqual(train_m1(data, M1Config(theta=0.3, eta=0.0)).box_count, 3)
        self.assertEqual(train_m1(data, M1Config(theta=0.3, eta=1.0)).box_count, 2)

    def test_pure_categorical_tie_goes_to_older_box(self):
        data = make_dataset(categorical=[["a"], ["b"]], labels=["x", "y"])
        model = train_m1(data, M1Config(eta=0.1))
        self.assertEqual(model.box_count, 2)
        unique = predict_mixed(model, MixedSample([], [], ("a",)))
        self.assertEqual((unique.class_id, unique.secondary), (0, False))
        tied = predict_mixed(model, MixedSample([], [], ("c",)))
        self.assertEqual((tied.class_id, tied.secondary), (0, True))

    def test_config_validation(self):
        with self.assertRaises(ConfigError):
            M1Config(eta=1.5)
        with self.assertRaises(ConfigError):
            M1Config(theta=0.0)
        with self.assertRaises(TooFewSamples):
            train_m1(make_dataset(categorical=[["a"]]), M1Config())

    @settings(max_examples=50, deadline=None)
    @given(categorical_tables, st.sampled_from([0.0, 0.5, 1.0]))
    def test_training_accounts_for_every_sample(self, drawn, eta):
        rows, labels = drawn
        data = make_dataset(numeric=[[0.1 * (i % 10)] for i in range(len(rows))], categorical=rows, labels=labels)
        model = train_m1(data, M1Config(theta=0.5, eta=eta))
        self.assertEqual(int(model.boxes.cardinality.sum()), len(data))
        np.testing.assert_array_equal(model.boxes.classes[model.absorbed_by], data.labels)
        self.assertEqual(len(predict_mixed_many(model, data)), len(data))


class TestM2(unittest.TestCase):
    """Test cases for Onln-GFMM-M2."""

    def setUp(self):
        self.domains = [("p", "q")] * 4
        bits = ([True, False], [True, False], [False, True], [False, True])
        self.box = Hyperbox([0.2], [0.6], 0, categorical=BitStrings(bits))

    def test_membership_averages_numeric_and_categorical_parts(self):
        self.assertEqual(membership_m2(self.box, MixedSample([0.4], [0.4], ("p", "p", "q", "q")), self.domains), 1.0)
        value = membership_m2(self.box, MixedSample([0.4], [0.4], ("p", "p", "p", "p")), self.domains)
        self.assertAlmostEqual(value, 0.75)

    def test_membership_with_one_feature_kind(self):
        categorical_only = Hyperbox([], [], 0, categorical=self.box.categorical)
        value = membership_m2(categorical_only, MixedSample([], [], ("p", "p", "p", "p")), self.domains)
        self.assertAlmostEqual(value, 0.5)
        numeric_only = Hyperbox([0.2], [0.6], 0, categorical=BitStrings(()))
        self.assertAlmostEqual(membership_m2(numeric_only, MixedSample([0.7], [0.7]), []), 0.9)

    def test_unseen_value_never_matches(self):
        value = membership_m2(self.box, MixedSample([0.4], [0.4], ("p", "p", "q", "t")), self.domains)
        self.assertAlmostEqual(value, 0.875)

    def test_beta_equal_to_r_needs_full_match(self):
        data = make_dataset(numeric=[[0.1], [0.2], [0.3]], categorical=[["a", "u"], ["a", "v"], ["a", "u"]],
                            labels=["x", "x", "x"])
        strict = train_m2(data, M2Config(theta=0.5, beta=2))
        self.assertEqual(strict.box_count, 2)
        loose = train_m2(data, M2Config(theta=0.5, beta=0))
        self.assertEqual(loose.box_count, 1)
        np.testing.assert_array_equal(loose.boxes.payloads[0].bits[1], [True, True])

    def test_beta_above_r_rejected(self):
        data = make_dataset(numeric=[[0.1]], categorical=[["a"]], labels=["x"])
        with self.assertRaises(ConfigError):
            train_m2(data, M2Config(beta=2))

    @settings(max_examples=50, deadline=None)
    @given(categorical_tables, st.integers(0, 3))
    def test_bit_strings_only_grow(self, drawn, beta):
        rows, labels = drawn
        data = make_dataset(categorical=rows, labels=labels)
        model = train_m2(data, M2Config(theta=1.0, beta=beta))
        for row, position in enumerate(model.absorbed_by):
            box = model.boxes.box(position)
            self.assertEqual(membership_m2(box, data.sample(row), model.categorical_domains), 1.0)

    def test_beta_from_fraction(self):
        self.assertEqual(beta_from_fraction(0.25, 9), 2)
        self.assertEqual(beta_from_fraction(0.1, 4), 1)
        self.assertEqual(beta_from_fraction(0.0, 4), 0)
        self.assertEqual(beta_from_fraction(0.5, 0), 0)
        self.assertEqual(beta_from_fraction(1.0, 3), 3)
        with self.assertRaises(ConfigError):
            beta_from_fraction(1.5, 3)


if __name__ == '__main__':
    unittest.main()
