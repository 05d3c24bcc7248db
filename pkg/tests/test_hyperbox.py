"""
Unit tests for hyperbox membership, overlap testing, contraction and prediction
"""

import unittest
from pathlib import Path
import sys

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.exceptions import DimensionMismatch
from core.hyperbox import (BoxSet, Hyperbox, MembershipParams, TieBreaker, contract, membership, overlap_cases,
                           overlap_test, predict_cardinality, predict_manhattan, ramp)

# A coarse grid produces the equal-coordinate edge cases the four-case test is sensitive to
GRID = [round(0.1 * step, 1) for step in range(11)]


@st.composite
def boxes(draw, n):
    lows, highs = [], []
    for _ in range(n):
        a, b = sorted(draw(st.sampled_from(GRID)) for _ in range(2))
        lows.append(a)
        highs.append(b)
    return Hyperbox(lows, highs, draw(st.integers(0, 1)))


@st.composite
def box_pairs(draw):
    n = draw(st.integers(1, 3))
    return draw(boxes(n)), draw(boxes(n))


class TestMembership(unittest.TestCase):
    """Test cases for the ramp and membership functions."""

    def setUp(self):
        self.box = Hyperbox([0.2, 0.2], [0.6, 0.6], class_id=0)

    def test_ramp(self):
        self.assertEqual(float(ramp(0.5, 1)), 0.5)
        self.assertEqual(float(ramp(2, 1)), 1.0)
        self.assertEqual(float(ramp(-0.3, 1)), 0.0)

    def test_contained_point(self):
        self.assertEqual(membership(self.box, np.array([0.4, 0.4])), 1.0)

    def test_boundary_counts_as_inside(self):
        self.assertEqual(membership(self.box, np.array([0.2, 0.2])), 1.0)

    def test_point_outside(self):
        self.assertAlmostEqual(membership(self.box, np.array([0.7, 0.6])), 0.9)

    def test_interval_input(self):
        value = membership(self.box, np.array([0.1, 0.3]), np.array([0.7, 0.4]))
        self.assertAlmostEqual(value, 0.9)

    def test_gamma_steepens_decay(self):
        steep = membership(self.box, np.array([0.7, 0.6]), params=MembershipParams(4.0))
        self.assertAlmostEqual(steep, 0.6)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            membership(self.box, np.array([0.4]))
        with self.assertRaises(DimensionMismatch):
            membership(self.box, np.array([0.4, 0.4]), params=MembershipParams([1.0, 1.0, 1.0]))

    def test_gamma_must_be_positive(self):
        with self.assertRaises(ValueError):
            MembershipParams(0.0)

    def test_min_point_above_max_point(self):
        with self.assertRaises(ValueError):
            Hyperbox([0.5], [0.4], class_id=0)

    @settings(max_examples=200, deadline=None)
    @given(boxes(2), st.lists(st.sampled_from(GRID), min_size=2, max_size=2))
    def test_membership_is_one_exactly_on_containment(self, box, point):
        value = membership(box, np.array(point))
        self.assertTrue(0.0 <= value <= 1.0)
        inside = bool(np.all(box.min_point <= point) and np.all(np.array(point) <= box.max_point))
        self.assertEqual(value == 1.0, inside)

    @settings(max_examples=200, deadline=None)
    @given(boxes(2), st.sampled_from(GRID), st.sampled_from(GRID), st.integers(0, 1),
           st.floats(0.0, 0.5))
    def test_membership_decreases_away_from_box(self, box, x0, x1, axis, step):
        point = np.array([x0, x1])
        farther = point.copy()
        if point[axis] >= box.max_point[axis]:
            farther[axis] += step
        elif point[axis] <= box.min_point[axis]:
            farther[axis] -= step
        else:
            return
        self.assertLessEqual(membership(box, farther), membership(box, point))


class TestOverlap(unittest.TestCase):
    """Test cases for the four-case overlap test and contraction."""

    def test_overlapping_boxes(self):
        result = overlap_test(Hyperbox([0.3, 0.5], [0.4, 0.6], 0), Hyperbox([0.35, 0.55], [0.45, 0.7], 1))
        self.assertTrue(result.overlaps)
        self.assertEqual(result.case, 1)
        self.assertAlmostEqual(result.delta, 0.05)

    def test_degenerate_shared_coordinate_hides_overlap(self):
        box_i = Hyperbox([0.3, 0.5, 0.0], [0.4, 0.6, 0.0], 0)
        box_k = Hyperbox([0.35, 0.55, 0.0], [0.45, 0.7, 0.0], 1)
        self.assertFalse(overlap_test(box_i, box_k).overlaps)

    def test_disjoint_boxes(self):
        result = overlap_test(Hyperbox([0.0, 0.0], [0.2, 0.2], 0), Hyperbox([0.5, 0.5], [0.7, 0.7], 1))
        self.assertFalse(result.overlaps)
        self.assertIsNone(result.dimension)

    def test_minimum_overlap_dimension_is_chosen(self):
        result = overlap_test(Hyperbox([0.0, 0.0], [0.5, 0.5], 0), Hyperbox([0.2, 0.4], [0.8, 0.9], 1))
        self.assertEqual((result.dimension, result.case), (1, 1))

    def test_arity_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            overlap_test(Hyperbox([0.1], [0.2], 0), Hyperbox([0.1, 0.1], [0.2, 0.2], 1))

    def test_case_one_contraction_meets_in_the_middle(self):
        box_i, box_k = Hyperbox([0.3], [0.6], 0), Hyperbox([0.35], [0.7], 1)
        result = overlap_test(box_i, box_k)
        self.assertEqual(result.case, 1)
        new_i, new_k = contract(box_i, box_k, result)
        self.assertAlmostEqual(float(new_i.max_point[0]), 0.475)
        self.assertAlmostEqual(float(new_k.min_point[0]), 0.475)

    def test_case_three_contraction(self):
        box_i, box_k = Hyperbox([0.1], [0.9], 0), Hyperbox([0.2], [0.4], 1)
        result = overlap_test(box_i, box_k)
        self.assertEqual(result.case, 3)
        new_i, new_k = contract(box_i, box_k, result)
        self.assertEqual(float(new_i.min_point[0]), 0.4)
        self.assertEqual(new_k, box_k)

    def test_contract_without_overlap_is_identity(self):
        box_i, box_k = Hyperbox([0.0], [0.1], 0), Hyperbox([0.5], [0.6], 1)
        self.assertEqual(contract(box_i, box_k, overlap_test(box_i, box_k)), (box_i, box_k))

    @settings(max_examples=300, deadline=None)
    @given(box_pairs())
    def test_overlap_outcome_is_symmetric(self, pair):
        box_i, box_k = pair
        self.assertEqual(overlap_test(box_i, box_k).overlaps, overlap_test(box_k, box_i).overlaps)

    @settings(max_examples=300, deadline=None)
    @given(box_pairs())
    def test_contraction_postconditions(self, pair):
        box_i, box_k = pair
        result = overlap_test(box_i, box_k)
        assume(result.overlaps)
        new_i, new_k = contract(box_i, box_k, result)
        d = result.dimension
        cases = overlap_cases(new_i.min_point[d], new_i.max_point[d], new_k.min_point[d], new_k.max_point[d])
        self.assertFalse(any(bool(case) for case in cases))
        for old, new in ((box_i, new_i), (box_k, new_k)):
            others = [j for j in range(old.n) if j != d]
            np.testing.assert_array_equal(new.min_point[others], old.min_point[others])
            np.testing.assert_array_equal(new.max_point[others], old.max_point[others])
            self.assertTrue(np.all(new.min_point >= old.min_point) and np.all(new.max_point <= old.max_point))


class TestPrediction(unittest.TestCase):
    """Test cases for winner selection and the secondary criteria."""

    def test_single_winner(self):
        boxes = [Hyperbox([0.0], [0.2], 0), Hyperbox([0.5], [0.9], 1)]
        for predict in (predict_manhattan, predict_cardinality):
            prediction = predict(boxes, np.array([0.6]))
            self.assertEqual(prediction.class_id, 1)
            self.assertEqual(prediction.membership, 1.0)
            self.assertFalse(prediction.secondary)
        self.assertEqual(predict_cardinality(boxes, np.array([0.6])).probabilities, ((1, 1.0),))

    def test_manhattan_picks_nearest_center(self):
        boxes = [Hyperbox([0.0], [0.6], 0, creation_index=0), Hyperbox([0.3], [0.9], 1, creation_index=1)]
        prediction = predict_manhattan(boxes, np.array([0.4]))
        self.assertEqual(prediction.class_id, 0)
        self.assertTrue(prediction.secondary)
        self.assertEqual(prediction.winners, (0, 1))

    def test_manhattan_equal_distance_prefers_older_box(self):
        boxes = [Hyperbox([0.2], [0.4], 1, creation_index=0), Hyperbox([0.2], [0.4], 0, creation_index=1)]
        self.assertEqual(predict_manhattan(boxes, np.array([0.3])).class_id, 1)

    def test_cardinality_weighted_probability(self):
        boxes = [Hyperbox([0.2], [0.4], 1, cardinality=2, creation_index=0),
                 Hyperbox([0.2], [0.4], 0, cardinality=5, creation_index=1)]
        prediction = predict_cardinality(boxes, np.array([0.3]))
        self.assertEqual(prediction.class_id, 0)
        self.assertTrue(prediction.secondary)
        probabilities = dict(prediction.probabilities)
        self.assertAlmostEqual(probabilities[0], 5 / 7)
        self.assertAlmostEqual(probabilities[1], 2 / 7)

    def test_cardinality_tie_prefers_older_box(self):
        boxes = [Hyperbox([0.2], [0.4], 1, creation_index=0), Hyperbox([0.2], [0.4], 0, creation_index=1)]
        prediction = predict_cardinality(boxes, np.array([0.3]))
        self.assertEqual(prediction.class_id, 1)
        self.assertTrue(prediction.secondary)

    def test_empty_model(self):
        with self.assertRaises(ValueError):
            predict_manhattan(BoxSet.from_boxes([], n=1), np.array([0.3]))

    def test_seeded_random_tie_breaker(self):
        candidates = np.arange(5)
        creation = np.arange(5)
        first = [TieBreaker("seeded-random", 3).choose(candidates, creation) for _ in range(3)]
        self.assertEqual(len(set(first)), 1)
        chooser = TieBreaker("seeded-random", 3)
        draws = {chooser.choose(candidates, creation) for _ in range(50)}
        self.assertTrue(draws <= set(candidates.tolist()))
        self.assertGreater(len(draws), 1)
        self.assertEqual(TieBreaker().choose(np.array([3, 1]), np.array([9, 9, 9, 0])), 3)
        with self.assertRaises(ValueError):
            TieBreaker("coin-flip")

    def test_box_set_round_trip(self):
        original = [Hyperbox([0.1, 0.2], [0.3, 0.4], 1, cardinality=3, creation_index=7)]
        box_set = BoxSet.from_boxes(original)
        self.assertEqual(len(box_set), 1)
        self.assertEqual(list(box_set), original)
        np.testing.assert_allclose(box_set.centers, [[0.2, 0.3]])


if __name__ == '__main__':
    unittest.main()
