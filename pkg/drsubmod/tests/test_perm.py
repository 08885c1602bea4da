import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).parent.parent / 'src'))

from drsubmod.bruteforce import brute_force_valid_permutations, random_hull_point, random_instance
from drsubmod.config.repository import load_document
from drsubmod.exceptions import InvalidPartial, InvalidPrefix, NotAPermutation, NotAPsiRoot, NotInHull
from drsubmod.perm import (
    Permutation,
    PrefixTracker,
    as_permutation,
    d_matrix,
    decompose,
    enumerate_valid_permutations,
    eta,
    is_valid_permutation,
    permutation_finder,
    prefix_points,
    t_matrix,
    t_value,
    t_vector,
    valid_candidates,
)

INSTANCES = Path(__file__).parent.parent / 'instances'

DELTA = (6, 4, 7, 5, 2, 3, 9, 1, 11, 8, 10, 12)

PREFIX_POINTS = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 9, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 8, 0, 9, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 8, 0, 9, 12, 0, 0, 0, 0, 12],
    [0, 0, 0, 8, 11.75, 9, 12, 0, 0, 0, 0, 12],
    [0, 1, 1, 8, 11.75, 9, 12, 0, 0, 0, 0, 12],
    [0, 1, 8, 8, 11.75, 9, 12, 0, 0, 0, 0, 12],
    [0, 1, 8, 8, 11.75, 9, 12, 0, 10, 10, 10, 12],
    [0.1, 1, 8, 8, 11.75, 9, 12, 0, 10, 10, 10, 12],
    [0.1, 1, 8, 8, 11.75, 9, 12, 0, 10, 10, 11, 12],
    [0.1, 1, 8, 8, 11.75, 9, 12, 10, 10, 10, 11, 12],
    [0.1, 1, 8, 8, 11.75, 9, 12, 10, 10.5, 11, 11, 12],
    [0.1, 1, 8, 8, 11.75, 9, 12, 10, 10.5, 11, 11, 19.9],
]


def closed_form_t(z):
    z1, z2, z3, z4, z5, z6, z7, z8, z9, z10, z11, z12 = z
    return [
        z6 / 9, z4 / 8, z7 / 12, z5 / 11.75, z2, (z3 - z2) / 7,
        (z9 - 0.5 * z10) / 5, 10 * z1, z11 - 2 * z9 + z10, z8 / 10,
        2 * z10 - 2 * z9, (z12 - z7) / 7.9,
    ]


def random_valid_permutation(rng, inst):
    tracker = PrefixTracker(inst)
    while len(tracker.order) < inst.n:
        candidates = tracker.candidates()
        tracker.place(candidates[int(rng.integers(len(candidates)))])
    return Permutation(tracker.order)


class TestValidity(unittest.TestCase):
    def setUp(self):
        self.fig5 = load_document(INSTANCES / 'fig5.json').build()

    def test_identity_order_breaks_all_conditions(self):
        check = is_valid_permutation(self.fig5, range(1, 13))
        self.assertFalse(check.valid)
        self.assertEqual(check.violated_conditions, [1, 2, 3])
        self.assertEqual(check.witnesses[1], [3, 4])
        self.assertEqual(check.witnesses[2], [1, 2])
        self.assertEqual(check.witnesses[3], [8, 9, 10])

    def test_reference_order_is_valid(self):
        self.assertTrue(is_valid_permutation(self.fig5, DELTA).valid)

    def test_first_candidates(self):
        self.assertEqual(valid_candidates(self.fig5, []), frozenset({2, 4, 5, 6, 7, 8, 9, 11, 12}))

    def test_candidates_follow_placements(self):
        # After 8 (u = floor(u_9)) is placed, 9 may only come after 10
        self.assertNotIn(9, valid_candidates(self.fig5, [8]))
        self.assertIn(9, valid_candidates(self.fig5, [11, 10, 8]))
        # 3 waits for its equal-bound descendant 4
        self.assertIn(3, valid_candidates(self.fig5, [4]))

    def test_invalid_partial(self):
        with self.assertRaises(InvalidPartial):
            valid_candidates(self.fig5, [3])
        with self.assertRaises(InvalidPartial):
            valid_candidates(self.fig5, [4, 4])

    def test_not_a_permutation(self):
        with self.assertRaises(NotAPermutation):
            as_permutation(self.fig5, [1, 2, 3])

    def test_backtracking_matches_brute_force(self):
        fig3e = load_document(INSTANCES / 'fig3e.json').build()
        fast = set(enumerate_valid_permutations(fig3e))
        slow = set(brute_force_valid_permutations(fig3e))
        self.assertEqual(fast, slow)
        self.assertTrue(fast)

    def test_random_instances_match_brute_force(self):
        rng = np.random.default_rng(3)
        for trial in range(20):
            inst = random_instance(rng, int(rng.integers(2, 7)))
            fast = set(enumerate_valid_permutations(inst))
            slow = set(brute_force_valid_permutations(inst))
            self.assertEqual(fast, slow, f"trial {trial}")


class TestTransform(unittest.TestCase):
    def setUp(self):
        self.fig5 = load_document(INSTANCES / 'fig5.json').build()

    def test_prefix_points_table(self):
        np.testing.assert_allclose(prefix_points(self.fig5, DELTA), PREFIX_POINTS)

    def test_t_vector_closed_forms(self):
        rng = np.random.default_rng(0)
        T = t_matrix(self.fig5, DELTA)
        for _ in range(20):
            z = rng.uniform(0, 10, size=12)
            np.testing.assert_allclose(t_vector(self.fig5, DELTA, z), closed_form_t(z), rtol=0, atol=1e-10)
            np.testing.assert_allclose(T @ z, closed_form_t(z), rtol=0, atol=1e-10)

    def test_single_t_value(self):
        z = np.arange(1, 13, dtype=float)
        self.assertAlmostEqual(t_value(self.fig5, DELTA, 9, z), z[10] - 2 * z[8] + z[9])

    def test_single_t_value_rejects_invalid_prefix(self):
        z = np.arange(1, 13, dtype=float)
        with self.assertRaises(InvalidPrefix):
            t_value(self.fig5, [3], 1, z)
        with self.assertRaises(InvalidPrefix):
            t_value(self.fig5, [4, 4], 2, z)
        with self.assertRaises(InvalidPrefix):
            t_value(self.fig5, DELTA, 13, z)

    def test_prefix_points_strictly_increase(self):
        rng = np.random.default_rng(3)
        cases = [(self.fig5, DELTA)]
        for _ in range(30):
            inst = random_instance(rng, int(rng.integers(1, 10)))
            cases.append((inst, random_valid_permutation(rng, inst)))
        for inst, delta in cases:
            points = prefix_points(inst, delta)
            steps = np.diff(points, axis=0)
            self.assertTrue(np.all(steps >= 0), f"{delta}")
            self.assertTrue(np.all(steps.max(axis=1) > 0), f"{delta}")

    def test_t_is_a_left_inverse_of_d(self):
        T = t_matrix(self.fig5, DELTA)
        D = d_matrix(self.fig5, DELTA)
        np.testing.assert_allclose(T @ D, np.eye(12), atol=1e-12)

    def test_t_d_inverse_on_random_instances(self):
        rng = np.random.default_rng(1)
        for trial in range(40):
            inst = random_instance(rng, int(rng.integers(1, 10)))
            delta = random_valid_permutation(rng, inst)
            T = t_matrix(inst, delta)
            D = d_matrix(inst, delta)
            np.testing.assert_allclose(T @ D, np.eye(inst.n), atol=1e-10, err_msg=f"trial {trial}")

    def test_strict_rejects_invalid_order(self):
        with self.assertRaises(InvalidPrefix):
            t_vector(self.fig5, range(1, 13), np.zeros(12))

    def test_eta(self):
        z = np.zeros(12)
        z[8], z[9] = 3.0, 4.0
        self.assertAlmostEqual(eta(self.fig5, 9, z), 2 * 3.0 - 4.0)
        with self.assertRaises(NotAPsiRoot):
            eta(self.fig5, 8, z)


class TestDecomposition(unittest.TestCase):
    def setUp(self):
        document = load_document(INSTANCES / 'fig5.json')
        self.fig5 = document.build()
        self.point = np.asarray(document.point)

    def test_reference_point(self):
        expected = 0.3 * np.asarray(PREFIX_POINTS[2]) + 0.7 * np.asarray(PREFIX_POINTS[5])
        np.testing.assert_allclose(self.point, expected)
        decomposition = decompose(self.fig5, self.point)
        np.testing.assert_allclose(decomposition.reconstruct(), self.point, atol=1e-9)
        self.assertAlmostEqual(decomposition.weights.sum(), 1.0)
        self.assertTrue(np.all(np.diff(decomposition.t) <= 1e-12))
        self.assertTrue(is_valid_permutation(self.fig5, decomposition.permutation).valid)

    def test_random_hull_points(self):
        rng = np.random.default_rng(2)
        for trial in range(80):
            inst = random_instance(rng, int(rng.integers(1, 10)))
            z = random_hull_point(rng, inst)
            decomposition = decompose(inst, z)
            np.testing.assert_allclose(decomposition.reconstruct(), z, atol=1e-9, err_msg=f"trial {trial}")
            self.assertTrue(np.all(decomposition.weights >= 0))
            self.assertTrue(is_valid_permutation(inst, decomposition.permutation).valid)

    def test_extreme_point_has_single_support(self):
        z = np.asarray(PREFIX_POINTS[7])
        decomposition = decompose(self.fig5, z)
        self.assertEqual(len(decomposition.support(1e-12)), 1)

    def test_point_outside_hull(self):
        z = np.zeros(12)
        z[8], z[9], z[10] = 10.25, 10.25, 11
        with self.assertRaises(NotInHull):
            permutation_finder(self.fig5, z)

    def test_ties_broken_by_smallest_id(self):
        binary = load_document(INSTANCES / 'binary_coverage.yaml').build()
        perm = permutation_finder(binary, np.array([0.5, 0.9, 0.5, 0.1, 0.9]))
        self.assertEqual(list(perm.order), [2, 5, 1, 3, 4])


if __name__ == '__main__':
    unittest.main()
