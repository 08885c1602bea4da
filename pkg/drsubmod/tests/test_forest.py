import itertools
import sys
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np

sys.path.append(str(Path(__file__).parent.parent / 'src'))

from drsubmod.config.repository import load_document
from drsubmod.exceptions import (
    Assumption1Violated,
    InfeasibleInput,
    InstanceFormatError,
    NonMonotoneBounds,
    NonPositiveBound,
    NotAForest,
    OracleEvaluationFailure,
)
from drsubmod.forest import (
    InstanceClass,
    LiftedOracle,
    QuadraticSpec,
    TableObjective,
    ValueOracle,
    build_instance,
    ceil_bound,
    check_assumption1,
    check_assumption2,
    check_dr_submodularity,
    check_point_feasible,
    classify_instance,
    finitize_bounds,
    floor_bound,
    lift_solution,
    map_solution_back,
    normalize_property1,
    reach_sets,
    relax_fractional_bounds,
)

INSTANCES = Path(__file__).parent.parent / 'instances'


def split_children_instance():
    # Root 1 (u=0.2) has two integer children, so Property 1 fails
    return build_instance(
        6, [(1, 2), (1, 3), (3, 4), (4, 5), (4, 6)], [0.2, 2, 8, 8, 11.75, 9], [2, 3, 4]
    )


class TestRounding(unittest.TestCase):
    def test_integral_values(self):
        self.assertEqual(floor_bound(3.0), 2.0)
        self.assertEqual(ceil_bound(3.0), 3.0)
        self.assertEqual(ceil_bound(0.0), 0.0)

    def test_fractional_values(self):
        self.assertEqual(floor_bound(3.5), 3.0)
        self.assertEqual(ceil_bound(3.5), 4.0)
        self.assertEqual(floor_bound(0.1), 0.0)
        self.assertEqual(ceil_bound(0.1), 1.0)


class TestBuildInstance(unittest.TestCase):
    def test_integer_bounds_rounded_down(self):
        inst = build_instance(2, [(1, 2)], [3.7, 5.2], [1, 2])
        self.assertEqual(inst.bound(1), 3.0)
        self.assertEqual(inst.bound(2), 5.0)

    def test_rejects_two_parents(self):
        with self.assertRaises(NotAForest) as ctx:
            build_instance(3, [(1, 3), (2, 3)], [1, 1, 1], [])
        self.assertEqual(ctx.exception.witness[0], 3)

    def test_rejects_cycle(self):
        with self.assertRaises(NotAForest):
            build_instance(3, [(1, 2), (2, 3), (3, 1)], [1, 1, 1], [])

    def test_rejects_self_loop_and_range(self):
        with self.assertRaises(NotAForest):
            build_instance(2, [(1, 1)], [1, 1], [])
        with self.assertRaises(NotAForest):
            build_instance(2, [(1, 3)], [1, 1], [])

    def test_rejects_non_positive_bound(self):
        with self.assertRaises(NonPositiveBound):
            build_instance(2, [], [1, 0], [])
        # Integer vertex with u < 1 rounds to 0
        with self.assertRaises(NonPositiveBound):
            build_instance(1, [], [0.5], [1])

    def test_rejects_decreasing_bounds(self):
        with self.assertRaises(NonMonotoneBounds) as ctx:
            build_instance(2, [(1, 2)], [5, 3], [])
        self.assertEqual(ctx.exception.witness, [1, 2])

    def test_rejects_bad_lengths(self):
        with self.assertRaises(InstanceFormatError):
            build_instance(3, [], [1, 1], [])
        with self.assertRaises(InstanceFormatError):
            build_instance(2, [], [1, 1], [3])

    def test_reach_sets(self):
        inst = load_document(INSTANCES / 'fig5.json').build()
        sets = reach_sets(inst)
        self.assertEqual(sets['descendants'][8], frozenset({8, 9, 10, 11}))
        self.assertEqual(sets['ascendants'][11], frozenset({8, 9, 10, 11}))
        self.assertEqual(sets['depth'][4], 3)
        self.assertEqual(sets['parent'][12], 7)
        self.assertEqual(inst.roots, (1, 5, 6, 7, 8))


class TestAssumptions(unittest.TestCase):
    def setUp(self):
        self.fig5 = load_document(INSTANCES / 'fig5.json').build()
        self.fig6 = load_document(INSTANCES / 'fig6.json').build()

    def test_fig5_psi_and_assumptions(self):
        self.assertEqual(self.fig5.psi, frozenset({1, 9}))
        self.assertTrue(check_assumption1(self.fig5).holds)
        self.assertTrue(check_assumption2(self.fig5).holds)
        self.assertTrue(self.fig5.satisfies_property1())
        self.assertTrue(self.fig5.hull_ready.holds)

    def test_two_psi_on_a_path(self):
        inst = build_instance(3, [(1, 2), (2, 3)], [0.5, 1.5, 2], [3])
        check = check_assumption1(inst)
        self.assertFalse(check.holds)
        self.assertEqual(check.witness, [1, 2])

    def test_continuous_child_of_psi(self):
        inst = build_instance(3, [(1, 2), (1, 3)], [1.5, 2, 2.5], [2])
        check = check_assumption1(inst)
        self.assertFalse(check.holds)
        self.assertEqual(check.witness, [1, 3])

    def test_assumption2_failure_on_fig6(self):
        self.assertTrue(check_assumption1(self.fig6).holds)
        check = check_assumption2(self.fig6)
        self.assertFalse(check.holds)
        self.assertEqual(check.witness, [4, 8])

    def test_classify(self):
        self.assertEqual(classify_instance(self.fig5), InstanceClass.GENERAL)
        box = build_instance(2, [], [10, 10], [2])
        self.assertEqual(classify_instance(box), InstanceClass.BOX_ONLY)
        chain = build_instance(2, [(1, 2)], [2, 3], [1, 2])
        self.assertEqual(classify_instance(chain), InstanceClass.ALL_INTEGER)
        continuous = build_instance(2, [(1, 2)], [2.5, 3], [])
        self.assertEqual(classify_instance(continuous), InstanceClass.ALL_CONTINUOUS)
        mixed = build_instance(2, [(1, 2)], [2, 3], [2])
        self.assertEqual(classify_instance(mixed), InstanceClass.INTEGER_BOUNDS)

    def test_point_feasibility(self):
        check_point_feasible(self.fig5, np.asarray(self.fig5.upper_bounds))
        z = np.zeros(12)
        z[1] = 0.5  # z_2 is integer
        with self.assertRaises(InfeasibleInput):
            check_point_feasible(self.fig5, z)
        z = np.zeros(12)
        z[0] = 0.1  # z_1 > z_2
        self.assertTrue(self.fig5.feasibility_violations(z))


class TestBoundNormalizations(unittest.TestCase):
    def test_infinite_child_takes_parent_ceiling(self):
        inst = build_instance(2, [(1, 2)], [3, None], [])
        finite = finitize_bounds(inst)
        self.assertEqual(list(finite.upper_bounds), [3.0, 3.0])
        self.assertEqual(finite.flags, [])

    def test_infinite_root_gets_default_with_warning(self):
        inst = build_instance(2, [(1, 2)], [None, None], [])
        with self.assertLogs('drsubmod.forest.instance', level='WARNING'):
            finite = finitize_bounds(inst)
        self.assertEqual(list(finite.upper_bounds), [1.0, 1.0])
        self.assertIn('root-bound-default:1', finite.flags)

    def test_finite_instance_unchanged(self):
        inst = build_instance(1, [], [2.5], [])
        self.assertIs(finitize_bounds(inst), inst)

    def test_relax_fractional_bounds(self):
        fig6 = load_document(INSTANCES / 'fig6.json').build()
        relaxed = relax_fractional_bounds(fig6)
        self.assertEqual(relaxed.psi, frozenset())
        self.assertEqual(relaxed.bound(3), 4.0)
        self.assertEqual(relaxed.bound(4), 4.0)
        self.assertEqual(relaxed.bound(8), 9.4)
        self.assertIn('relaxed:3', relaxed.flags)

        partial = relax_fractional_bounds(fig6, [4])
        self.assertEqual(partial.psi, frozenset({3}))
        self.assertTrue(check_assumption2(partial).holds)


class TestNormalizeProperty1(unittest.TestCase):
    def setUp(self):
        self.inst = split_children_instance()
        self.oracle = ValueOracle(lambda z: float(z.sum()), 6)

    def test_inserts_vertex_below_psi(self):
        self.assertFalse(self.inst.satisfies_property1())
        ext, ext_oracle, vertex_map = normalize_property1(self.inst, self.oracle)
        self.assertEqual(ext.n, 7)
        self.assertEqual(vertex_map.inserted, {7: 1})
        self.assertEqual(ext.bound(7), 1.0)
        self.assertTrue(ext.is_integer(7))
        self.assertTrue(ext.satisfies_property1())

        expected = load_document(INSTANCES / 'fig3e.json').build()
        self.assertEqual(ext.arcs, expected.arcs)
        np.testing.assert_array_equal(ext.upper_bounds, expected.upper_bounds)

        # Inserted coordinate is ignored by the lifted oracle
        x = np.array([0.2, 1, 8, 8, 11.75, 9, 1])
        self.assertAlmostEqual(ext_oracle.evaluate(x), self.oracle.evaluate(x[:6]))

    def test_lift_and_map_back(self):
        ext, _, vertex_map = normalize_property1(self.inst, self.oracle)
        z = np.array([0.2, 1, 8, 8, 11.75, 9])
        x = lift_solution(z, ext, vertex_map)
        self.assertEqual(x[6], 1.0)
        np.testing.assert_array_equal(map_solution_back(x, vertex_map), z)

    def test_identity_when_property_holds(self):
        fig5 = load_document(INSTANCES / 'fig5.json').build()
        oracle = ValueOracle(lambda z: 0.0, 12)
        ext, ext_oracle, vertex_map = normalize_property1(fig5, oracle)
        self.assertIs(ext, fig5)
        self.assertIs(ext_oracle, oracle)
        self.assertTrue(vertex_map.is_identity)

    def test_normalizing_twice_changes_nothing(self):
        ext, ext_oracle, _ = normalize_property1(self.inst, self.oracle)
        again, again_oracle, vertex_map = normalize_property1(ext, ext_oracle)
        self.assertIs(again, ext)
        self.assertIs(again_oracle, ext_oracle)
        self.assertTrue(vertex_map.is_identity)

    def test_rejects_assumption1_failure(self):
        inst = build_instance(3, [(1, 2), (2, 3)], [0.5, 1.5, 2], [3])
        with self.assertRaises(Assumption1Violated):
            normalize_property1(inst, ValueOracle(lambda z: 0.0, 3))


class TestValueOracle(unittest.TestCase):
    def test_normalized_at_zero(self):
        oracle = ValueOracle(lambda z: 5.0 + z[0], 1)
        self.assertEqual(oracle.base_value, 5.0)
        self.assertEqual(oracle.evaluate(np.zeros(1)), 0.0)
        self.assertEqual(oracle.evaluate(np.ones(1)), 1.0)

    def test_memoization(self):
        oracle = ValueOracle(lambda z: float(z.sum()), 2, memoize=True)
        oracle.evaluate(np.array([1.0, 2.0]))
        oracle.evaluate(np.array([1.0, 2.0]))
        # One call for the base value, one for the point
        self.assertEqual(oracle.evaluations, 2)
        self.assertEqual(oracle.cache_hits, 1)

    def test_failures(self):
        oracle = ValueOracle(lambda z: float('nan') if z[0] > 0.5 else 0.0, 1)
        with self.assertRaises(OracleEvaluationFailure):
            oracle.evaluate(np.ones(1))
        with self.assertRaises(OracleEvaluationFailure):
            oracle.evaluate(np.ones(2))

        def broken(z):
            if z[0] > 0:
                raise RuntimeError("boom")
            return 0.0

        with self.assertRaises(OracleEvaluationFailure):
            ValueOracle(broken, 1).evaluate(np.ones(1))

    def test_quadratic_values(self):
        spec = QuadraticSpec([[-1, -6.5], [-6.5, 0]], [50, 30])
        oracle = ValueOracle.from_quadratic(spec)
        self.assertAlmostEqual(oracle.evaluate(np.array([10.0, 10.0])), -600.0)


class TestDRCheck(unittest.TestCase):
    def setUp(self):
        self.inst = build_instance(3, [], [2, 2, 2], [])

    def test_hessian_check(self):
        good = ValueOracle.from_quadratic(QuadraticSpec(-np.ones((3, 3)), np.zeros(3)))
        result = check_dr_submodularity(good, self.inst)
        self.assertTrue(result.passed)
        self.assertEqual(result.method, 'hessian')

        bad = ValueOracle.from_quadratic(QuadraticSpec([[0, 1, 0], [1, 0, 0], [0, 0, 0]], np.zeros(3)))
        result = check_dr_submodularity(bad, self.inst)
        self.assertFalse(result.passed)
        self.assertEqual(result.worst_violation, -1.0)

    def test_sampling_check(self):
        concave = ValueOracle(lambda z: -float(z.sum()) ** 2, 3)
        result = check_dr_submodularity(concave, self.inst, samples=100, seed=3)
        self.assertTrue(result.passed)
        self.assertEqual(result.method, 'sampling')

        convex = ValueOracle(lambda z: float(z.sum()) ** 2, 3)
        result = check_dr_submodularity(convex, self.inst, samples=100, seed=3)
        self.assertFalse(result.passed)
        self.assertLess(result.worst_violation, 0.0)
        self.assertIsNotNone(result.witness)

    @patch('drsubmod.forest.oracle.settings')
    def test_default_sample_count_from_settings(self, mock_settings):
        mock_settings.DR_SAMPLES = 5
        mock_settings.DR_TOL = 1e-9
        mock_settings.INTEGRALITY_TOL = 1e-9
        oracle = ValueOracle(lambda z: -float(z.sum()) ** 2, 3)
        check_dr_submodularity(oracle, self.inst, seed=0)
        # Base value plus at most 4 evaluations per sample
        self.assertLessEqual(oracle.evaluations, 1 + 4 * 5)


    def test_table_objective_sampled_inside_feasible_set(self):
        inst = build_instance(3, [(1, 2), (2, 3)], [2, 2, 2], [1, 2, 3])
        entries = {
            p: -float(sum(p)) ** 2
            for p in itertools.product(range(3), repeat=3) if p[0] <= p[1] <= p[2]
        }
        result = check_dr_submodularity(ValueOracle(TableObjective(entries), 3), inst, samples=200, seed=1)
        self.assertTrue(result.passed)
        self.assertEqual(result.method, 'sampling')

    def test_lifted_oracle(self):
        inst = split_children_instance()
        good = ValueOracle.from_quadratic(QuadraticSpec(-np.ones((6, 6)), np.zeros(6)))
        ext, lifted, _ = normalize_property1(inst, good)
        self.assertIsInstance(lifted, LiftedOracle)
        result = check_dr_submodularity(lifted, ext, samples=300, seed=2)
        self.assertTrue(result.passed)
        self.assertEqual(result.method, 'sampling')

        Q = np.zeros((6, 6))
        Q[4, 5] = Q[5, 4] = 1.0
        bad = ValueOracle.from_quadratic(QuadraticSpec(Q, np.zeros(6)))
        ext, lifted, _ = normalize_property1(inst, bad)
        result = check_dr_submodularity(lifted, ext, samples=300, seed=2)
        self.assertFalse(result.passed)
        self.assertEqual(len(result.witness['x']), 7)


if __name__ == '__main__':
    unittest.main()
