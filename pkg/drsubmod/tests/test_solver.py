import itertools
import sys
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np
from pydantic import ValidationError

sys.path.append(str(Path(__file__).parent.parent / 'src'))

from drsubmod.bruteforce import min_over_extreme_points, random_instance, random_quadratic
from drsubmod.config.repository import InstanceDocument, load_document
from drsubmod.cuts import separate, validate_cut_on_extremes
from drsubmod.exceptions import Assumption1Violated, Assumption2Violated, NonDRSubmodularDetected
from drsubmod.forest import QuadraticSpec, ValueOracle, build_instance
from drsubmod.perm import decompose
from drsubmod.solver import (
    SolverOptions,
    SolveStatus,
    assumption2_offenders,
    default_iteration_cap,
    minimize,
    minimize_unconstrained_submodular,
)

INSTANCES = Path(__file__).parent.parent / 'instances'


class TestMinimize(unittest.TestCase):
    def test_two_dimensional_quadratic(self):
        document = load_document(INSTANCES / 'quad2d.json')
        report = minimize(document.build(), document.build_oracle())
        self.assertEqual(report.status, SolveStatus.OPTIMAL)
        self.assertAlmostEqual(report.value, -600.0, places=6)
        np.testing.assert_allclose(report.point, [10.0, 10.0])
        self.assertLessEqual(report.master_bound, report.value + 1e-6)
        self.assertLessEqual(report.final_violation, SolverOptions().epsilon)

    def test_zero_function(self):
        inst = load_document(INSTANCES / 'fig5.json').build()
        report = minimize(inst, ValueOracle(lambda z: 0.0, 12))
        self.assertEqual(report.iterations, 1)
        self.assertEqual(report.value, 0.0)
        self.assertEqual(report.cuts_generated, 1)
        self.assertEqual(inst.feasibility_violations(np.asarray(report.point)), [])

    def test_constant_offset_restored(self):
        inst = build_instance(1, [], [3], [1])
        report = minimize(inst, ValueOracle(lambda z: 7.0 - z[0], 1))
        self.assertAlmostEqual(report.value, 4.0)
        np.testing.assert_allclose(report.point, [3.0])

    def test_linear_objective_on_reference_forest(self):
        document = load_document(INSTANCES / 'fig5.json')
        inst = document.build()
        report = minimize(inst, document.build_oracle())
        self.assertAlmostEqual(report.value, -sum(inst.upper_bounds), places=6)
        self.assertEqual(inst.feasibility_violations(np.asarray(report.point)), [])

    def test_property1_normalization_is_transparent(self):
        inst = build_instance(
            6, [(1, 2), (1, 3), (3, 4), (4, 5), (4, 6)], [0.2, 2, 8, 8, 11.75, 9], [2, 3, 4]
        )
        c = np.array([-3.0, 1.0, -1.0, 0.5, -0.2, 0.3])
        report = minimize(inst, ValueOracle(lambda z: float(c @ z), 6))
        self.assertEqual(report.inserted_vertices, {'7': 1})
        self.assertEqual(len(report.point), 6)
        expected = min_over_extreme_points(inst, ValueOracle(lambda z: float(c @ z), 6))
        self.assertAlmostEqual(report.value, expected.value, places=6)

    def test_random_instances_match_enumeration(self):
        rng = np.random.default_rng(21)
        for trial in range(20):
            inst = random_instance(rng, int(rng.integers(1, 7)))
            spec = random_quadratic(rng, inst.n)
            report = minimize(inst, ValueOracle.from_quadratic(spec))
            best = min_over_extreme_points(inst, ValueOracle.from_quadratic(spec))
            self.assertAlmostEqual(report.value, best.value, delta=1e-6 * (1 + abs(best.value)), msg=f"trial {trial}")
            self.assertEqual(inst.feasibility_violations(np.asarray(report.point)), [], f"trial {trial}")
            history = np.asarray(report.bound_history)
            self.assertTrue(np.all(np.diff(history) >= -1e-7 * (1 + np.abs(history[1:]))))

    def test_every_generated_cut_is_valid(self):
        rng = np.random.default_rng(22)
        recorded = []

        def recording(*args, **kwargs):
            cut = separate(*args, **kwargs)
            recorded.append(cut)
            return cut

        for trial in range(8):
            inst = random_instance(rng, int(rng.integers(2, 6)))
            spec = random_quadratic(rng, inst.n)
            recorded.clear()
            with patch('drsubmod.solver.cutting_plane.separate', side_effect=recording):
                minimize(inst, ValueOracle.from_quadratic(spec))
            self.assertTrue(recorded)
            oracle = ValueOracle.from_quadratic(spec)
            for cut in recorded:
                self.assertTrue(validate_cut_on_extremes(inst, oracle, cut).valid, f"trial {trial}")

    def test_upper_seed_point(self):
        document = load_document(INSTANCES / 'quad2d.json')
        report = minimize(document.build(), document.build_oracle(), SolverOptions(seed_point='upper'))
        self.assertAlmostEqual(report.value, -600.0, places=6)


class TestPreconditions(unittest.TestCase):
    def test_assumption1_failure_raises(self):
        inst = build_instance(3, [(1, 2), (2, 3)], [0.5, 1.5, 2], [3])
        with self.assertRaises(Assumption1Violated):
            minimize(inst, ValueOracle(lambda z: 0.0, 3))

    def test_non_dr_objective_detected(self):
        inst = build_instance(2, [], [2, 2], [])
        oracle = ValueOracle.from_quadratic(QuadraticSpec([[0, 1], [1, 0]], [0, 0]))
        with self.assertRaises(NonDRSubmodularDetected):
            minimize(inst, oracle, SolverOptions(check_dr=True))

    def test_options_validation(self):
        with self.assertRaises(ValidationError):
            SolverOptions(epsilon=0.0)
        with self.assertRaises(ValidationError):
            SolverOptions(seed_point='middle')

    def test_iteration_cap(self):
        self.assertEqual(default_iteration_cap(3), 80)
        self.assertEqual(default_iteration_cap(40), 10 * 2 ** 12)


class TestDegradedMode(unittest.TestCase):
    def setUp(self):
        document = load_document(INSTANCES / 'fig6.json')
        self.inst = document.build()
        self.document = document

    def test_offenders(self):
        self.assertEqual(assumption2_offenders(self.inst), [4])

    def test_degraded_solve_is_certified(self):
        with self.assertLogs('drsubmod.solver.cutting_plane', level='WARNING'):
            report = minimize(self.inst, self.document.build_oracle())
        self.assertEqual(report.status, SolveStatus.DEGRADED)
        self.assertEqual(report.relaxed_vertices, [4])
        self.assertIn('bound-only', report.flags)
        self.assertIn('certified-by-enumeration', report.flags)
        self.assertAlmostEqual(report.bruteforce_value, -44.5)
        self.assertAlmostEqual(report.value, -44.5)
        self.assertLessEqual(report.master_bound, -44.5 + 1e-6)
        self.assertEqual(self.inst.feasibility_violations(np.asarray(report.point)), [])

    def test_certified_against_finitized_instance(self):
        data = self.document.model_dump()
        data['u'][9] = None
        document = InstanceDocument.model_validate(data)
        inst = document.build()
        self.assertTrue(inst.has_infinite_bounds())
        with patch('drsubmod.solver.cutting_plane.min_over_extreme_points', wraps=min_over_extreme_points) as enumerate_mock:
            report = minimize(inst, document.build_oracle())
        certified_on = enumerate_mock.call_args[0][0]
        self.assertFalse(certified_on.has_infinite_bounds())
        self.assertEqual(certified_on.bound(10), 3.0)
        self.assertIn('certified-by-enumeration', report.flags)
        self.assertTrue(np.all(np.isfinite(report.point)))
        self.assertAlmostEqual(report.value, -30.5)

    def test_strict_mode_raises(self):
        with self.assertRaises(Assumption2Violated):
            minimize(self.inst, self.document.build_oracle(), SolverOptions(allow_degraded=False))


class TestRecovery(unittest.TestCase):
    def test_recovery_gap_is_not_optimal(self):
        real_decompose = decompose

        def collapsed(*args, **kwargs):
            decomposition = real_decompose(*args, **kwargs)
            decomposition.points = np.zeros_like(decomposition.points)
            return decomposition

        document = load_document(INSTANCES / 'quad2d.json')
        with patch('drsubmod.solver.cutting_plane.decompose', side_effect=collapsed):
            with self.assertLogs('drsubmod.solver.cutting_plane', level='WARNING') as logs:
                report = minimize(document.build(), document.build_oracle())
        self.assertEqual(report.status, SolveStatus.DEGRADED)
        self.assertIn('recovery-gap', report.flags)
        self.assertAlmostEqual(report.value, 0.0)
        self.assertTrue(any('exceeds the master bound' in line for line in logs.output))


class TestSetFunctions(unittest.TestCase):
    def test_modular_functions(self):
        chosen, value = minimize_unconstrained_submodular(lambda S: float(len(S)), 4)
        self.assertEqual(chosen, frozenset())
        self.assertEqual(value, 0.0)
        chosen, value = minimize_unconstrained_submodular(lambda S: -float(len(S)), 4)
        self.assertEqual(chosen, frozenset({1, 2, 3, 4}))
        self.assertAlmostEqual(value, -4.0)

    def test_coverage_against_exhaustive_search(self):
        rng = np.random.default_rng(23)
        for trial in range(5):
            n = 6
            sets = [set(rng.choice(8, size=int(rng.integers(1, 4)), replace=False).tolist()) for _ in range(n)]
            weights = rng.uniform(0.5, 3.0, size=8)
            rewards = rng.uniform(0.0, 4.0, size=n)

            def f(S):
                covered = set().union(*(sets[i - 1] for i in S)) if S else set()
                return float(sum(weights[e] for e in covered) - sum(rewards[i - 1] for i in S))

            best = min(
                f(frozenset(S)) for r in range(n + 1) for S in itertools.combinations(range(1, n + 1), r)
            )
            _, value = minimize_unconstrained_submodular(f, n)
            self.assertAlmostEqual(value, best, places=6, msg=f"trial {trial}")


if __name__ == '__main__':
    unittest.main()
