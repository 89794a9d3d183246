import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from ftnm.exceptions import DomainError, NoConvergenceError

from .models import (
    CLUSTER_LEMMA,
    LEMMA2_PRODUCT,
    RecursionLevel,
    RecursionTrace,
    ThresholdParams,
)
from .recursion import (
    base_bound,
    cluster_base_bound,
    compare_base_rules,
    decay_slope,
    empirical_threshold,
    fixed_point,
    global_bad_bound,
    iterate_recursion,
    output_distance_bound,
    output_distance_terms,
    probabilistic_threshold,
    recursion_step,
    required_level,
    solve_eps_prime,
    threshold_value,
)

CODE_SIZES = (2, 5, 10, 24, 100)


class ThresholdValueTests(SimpleTestCase):
    def test_formula(self):
        for A_C in CODE_SIZES:
            self.assertAlmostEqual(
                threshold_value(A_C),
                1 / (math.e * A_C * (A_C - 1)),
                delta=1e-12,
            )
        self.assertAlmostEqual(threshold_value(2), 1.83940e-1, delta=1e-6)
        self.assertAlmostEqual(threshold_value(10), 4.0876e-3, delta=1e-7)
        self.assertAlmostEqual(threshold_value(100), 3.7163e-5, delta=1e-8)

    def test_strictly_decreasing(self):
        values = [threshold_value(A_C) for A_C in range(2, 200)]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

    def test_probabilistic_threshold(self):
        self.assertAlmostEqual(probabilistic_threshold(10), 1 / 45)
        self.assertGreater(probabilistic_threshold(10), threshold_value(10))

    def test_small_codes_are_rejected(self):
        with self.assertRaises(DomainError):
            threshold_value(1)


class RecursionStepTests(SimpleTestCase):
    def test_values(self):
        self.assertEqual(recursion_step(0, 10), 0)
        self.assertAlmostEqual(recursion_step(0.01, 10), 4.8730e-3, delta=1e-7)
        self.assertEqual(recursion_step(1, 2), 1)
        with self.assertRaises(DomainError):
            recursion_step(-0.1, 10)

    @given(
        st.floats(min_value=0, max_value=1),
        st.floats(min_value=0, max_value=1),
        st.integers(min_value=2, max_value=50),
    )
    @settings(max_examples=300)
    def test_monotone(self, x, y, A_C):
        low, high = sorted((x, y))
        self.assertLessEqual(
            recursion_step(low, A_C), recursion_step(high, A_C)
        )

    def test_fixed_point(self):
        for A_C in CODE_SIZES:
            x = fixed_point(A_C)
            self.assertGreater(x, 0)
            self.assertAlmostEqual(recursion_step(x, A_C), x, delta=1e-10)


class BaseRuleTests(SimpleTestCase):
    def test_cluster_bound(self):
        self.assertEqual(cluster_base_bound(10, 0), 0)
        self.assertAlmostEqual(cluster_base_bound(10, 1e-3), 2e-4)

    def test_rules_compared_at_same_noise(self):
        bounds = compare_base_rules(10, 1e-3)
        self.assertAlmostEqual(bounds[LEMMA2_PRODUCT], 1.829e-4, delta=1e-7)
        self.assertAlmostEqual(bounds[CLUSTER_LEMMA], 2e-4)
        self.assertGreater(bounds[CLUSTER_LEMMA], bounds[LEMMA2_PRODUCT])

    def test_unknown_rule(self):
        with self.assertRaises(DomainError):
            base_bound(10, 1e-3, 'union_bound')


class IterateRecursionTests(SimpleTestCase):
    def test_noiseless(self):
        for A_C in (2, 10):
            trace = iterate_recursion(ThresholdParams(A_C=A_C, eta=0), 10)
            self.assertEqual(trace.values, [0.0] * 10)
            self.assertTrue(trace.converged)
            self.assertFalse(trace.diverged)

    def test_decreasing_at_threshold(self):
        params = ThresholdParams(A_C=10, eta=threshold_value(10))
        trace = iterate_recursion(params, 10)
        logs = [level.log_x for level in trace.levels]
        self.assertEqual(len(logs), 10)
        self.assertTrue(all(a > b for a, b in zip(logs, logs[1:])))
        self.assertTrue(all(math.isfinite(v) for v in logs))
        self.assertTrue(trace.converged)

    def test_diverges_above_fixed_point(self):
        trace = iterate_recursion(ThresholdParams(A_C=10, eta=0.2), 10)
        self.assertTrue(trace.diverged)
        self.assertFalse(trace.converged)
        for A_C in (5, 10):
            eta = 2 * fixed_point(A_C)
            trace = iterate_recursion(ThresholdParams(A_C=A_C, eta=eta), 10)
            self.assertTrue(trace.diverged)
            self.assertLessEqual(len(trace.levels), 10)

    def test_doubly_exponential_decay(self):
        for A_C in (5, 10):
            params = ThresholdParams(A_C=A_C, eta=0.9 * threshold_value(A_C))
            trace = iterate_recursion(params, 9)
            slope = decay_slope(trace, skip=4)
            self.assertAlmostEqual(slope, math.log(2), delta=0.1 * math.log(2))

    def test_slope_needs_levels(self):
        trace = iterate_recursion(ThresholdParams(A_C=10, eta=1e-3), 3)
        with self.assertRaises(DomainError):
            decay_slope(trace, skip=4)

    def test_trace_flags_are_exclusive(self):
        with self.assertRaises(DomainError):
            RecursionTrace(
                levels=(RecursionLevel(1, 0.5, math.log(0.5)),),
                converged=True,
                diverged=True,
            )

    def test_parameter_validation(self):
        with self.assertRaises(DomainError):
            ThresholdParams(A_C=1, eta=0.1)
        with self.assertRaises(DomainError):
            ThresholdParams(A_C=10, eta=-1e-3)
        with self.assertRaises(DomainError):
            ThresholdParams(A_C=10, eta=1e-3, epsilon_target=1.0)
        with self.assertRaises(DomainError):
            iterate_recursion(ThresholdParams(A_C=10, eta=1e-3), 0)


class EmpiricalThresholdTests(SimpleTestCase):
    def test_not_below_formula(self):
        for A_C in CODE_SIZES:
            self.assertGreaterEqual(
                empirical_threshold(A_C, LEMMA2_PRODUCT), threshold_value(A_C)
            )
        self.assertGreaterEqual(
            empirical_threshold(2, CLUSTER_LEMMA), threshold_value(2)
        )

    def test_boundary_is_the_fixed_point(self):
        eta = empirical_threshold(10)
        self.assertAlmostEqual(
            base_bound(10, eta) / fixed_point(10), 1, delta=1e-4
        )

    def test_tolerance_must_be_positive(self):
        with self.assertRaises(DomainError):
            empirical_threshold(10, tol=0)


class GlobalBoundTests(SimpleTestCase):
    def test_values(self):
        self.assertEqual(global_bad_bound(5, 0), 0)
        self.assertEqual(global_bad_bound(1, 0.3), 0.3)
        self.assertAlmostEqual(
            global_bad_bound(100, 1e-4), 1.0100e-2, delta=1e-6
        )

    def test_output_distance(self):
        self.assertEqual(output_distance_bound(0), 0)
        self.assertAlmostEqual(output_distance_bound(0.02), 0.52, delta=1e-15)
        with self.assertRaises(DomainError):
            output_distance_bound(0.5)
        grid = np.linspace(0, 0.5, 100, endpoint=False)
        values = [output_distance_bound(eps) for eps in grid]
        self.assertTrue(all(a < b for a, b in zip(values, values[1:])))

    def test_output_distance_terms(self):
        for eps in np.linspace(0, 0.5, 100, endpoint=False):
            first, second = output_distance_terms(eps)
            self.assertLessEqual(first + second, output_distance_bound(eps))

    def test_eps_prime(self):
        eps_prime = solve_eps_prime(0.1)
        self.assertAlmostEqual(eps_prime, 2.1509e-3, delta=1e-6)
        self.assertAlmostEqual(
            output_distance_bound(eps_prime), 0.1, delta=1e-10
        )
        with self.assertRaises(DomainError):
            solve_eps_prime(0)


class RequiredLevelTests(SimpleTestCase):
    def get_params(self, **fields):
        default_fields = dict(
            A_C=10, eta=threshold_value(10) / 2, N=1, epsilon_target=0.1
        )
        default_fields.update(fields)
        return ThresholdParams(**default_fields)

    def test_single_location(self):
        report = required_level(self.get_params())
        self.assertEqual(report.r, 1)
        self.assertEqual(report.total_locations, 10)
        self.assertLessEqual(report.global_bad, report.eps_prime)

    def test_above_threshold(self):
        with self.assertRaises(NoConvergenceError):
            required_level(self.get_params(eta=threshold_value(10)))

    def test_doubling_circuit_adds_at_most_one_level(self):
        levels = [
            required_level(self.get_params(N=2**k)).r for k in range(11)
        ]
        steps = [b - a for a, b in zip(levels, levels[1:])]
        self.assertTrue(all(step in (0, 1) for step in steps), levels)
        self.assertEqual(levels[-1], 3)

    def test_total_locations(self):
        report = required_level(self.get_params(N=1000))
        self.assertEqual(report.total_locations, 1000 * 10**report.r)
