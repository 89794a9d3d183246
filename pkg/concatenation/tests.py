import itertools

import numpy as np
from django.test import SimpleTestCase

from ftnm.exceptions import DomainError, SamplingError, ScheduleError

from .models import (
    DURING_EC,
    PRE_EC,
    BlockErrorState,
    CircuitLayout,
    CodeModel,
    FaultSet,
    build_concatenation,
)
from .propagation import (
    is_sparse_state,
    lemma8_property_check,
    propagate_errors,
    random_schedule,
)
from .serializers import (
    FaultSetSerializer,
    LayoutSerializer,
    ScheduleSerializer,
)
from .sparseness import is_sparse, is_sparse_qubits, sample_sparse_faults


def get_layout(N=1, r=1, A_C=5, m=5):
    return build_concatenation(N, r, CodeModel(m=m, A_C=A_C))


def brute_force_good(rectangle, faulty):
    """Sparseness read directly off the rectangle tree"""
    if rectangle.level == 0:
        return rectangle.index not in faulty
    if rectangle.level == 1:
        return sum(leaf in faulty for leaf in rectangle.leaves) <= 1
    bad = [
        child for child in rectangle.children
        if not brute_force_good(child, faulty)
    ]
    return len(bad) <= 1


def rectangles_at(rectangle, level):
    if rectangle.level == level:
        yield rectangle
    elif rectangle.level == 1:
        yield from (
            rectangle.__class__(0, leaf, leaves=(leaf,))
            for leaf in rectangle.leaves
        )
    else:
        for child in rectangle.children:
            yield from rectangles_at(child, level)


def all_subsets(n):
    for size in range(n + 1):
        for subset in itertools.combinations(range(n), size):
            yield frozenset(subset)


class LayoutTests(SimpleTestCase):
    def test_leaf_counts(self):
        self.assertEqual(get_layout(N=1, r=0).leaf_count, 1)
        self.assertEqual(get_layout(N=1, r=1, A_C=5).leaf_count, 5)
        self.assertEqual(get_layout(N=3, r=2, A_C=4).leaf_count, 48)

    def test_paths_are_unique(self):
        layout = get_layout(N=3, r=2, A_C=4)
        paths = {
            layout.hierarchy.path(leaf) for leaf in range(layout.leaf_count)
        }
        self.assertEqual(len(paths), 48)
        self.assertEqual(layout.hierarchy.path(47), (2, 3, 3))

    def test_tree_covers_leaves_in_order(self):
        layout = get_layout(N=2, r=2, A_C=3)
        leaves = [
            leaf
            for root in layout.tree
            for child in root.children
            for leaf in child.leaves
        ]
        self.assertEqual(leaves, list(range(18)))
        self.assertEqual(layout.tree[1].children[0].index, 3)

    def test_invalid_parameters(self):
        with self.assertRaises(DomainError):
            get_layout(N=0)
        with self.assertRaises(DomainError):
            get_layout(r=-1)
        with self.assertRaises(DomainError):
            CodeModel(m=5, A_C=5, corrects=3)
        with self.assertRaises(DomainError):
            CodeModel(m=5, A_C=1)

    def test_unknown_fault_location(self):
        with self.assertRaises(DomainError):
            is_sparse(FaultSet(frozenset({5})), get_layout(), 1)
        with self.assertRaises(DomainError):
            FaultSet(frozenset({-1}))


class SparsenessTests(SimpleTestCase):
    def test_empty_set_is_sparse(self):
        for N, r, A_C in [(1, 0, 2), (2, 1, 5), (1, 3, 4)]:
            layout = get_layout(N=N, r=r, A_C=A_C)
            for level in range(r + 1):
                self.assertTrue(is_sparse(FaultSet(), layout, level))

    def test_two_faults_in_one_rectangle(self):
        layout = get_layout(r=1, A_C=5)
        self.assertFalse(is_sparse(FaultSet(frozenset({0, 1})), layout, 1))
        self.assertTrue(is_sparse(FaultSet(frozenset({3})), layout, 1))
        self.assertFalse(is_sparse(FaultSet(frozenset({3})), layout, 0))

    def test_one_bad_child_is_tolerated(self):
        layout = get_layout(r=2, A_C=3)
        one_bad = FaultSet(frozenset({0, 1, 3, 6}))
        two_bad = FaultSet(frozenset({0, 1, 3, 4}))
        self.assertTrue(is_sparse(one_bad, layout, 2))
        self.assertFalse(is_sparse(one_bad, layout, 1))
        self.assertFalse(is_sparse(two_bad, layout, 2))

    def test_invalid_level(self):
        layout = get_layout(r=1)
        with self.assertRaises(DomainError):
            is_sparse(FaultSet(), layout, 2)
        with self.assertRaises(DomainError):
            is_sparse(FaultSet(), layout, -1)

    def test_matches_brute_force_on_all_subsets(self):
        for N, r, A_C in [(1, 2, 3), (2, 1, 5), (1, 3, 2), (3, 1, 4)]:
            layout = get_layout(N=N, r=r, A_C=A_C)
            self.assertLessEqual(layout.leaf_count, 12)
            for faulty in all_subsets(layout.leaf_count):
                for level in range(r + 1):
                    expected = all(
                        brute_force_good(node, faulty)
                        for root in layout.tree
                        for node in rectangles_at(root, level)
                    )
                    self.assertEqual(
                        is_sparse(FaultSet(faulty), layout, level),
                        expected,
                        msg=f'{layout} {sorted(faulty)} level={level}',
                    )

    def test_removing_a_fault_keeps_sparseness(self):
        layout = get_layout(N=1, r=2, A_C=3)
        for faulty in all_subsets(layout.leaf_count):
            faults = FaultSet(faulty)
            if not is_sparse(faults, layout, 2):
                continue
            for leaf in faulty:
                self.assertTrue(is_sparse(faults.without(leaf), layout, 2))

    def test_qubit_sparseness(self):
        code = CodeModel(m=5, A_C=5)
        self.assertTrue(is_sparse_qubits({0}, code, 1))
        self.assertFalse(is_sparse_qubits({0, 1}, code, 1))
        self.assertTrue(is_sparse_qubits({0, 1}, code, 2))
        self.assertTrue(is_sparse_qubits({0, 5, 10}, code, 2))
        self.assertFalse(is_sparse_qubits({0, 1, 5, 6}, code, 2))
        self.assertTrue(is_sparse_qubits(set(), code, 0))
        self.assertFalse(is_sparse_qubits({0}, code, 0))
        with self.assertRaises(DomainError):
            is_sparse_qubits({25}, code, 2)

    def test_sampled_sets_are_sparse(self):
        layout = get_layout(N=2, r=2)
        rng = np.random.default_rng(7)
        for _ in range(50):
            faults, rejected = sample_sparse_faults(layout, rng)
            self.assertTrue(is_sparse(faults, layout, 2))
            self.assertGreaterEqual(rejected, 0)

    def test_sampler_gives_up(self):
        with self.assertRaises(SamplingError):
            sample_sparse_faults(
                get_layout(), np.random.default_rng(0), max_attempts=0
            )


class PropagationTests(SimpleTestCase):
    def test_no_faults(self):
        layout = get_layout(N=2, r=2)
        state = propagate_errors(layout, FaultSet(), {})
        self.assertEqual(state.periods, (frozenset(), frozenset()))
        self.assertEqual(state.failed, frozenset())
        self.assertEqual(state.descriptor(), [0, 0, 0, 0, 0])

    def test_single_pre_ec_fault_is_corrected(self):
        layout = get_layout(N=2, r=1)
        faults = FaultSet(frozenset({2}))
        state = propagate_errors(layout, faults, {2: PRE_EC})
        self.assertEqual(state.final, frozenset())
        self.assertEqual(state.failed, frozenset())

    def test_single_during_ec_fault_leaves_one_error(self):
        layout = get_layout(N=1, r=1)
        faults = FaultSet(frozenset({3}))
        state = propagate_errors(layout, faults, {3: DURING_EC})
        self.assertEqual(state.final, frozenset({3}))
        self.assertEqual(state.descriptor(), 1)

    def test_incoming_error_is_corrected_by_next_rectangle(self):
        layout = get_layout(N=2, r=1)
        faults = FaultSet(frozenset({3}))
        state = propagate_errors(layout, faults, {3: DURING_EC})
        self.assertEqual(state.periods, (frozenset({3}), frozenset()))

    def test_three_pre_ec_faults_fail_the_block(self):
        layout = get_layout(N=1, r=1)
        faults = FaultSet(frozenset({0, 1, 2}))
        schedule = dict.fromkeys(faults.faulty_leaves, PRE_EC)
        state = propagate_errors(layout, faults, schedule)
        self.assertIn((1, 0), state.failed)
        self.assertEqual(state.final, frozenset(range(5)))

    def test_two_during_ec_faults_break_sparseness(self):
        layout = get_layout(N=1, r=1)
        faults = FaultSet(frozenset({0, 1}))
        schedule = dict.fromkeys(faults.faulty_leaves, DURING_EC)
        state = propagate_errors(layout, faults, schedule)
        self.assertFalse(state.failed)
        self.assertFalse(is_sparse_state(state))

    def test_schedule_errors(self):
        layout = get_layout()
        faults = FaultSet(frozenset({0, 1}))
        with self.assertRaises(ScheduleError):
            propagate_errors(layout, faults, {0: PRE_EC})
        with self.assertRaises(ScheduleError):
            propagate_errors(layout, faults, {0: PRE_EC, 1: 'after-EC'})

    def test_spread_per_fault(self):
        layout = get_layout(N=4, r=1, A_C=6, m=4)
        rng = np.random.default_rng(11)
        for _ in range(200):
            faults = FaultSet(frozenset(
                np.flatnonzero(rng.random(layout.leaf_count) < 0.2).tolist()
            ))
            schedule = random_schedule(faults, rng)
            state = propagate_errors(layout, faults, schedule)
            for root, errors in enumerate(state.periods):
                if (1, root) in state.failed:
                    continue
                during = [
                    leaf for leaf in layout.hierarchy.children(1, root)
                    if leaf in faults and schedule[leaf] == DURING_EC
                ]
                self.assertLessEqual(
                    len(errors), layout.code.spread * len(during)
                )

    def test_descriptor_nests_counts(self):
        code = CodeModel(m=3, A_C=4)
        state = BlockErrorState(
            code=code, r=3, periods=(frozenset({0, 4, 9, 26}),)
        )
        self.assertEqual(
            state.descriptor(), [[1, 1, 0], [1, 0, 0], [0, 0, 1]]
        )


class Lemma8Tests(SimpleTestCase):
    def test_sparse_faults_leave_sparse_errors(self):
        for r in (1, 2, 3):
            layout = get_layout(N=2, r=r, A_C=5, m=5)
            for seed in (0, 1, 2):
                report = lemma8_property_check(layout, 1000, seed)
                self.assertEqual(report.trials, 1000)
                self.assertEqual(report.violations, 0)
                self.assertTrue(report.passed)

    def test_non_sparse_injection_is_excluded(self):
        layout = get_layout(N=1, r=2, A_C=5, m=5)
        injected = [
            FaultSet(frozenset({0, 1, 5, 6})),
            FaultSet(frozenset({0, 1})),
        ]
        self.assertFalse(is_sparse(injected[0], layout, 2))
        report = lemma8_property_check(layout, 10, 3, injected=injected)
        self.assertEqual(report.excluded, 1)
        self.assertEqual(report.violations, 0)

    def test_deep_layouts_are_refused(self):
        with self.assertRaises(DomainError):
            lemma8_property_check(get_layout(r=4), 1, 0)


class SerializerTests(SimpleTestCase):
    def test_layout(self):
        serializer = LayoutSerializer(data={'N': 2, 'r': 1, 'A_C': 3, 'm': 5})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        layout = serializer.save()
        self.assertIsInstance(layout, CircuitLayout)
        data = LayoutSerializer(layout).data
        self.assertEqual(data['leaf_count'], 6)
        self.assertEqual(
            data['tree'][1], {'level': 1, 'index': 1, 'leaves': [3, 4, 5]}
        )

    def test_layout_rejects_bad_values(self):
        serializer = LayoutSerializer(data={'N': 0, 'r': 1, 'A_C': 3, 'm': 5})
        self.assertFalse(serializer.is_valid())
        self.assertIn('N', serializer.errors)

    def test_faults_checked_against_layout(self):
        layout = get_layout()
        serializer = FaultSetSerializer(
            data={'faults': [0, 7]}, context={'layout': layout}
        )
        self.assertFalse(serializer.is_valid())
        serializer = FaultSetSerializer(
            data={'faults': [4, 0]}, context={'layout': layout}
        )
        self.assertTrue(serializer.is_valid(), serializer.errors)
        faults = serializer.save()
        self.assertEqual(
            FaultSetSerializer(faults).data, {'faults': [0, 4]}
        )

    def test_schedule(self):
        serializer = ScheduleSerializer(
            data={'schedule': {'3': PRE_EC, '1': DURING_EC}}
        )
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save(), {3: PRE_EC, 1: DURING_EC})
        serializer = ScheduleSerializer(data={'schedule': {'3': 'late'}})
        self.assertFalse(serializer.is_valid())
