import itertools
import math

import numpy as np
from django.test import SimpleTestCase

from baths.decoherence import random_model
from baths.models import CouplingTerm, SystemBathModel
from ftnm.exceptions import DomainError, MalformedOperatorError
from operators.linalg import (
    evolve,
    op_norm,
    pauli,
    random_hermitian,
    random_unitary,
)
from operators.models import Operator

from .expansion import (
    binomial_tail_bound,
    decompose_gate,
    expand_at_least,
    fault_path_norm_bound,
    fault_path_operators,
    fault_path_sweep,
    interaction_picture,
    lemma1_sweep,
    lemma2_sweep,
    random_factors,
    random_fault_path,
    random_spread_circuit,
    trotter_product,
    verify_spread_identity,
)
from .models import SpreadInterval, TimeResolvedFaultPath


def get_default_model(**fields):
    default_fields = dict(
        n_system_qubits=1,
        bath_dim=2,
        coupling_terms=[CouplingTerm('Z', pauli('Z'))],
        system_hamiltonian=Operator.zeros(2),
        bath_hamiltonian=Operator.zeros(2),
        t0=0.1,
        lambda0=1.0,
    )
    default_fields.update(fields)
    return SystemBathModel(**default_fields)


def explicit_expansion(factors, k):
    """Sum over all 2ⁿ words with at least k fault factors"""
    dim = factors[0][0].dim
    total = np.zeros((dim, dim), dtype=complex)
    for word in itertools.product((0, 1), repeat=len(factors)):
        if sum(word) < k:
            continue
        product = np.eye(dim, dtype=complex)
        for pick, (G, B) in zip(word, factors):
            product = (B if pick else G).matrix @ product
        total += product
    return Operator(total)


class DecomposeGateTests(SimpleTestCase):
    def test_uncoupled_gate_has_no_fault(self):
        rng = np.random.default_rng(0)
        model = get_default_model(
            coupling_terms=[],
            system_hamiltonian=random_hermitian(2, rng),
            bath_hamiltonian=random_hermitian(2, rng),
        )
        decomposition = decompose_gate(model)
        self.assertLessEqual(decomposition.norm, 1e-14)

    def test_pauli_coupling_closed_form(self):
        decomposition = decompose_gate(get_default_model())
        self.assertAlmostEqual(
            decomposition.norm, 2 * abs(math.sin(0.05)), delta=1e-10
        )
        self.assertLessEqual(decomposition.norm, 0.1)
        self.assertAlmostEqual(decomposition.bound, 0.1)
        self.assertTrue(decomposition.holds())

    def test_parts_are_unitary(self):
        model = random_model(np.random.default_rng(3), 2, 3, 0.1, 1.0)
        decomposition = decompose_gate(model)
        for U in (decomposition.U, decomposition.U0):
            self.assertLessEqual(
                op_norm(U.dagger() @ U - Operator.identity(U.dim)), 1e-12
            )
        np.testing.assert_allclose(
            decomposition.E.matrix,
            decomposition.U.matrix - decomposition.U0.matrix,
        )

    def test_one_qubit_sweep(self):
        report = lemma2_sweep(
            seed=1, trials=100, n_system_qubits=1, bath_dim=8
        )
        self.assertEqual(report.violations, 0)
        self.assertLessEqual(report.max_ratio, 1 + 1e-9)

    def test_two_qubit_sweep(self):
        report = lemma2_sweep(
            seed=2, trials=100, n_system_qubits=2, bath_dim=8
        )
        self.assertEqual(report.violations, 0)

    def test_deflated_bound_is_caught(self):
        report = lemma2_sweep(
            seed=3, trials=20, n_system_qubits=1, bath_dim=4, bound_scale=0.1
        )
        self.assertGreater(report.violations, 0)
        self.assertFalse(report.passed)

    def test_trotter_product_converges(self):
        model = random_model(np.random.default_rng(4), 1, 2, 0.2, 1.0)
        exact = decompose_gate(model).U
        errors = [
            op_norm(trotter_product(model, n) - exact) for n in (1, 10, 100)
        ]
        self.assertLess(errors[1], errors[0])
        self.assertLess(errors[2], errors[1])
        self.assertLess(errors[2], 1e-3)
        with self.assertRaises(DomainError):
            trotter_product(model, 0)


class BinomialTailTests(SimpleTestCase):
    def test_values(self):
        self.assertAlmostEqual(binomial_tail_bound(2, 1, 0.1, True), 0.2)
        self.assertAlmostEqual(binomial_tail_bound(2, 1, 0.1, False), 0.22)
        self.assertAlmostEqual(binomial_tail_bound(3, 2, 0.1, True), 0.03)

    def test_invalid(self):
        with self.assertRaises(DomainError):
            binomial_tail_bound(2, 3, 0.1, True)
        with self.assertRaises(DomainError):
            binomial_tail_bound(2, 1, -0.1, True)

    def test_expansion_matches_explicit_sum(self):
        rng = np.random.default_rng(5)
        for n in range(1, 5):
            factors = random_factors(rng, n, 0.1, good_is_unitary=False)
            for k in range(n + 1):
                np.testing.assert_allclose(
                    expand_at_least(factors, k).matrix,
                    explicit_expansion(factors, k).matrix,
                    atol=1e-12,
                )

    def test_three_factor_example(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            factors = random_factors(rng, 3, 0.1, good_is_unitary=True)
            for G, B in factors:
                self.assertLessEqual(op_norm(B), 0.1 + 1e-12)
            expanded = explicit_expansion(factors, 2)
            self.assertLessEqual(op_norm(expanded), 0.03 + 1e-9)

    def test_bound_across_seeds(self):
        for n, eps, unitary in itertools.product(
            range(1, 5), (0.05, 0.1), (True, False)
        ):
            for k in range(n + 1):
                report = lemma1_sweep(
                    seed=n, trials=50, n=n, k=k, eps=eps,
                    good_is_unitary=unitary,
                )
                self.assertTrue(report.passed, report)

    def test_k_zero_is_full_product(self):
        rng = np.random.default_rng(7)
        factors = random_factors(rng, 3, 0.1, good_is_unitary=False)
        product = np.eye(4)
        for G, B in factors:
            product = (G + B).matrix @ product
        np.testing.assert_allclose(
            expand_at_least(factors, 0).matrix, product, atol=1e-12
        )


class InteractionPictureTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(8)

    def test_identity_frame(self):
        E = Operator(self.rng.normal(size=(4, 4)))
        np.testing.assert_allclose(
            interaction_picture(E, Operator.identity(4)).matrix, E.matrix
        )

    def test_norm_preserved_and_matches_product(self):
        for _ in range(20):
            E = Operator(
                self.rng.normal(size=(8, 8))
                + 1j * self.rng.normal(size=(8, 8))
            )
            U0 = random_unitary(8, self.rng)
            image = interaction_picture(E, U0)
            self.assertAlmostEqual(op_norm(image), op_norm(E), delta=1e-10)
            np.testing.assert_allclose(
                image.matrix,
                U0.matrix @ E.matrix @ U0.matrix.conj().T,
                atol=1e-12,
            )

    def test_mismatch(self):
        with self.assertRaises(MalformedOperatorError):
            interaction_picture(Operator.identity(2), Operator.identity(4))
        with self.assertRaises(MalformedOperatorError):
            interaction_picture(Operator.identity(2), Operator(2 * np.eye(2)))


class SpreadIdentityTests(SimpleTestCase):
    def test_fault_free_path(self):
        circuit = random_spread_circuit(np.random.default_rng(9))
        distance = verify_spread_identity(circuit, TimeResolvedFaultPath())
        self.assertLessEqual(distance, 1e-12)

    def test_single_fault_identity_evolution(self):
        rng = np.random.default_rng(10)
        zero = Operator.zeros(4)
        coupling = random_hermitian(4, rng)
        circuit = [
            SpreadInterval(zero, zero, 0.2),
            SpreadInterval(zero, coupling, 0.3),
        ]
        faults = TimeResolvedFaultPath(((1, 0.35),))
        self.assertLessEqual(verify_spread_identity(circuit, faults), 1e-12)

    def test_random_circuits(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            circuit = random_spread_circuit(rng)
            for k in (0, 1, 2):
                faults = random_fault_path(rng, circuit, k)
                self.assertLessEqual(
                    verify_spread_identity(circuit, faults), 1e-10
                )

    def test_time_outside_span(self):
        circuit = random_spread_circuit(np.random.default_rng(12))
        span = sum(interval.duration for interval in circuit)
        with self.assertRaises(DomainError):
            verify_spread_identity(
                circuit, TimeResolvedFaultPath(((2, span + 1),))
            )
        with self.assertRaises(DomainError):
            verify_spread_identity(
                circuit, TimeResolvedFaultPath(((5, 0.1),))
            )

    def test_path_invariants(self):
        with self.assertRaises(DomainError):
            TimeResolvedFaultPath(((0, 0.2), (1, 0.1)))
        with self.assertRaises(DomainError):
            TimeResolvedFaultPath(((0, 0.1), (0, 0.2)))
        self.assertEqual(TimeResolvedFaultPath(((0, 0.1), (2, 0.5))).k, 2)


class FaultPathTests(SimpleTestCase):
    def test_norm_bound_values(self):
        self.assertEqual(fault_path_norm_bound(0, 1.0, 0.1), 1)
        self.assertAlmostEqual(fault_path_norm_bound(2, 1.0, 0.01), 4e-4)
        with self.assertRaises(DomainError):
            fault_path_norm_bound(-1, 1.0, 0.1)

    def test_two_location_paths(self):
        rng = np.random.default_rng(13)
        for eta in (0.01, 0.05):
            for qubits in (1, 2):
                models = [
                    random_model(rng, qubits, 2, t0=0.1, lambda0=eta / 0.1)
                    for _ in range(2)
                ]
                paths = fault_path_operators(models)
                self.assertEqual(len(paths), 4)
                for faulty, operator in paths.items():
                    self.assertLessEqual(
                        op_norm(operator),
                        fault_path_norm_bound(len(faulty), eta / 0.1, 0.1)
                        + 1e-9,
                    )
                first, second = (decompose_gate(model).U for model in models)
                full = second @ first
                total = sum(
                    (op.matrix for op in paths.values()),
                    np.zeros_like(full.matrix),
                )
                np.testing.assert_allclose(total, full.matrix, atol=1e-10)

    def test_completeness_three_locations(self):
        rng = np.random.default_rng(14)
        models = [random_model(rng, 2, 4, 0.05, 1.0) for _ in range(3)]
        paths = fault_path_operators(models)
        self.assertEqual(len(paths), 8)
        full = Operator.identity(16)
        for model in models:
            full = decompose_gate(model).U @ full
        total = sum(op.matrix for op in paths.values())
        np.testing.assert_allclose(total, full.matrix, atol=1e-10)

    def test_fault_operator_is_exact_difference(self):
        model = get_default_model(t0=0.3)
        U = evolve(pauli('ZZ'), 0.3)
        np.testing.assert_allclose(
            decompose_gate(model).E.matrix,
            U.matrix - np.eye(4),
            atol=1e-12,
        )

    def test_sweep(self):
        for eta in (0.01, 0.05):
            for qubits in (1, 2):
                report = fault_path_sweep(
                    seed=15, trials=5, n_locations=2,
                    n_system_qubits=qubits, bath_dim=2, eta=eta,
                )
                self.assertTrue(report.passed, report)
                self.assertLessEqual(report.max_ratio, 1 + 1e-9)
        with self.assertRaises(DomainError):
            fault_path_sweep(
                seed=0, trials=1, n_locations=2,
                n_system_qubits=1, bath_dim=2, eta=0,
            )
