import numpy as np
import scipy.linalg as la
from django.test import SimpleTestCase

from ftnm.exceptions import DomainError, MalformedOperatorError

from .linalg import (
    evolve,
    is_unitary,
    kron,
    op_norm,
    pauli,
    pure_state_trace_distance,
    random_hermitian,
    random_state,
    random_unitary,
    state_fidelity,
    trace_norm,
    variation_distance,
)
from .models import Operator, ProbabilityVector, StateVector


def get_random_matrix(rng, dim=8):
    shape = (dim, dim)
    return Operator(rng.normal(size=shape) + 1j * rng.normal(size=shape))


class OperatorModelTests(SimpleTestCase):
    def test_entries_row_major(self):
        A = Operator([[1, 2], [3, 4]])
        self.assertEqual(A.dim, 2)
        self.assertEqual(A.entries, (1, 2, 3, 4))

    def test_malformed(self):
        with self.assertRaises(MalformedOperatorError):
            Operator(np.zeros((2, 3)))
        with self.assertRaises(MalformedOperatorError):
            Operator(np.zeros((0, 0)))
        with self.assertRaises(MalformedOperatorError):
            Operator(np.zeros(4))

    def test_dimension_cap(self):
        with self.settings(FTNM_MAX_DIM=4):
            with self.assertRaises(MalformedOperatorError):
                Operator(np.eye(8))

    def test_hermitian_hint_checked(self):
        Operator([[1, 1j], [-1j, 2]], hermitian_hint=True)
        with self.assertRaises(MalformedOperatorError):
            Operator([[1, 1], [0, 1]], hermitian_hint=True)

    def test_symmetrization_is_opt_in(self):
        A = Operator([[1, 1], [0, 1]])
        self.assertFalse(A.hermitian_hint)
        S = A.symmetrized()
        self.assertTrue(S.hermitian_hint)
        np.testing.assert_allclose(S.matrix, [[1, 0.5], [0.5, 1]])

    def test_matrix_is_read_only(self):
        A = Operator(np.eye(2))
        with self.assertRaises(ValueError):
            A.matrix[0, 0] = 5

    def test_dimension_mismatch(self):
        with self.assertRaises(MalformedOperatorError):
            Operator.identity(2) + Operator.identity(4)

    def test_state_normalized(self):
        psi = StateVector([3, 4j])
        self.assertAlmostEqual(np.linalg.norm(psi.amplitudes), 1, delta=1e-12)
        with self.assertRaises(MalformedOperatorError):
            StateVector([0, 0])

    def test_probability_vector(self):
        ProbabilityVector([0.25, 0.75])
        with self.assertRaises(DomainError):
            ProbabilityVector([0.5, 0.6])
        with self.assertRaises(DomainError):
            ProbabilityVector([1.5, -0.5])


class NormTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(2024)

    def test_op_norm(self):
        self.assertAlmostEqual(op_norm(Operator.identity(2)), 1, delta=1e-15)
        self.assertAlmostEqual(op_norm(Operator(np.diag([3, -1]))), 3)
        A = get_random_matrix(self.rng)
        oracle = np.linalg.svd(A.matrix, compute_uv=False)
        self.assertAlmostEqual(op_norm(A), oracle.max(), delta=1e-10)

    def test_op_norm_rejects_malformed(self):
        with self.assertRaises(MalformedOperatorError):
            op_norm(np.ones((2, 3)))
        with self.assertRaises(MalformedOperatorError):
            op_norm([])

    def test_trace_norm(self):
        self.assertAlmostEqual(trace_norm(Operator.identity(2)), 2)
        self.assertAlmostEqual(trace_norm(Operator(np.diag([3, -1]))), 4)
        A = get_random_matrix(self.rng)
        oracle = np.linalg.svd(A.matrix, compute_uv=False)
        self.assertAlmostEqual(trace_norm(A), oracle.sum(), delta=1e-10)

    def test_triangle_and_submultiplicativity(self):
        for _ in range(50):
            A = get_random_matrix(self.rng, 6)
            B = get_random_matrix(self.rng, 6)
            self.assertLessEqual(
                op_norm(A + B), op_norm(A) + op_norm(B) + 1e-12
            )
            self.assertLessEqual(
                op_norm(A @ B), op_norm(A) * op_norm(B) * (1 + 1e-12)
            )

    def test_unitary_invariance(self):
        for _ in range(20):
            A = get_random_matrix(self.rng, 6)
            U = random_unitary(6, self.rng)
            V = random_unitary(6, self.rng)
            self.assertAlmostEqual(op_norm(U @ A @ V), op_norm(A), delta=1e-10)

    def test_variation_distance(self):
        P = ProbabilityVector([0.75, 0.25])
        Q = ProbabilityVector([0.5, 0.5])
        self.assertEqual(variation_distance(P, P), 0)
        self.assertEqual(
            variation_distance(
                ProbabilityVector([1, 0]), ProbabilityVector([0, 1])
            ),
            2,
        )
        self.assertAlmostEqual(variation_distance(P, Q), 0.5, delta=1e-15)
        with self.assertRaises(MalformedOperatorError):
            variation_distance(P, ProbabilityVector([1, 0, 0]))


class EvolutionTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_zero_time(self):
        H = random_hermitian(4, self.rng)
        np.testing.assert_allclose(evolve(H, 0).matrix, np.eye(4), atol=1e-14)

    def test_diagonal(self):
        t = 0.7
        U = evolve(pauli('Z'), t)
        np.testing.assert_allclose(
            U.matrix, np.diag([np.exp(-1j * t), np.exp(1j * t)]), atol=1e-14
        )

    def test_random_hermitian(self):
        H = random_hermitian(8, self.rng)
        U = evolve(H, 0.3)
        self.assertTrue(is_unitary(U, atol=1e-12))
        self.assertLessEqual(
            op_norm(U.dagger() @ U - Operator.identity(8)), 1e-12
        )
        np.testing.assert_allclose(
            U.matrix, la.expm(-0.3j * H.matrix), rtol=0, atol=1e-10
        )

    def test_group_property(self):
        H = random_hermitian(6, self.rng)
        product = evolve(H, 0.4) @ evolve(H, 1.1)
        np.testing.assert_allclose(
            product.matrix, evolve(H, 1.5).matrix, rtol=0, atol=1e-10
        )

    def test_non_hermitian_rejected(self):
        with self.assertRaises(MalformedOperatorError):
            evolve(Operator([[0, 1], [0, 0]]), 1.0)


class TensorAndStateTests(SimpleTestCase):
    def test_pauli_products(self):
        ZZ = pauli('ZZ')
        np.testing.assert_allclose(ZZ.matrix, np.diag([1, -1, -1, 1]))
        np.testing.assert_allclose(
            kron(pauli('X'), pauli('I')).matrix, pauli('XI').matrix
        )
        with self.assertRaises(MalformedOperatorError):
            pauli('Q')

    def test_fidelity_and_trace_distance(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            psi = random_state(4, rng)
            phi = random_state(4, rng)
            fidelity = state_fidelity(psi, phi)
            self.assertAlmostEqual(
                pure_state_trace_distance(psi, phi),
                2 * np.sqrt(1 - fidelity**2),
                delta=1e-10,
            )
