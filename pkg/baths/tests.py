import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from ftnm.exceptions import DomainError, MalformedOperatorError
from operators.linalg import evolve, op_norm, pauli, random_hermitian
from operators.models import Operator, StateVector

from .decoherence import (
    depolarizing_fidelity,
    fidelity_decay,
    min_fidelity_analytic,
    minimal_coupling,
    random_model,
    spectral_width,
    verify_fidelity_decay,
    worst_state,
)
from .models import CouplingTerm, SystemBathModel


def get_default_model(**fields):
    """σ_z ⊗ σ_z coupling of one qubit to a two-level bath"""
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


class SystemBathModelTests(SimpleTestCase):
    def test_coupling_hamiltonian(self):
        model = get_default_model()
        np.testing.assert_allclose(
            model.coupling_hamiltonian().matrix, pauli('ZZ').matrix
        )
        self.assertAlmostEqual(model.eta, 0.1)

    def test_identity_coupling_rejected(self):
        with self.assertRaises(MalformedOperatorError):
            CouplingTerm('X', Operator.identity(2))

    def test_non_hermitian_coupling_rejected(self):
        with self.assertRaises(MalformedOperatorError):
            CouplingTerm('X', Operator([[0, 1], [0, 0]]))

    def test_width_above_lambda0_rejected(self):
        with self.assertRaises(DomainError):
            get_default_model(lambda0=0.5)

    def test_dimension_mismatch_rejected(self):
        with self.assertRaises(MalformedOperatorError):
            get_default_model(bath_hamiltonian=Operator.zeros(3))

    def test_two_qubit_coupling_is_additive(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            model = random_model(rng, 2, 3, t0=0.1, lambda0=1.0)
            total = spectral_width(model.coupling_hamiltonian()).delta
            parts = sum(
                spectral_width(model.qubit_coupling(q)).delta
                for q in range(2)
            )
            self.assertLessEqual(total, parts + 1e-10)
            for q in range(2):
                self.assertLessEqual(
                    spectral_width(model.qubit_coupling(q)).delta,
                    1.0 + 1e-12,
                )


class SpectralWidthTests(SimpleTestCase):
    def test_pauli_spectrum(self):
        summary = spectral_width(pauli('ZZ'))
        self.assertAlmostEqual(summary.delta, 1)
        self.assertAlmostEqual(summary.alpha_opt, 0)

    def test_midpoint_shift(self):
        H = Operator(np.diag([0, 2]), hermitian_hint=True)
        summary = spectral_width(H)
        self.assertAlmostEqual(summary.delta, 1)
        self.assertAlmostEqual(summary.alpha_opt, -1)

    def test_random_operators_against_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            dim = int(rng.integers(2, 65))
            H = random_hermitian(dim, rng)
            summary = spectral_width(H)
            values = np.linalg.eigvalsh(H.matrix)
            self.assertAlmostEqual(
                summary.delta, (values[-1] - values[0]) / 2, delta=1e-10
            )
            self.assertAlmostEqual(
                op_norm(minimal_coupling(H)), summary.delta, delta=1e-10
            )
            shifts = summary.alpha_opt + np.linspace(-3, 3, 100)
            best = np.abs(values[:, None] + shifts[None, :]).max(axis=0).min()
            self.assertGreaterEqual(best, summary.delta - 1e-10)

    def test_shift_invariance_of_width(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            H = random_hermitian(6, rng)
            alpha = rng.normal() * 10
            self.assertAlmostEqual(
                spectral_width(H.shifted(alpha)).delta,
                spectral_width(H).delta,
                delta=1e-10,
            )

    def test_non_hermitian(self):
        with self.assertRaises(MalformedOperatorError):
            spectral_width(Operator([[0, 1], [0, 0]]))


class FidelityTests(SimpleTestCase):
    def test_analytic_floor(self):
        self.assertEqual(min_fidelity_analytic(1.0, 0), 1)
        self.assertAlmostEqual(
            min_fidelity_analytic(2, math.pi / 6), 0.5, delta=1e-15
        )
        self.assertAlmostEqual(
            min_fidelity_analytic(1, math.pi / 2), 0, delta=1e-15
        )
        with self.assertRaises(DomainError):
            min_fidelity_analytic(1, math.pi / 2 + 1e-9)

    @given(st.floats(min_value=0, max_value=0.1))
    @settings(max_examples=200)
    def test_taylor_expansion(self, x):
        taylor = 1 - x**2 / 2
        self.assertLessEqual(
            abs(min_fidelity_analytic(1.0, x) - taylor), x**4 + 1e-16
        )

    def test_worst_state_two_level(self):
        H = pauli('Z')
        psi = worst_state(H)
        self.assertAlmostEqual(abs(psi.amplitudes[0]), 1 / math.sqrt(2))
        for t in (0.1, 0.5, 1.2):
            evolved = psi.evolved(evolve(H, t))
            fidelity = abs(np.vdot(psi.amplitudes, evolved.amplitudes))
            self.assertAlmostEqual(fidelity, math.cos(t), delta=1e-9)

    def test_worst_state_pauli_product(self):
        H = pauli('ZZ')
        psi = worst_state(H)
        evolved = psi.evolved(evolve(H, 0.7))
        fidelity = abs(np.vdot(psi.amplitudes, evolved.amplitudes))
        self.assertAlmostEqual(fidelity, math.cos(0.7), delta=1e-9)

    def test_worst_state_degenerate_tie_break(self):
        np.testing.assert_allclose(
            worst_state(pauli('ZZ')).amplitudes,
            np.array([1, 1, 0, 0]) / math.sqrt(2),
            atol=1e-12,
        )
        psi = worst_state(pauli('XX'))
        np.testing.assert_allclose(psi.amplitudes, [1, 0, 0, 0], atol=1e-12)
        evolved = psi.evolved(evolve(pauli('XX'), 0.4))
        fidelity = abs(np.vdot(psi.amplitudes, evolved.amplitudes))
        self.assertAlmostEqual(fidelity, math.cos(0.4), delta=1e-9)

    def test_worst_state_null_hamiltonian(self):
        psi = worst_state(Operator.zeros(4))
        self.assertIsInstance(psi, StateVector)
        report = fidelity_decay(Operator.zeros(4), 1.0, 100, seed=0)
        self.assertAlmostEqual(report.min_sampled_fidelity, 1, delta=1e-12)

    def test_zero_time(self):
        report = verify_fidelity_decay(get_default_model(), 0, 100, seed=1)
        self.assertAlmostEqual(report.min_sampled_fidelity, 1, delta=1e-12)
        self.assertAlmostEqual(report.worst_state_fidelity, 1, delta=1e-12)

    def test_pauli_coupling_floor(self):
        report = verify_fidelity_decay(get_default_model(), 0.5, 1000, seed=2)
        self.assertGreaterEqual(
            report.min_sampled_fidelity, math.cos(0.5) - 1e-9
        )
        self.assertAlmostEqual(
            report.worst_state_fidelity, math.cos(0.5), delta=1e-9
        )
        self.assertTrue(report.passed())

    def test_shifted_spectrum_floor(self):
        H = Operator(np.diag([0, 2, 0, 2]), hermitian_hint=True)
        report = fidelity_decay(H, 0.4, 500, seed=3)
        self.assertAlmostEqual(report.analytic_floor, math.cos(0.4))
        self.assertTrue(report.passed())
        shifted = fidelity_decay(minimal_coupling(H), 0.4, 500, seed=3)
        self.assertAlmostEqual(
            shifted.min_sampled_fidelity,
            report.min_sampled_fidelity,
            delta=1e-10,
        )

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(8)
        H = random_hermitian(6, rng)
        for _ in range(20):
            psi = StateVector(rng.normal(size=6) + 1j * rng.normal(size=6))
            alpha = rng.normal() * 5
            evolved = psi.evolved(evolve(H, 0.9))
            plain = np.vdot(psi.amplitudes, evolved.amplitudes)
            shifted = np.vdot(
                psi.amplitudes,
                psi.evolved(evolve(H.shifted(alpha), 0.9)).amplitudes,
            )
            self.assertAlmostEqual(abs(plain), abs(shifted), delta=1e-10)

    def test_random_models_across_times(self):
        rng = np.random.default_rng(12)
        couplings = [pauli('ZZ')] + [
            random_model(
                rng, 1, int(rng.integers(2, 5)), t0=0.1, lambda0=1.0,
                free=False,
            ).coupling_hamiltonian()
            for _ in range(5)
        ]
        for index, H in enumerate(couplings):
            delta = spectral_width(H).delta
            for delta_t in (0.2, 0.5, 1.0, math.pi / 2):
                report = fidelity_decay(H, delta_t / delta, 1000, seed=index)
                self.assertTrue(report.passed(), report)

    def test_time_domain(self):
        with self.assertRaises(DomainError):
            verify_fidelity_decay(get_default_model(), 2.0, 10, seed=0)

    def test_requires_vanishing_free_hamiltonians(self):
        model = get_default_model(system_hamiltonian=pauli('X'))
        with self.assertRaises(DomainError):
            verify_fidelity_decay(model, 0.1, 10, seed=0)

    def test_depolarizing_fidelity(self):
        self.assertEqual(depolarizing_fidelity(0), 1)
        self.assertAlmostEqual(depolarizing_fidelity(1), 0.70711, places=5)
        self.assertAlmostEqual(depolarizing_fidelity(0.5), 0.86603, places=5)
        with self.assertRaises(DomainError):
            depolarizing_fidelity(1.5)
