import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase
from scipy import linalg as la

from ftnm.exceptions import DomainError

from .bounds import (
    cooling_bound,
    energy_bound,
    hyperfine_bound,
    hyperfine_exact_norm,
    read_spectral_table,
    reorg_integral,
    spin_coupling_operator,
    trigamma,
)
from .models import (
    CLOSED,
    QUADRATURE,
    SERIES,
    HyperfineModel,
    SpectralDensity,
)


def get_ohmic_table(alpha, omega_c, start, stop, num):
    omegas = np.linspace(start, stop, num)
    values = alpha * omegas * np.exp(-omegas / omega_c)
    return list(zip(omegas, values))


class TrigammaTests(SimpleTestCase):
    def test_value_at_one(self):
        self.assertAlmostEqual(trigamma(1), math.pi**2 / 6, delta=1e-12)

    def test_recurrence(self):
        for x in np.linspace(0.1, 100, 200):
            self.assertAlmostEqual(
                trigamma(x + 1), trigamma(x) - 1 / x**2, delta=1e-12
            )

    def test_domain(self):
        with self.assertRaises(DomainError):
            trigamma(0)


class SpectralDensityTests(SimpleTestCase):
    def test_ohmic_values(self):
        J = SpectralDensity.ohmic(0.1, 5)
        self.assertAlmostEqual(float(J.evaluate(5)), 0.5 / math.e)
        self.assertEqual(float(J.evaluate(0)), 0)

    def test_tabulated_interpolation(self):
        J = SpectralDensity.tabulated([(1, 2), (3, 6)])
        self.assertAlmostEqual(float(J.evaluate(2)), 4)
        self.assertEqual(float(J.evaluate(4)), 0)

    def test_validation(self):
        with self.assertRaises(DomainError):
            SpectralDensity.ohmic(-0.1, 5)
        with self.assertRaises(DomainError):
            SpectralDensity.ohmic(0.1, 0)
        with self.assertRaises(DomainError):
            SpectralDensity.ohmic(0.1, 5, beta_eff=0)
        with self.assertRaises(DomainError):
            SpectralDensity.tabulated([(1, 2), (1, 3)])
        with self.assertRaises(DomainError):
            SpectralDensity.tabulated([(1, 2), (2, -3)])
        with self.assertRaises(DomainError):
            SpectralDensity('lorentzian')

    def test_non_finite_entries(self):
        nan = float('nan')
        with self.assertRaises(DomainError):
            SpectralDensity.tabulated([(0.1, 0.1), (nan, 0.2), (1, 0.3)])
        with self.assertRaises(DomainError):
            SpectralDensity.tabulated([(0.1, 0.1), (0.5, nan), (1, 0.3)])
        with self.assertRaises(DomainError):
            SpectralDensity.ohmic(nan, 1)
        with self.assertRaises(DomainError):
            SpectralDensity.ohmic(0.1, math.inf)
        with self.assertRaises(DomainError):
            SpectralDensity.ohmic(0.1, 1, beta_eff=nan)


class ReorgIntegralTests(SimpleTestCase):
    def test_ohmic_closed_form(self):
        self.assertEqual(reorg_integral(SpectralDensity.ohmic(0, 5)), 0)
        self.assertAlmostEqual(
            reorg_integral(SpectralDensity.ohmic(0.1, 5)) / 0.5, 1, delta=1e-6
        )

    def test_linear_in_alpha(self):
        base = reorg_integral(SpectralDensity.ohmic(0.1, 3))
        for factor in (2, 5, 10):
            self.assertAlmostEqual(
                reorg_integral(SpectralDensity.ohmic(0.1 * factor, 3)),
                factor * base,
                delta=1e-9,
            )

    def test_tabulated_matches_ohmic(self):
        table = get_ohmic_table(0.1, 5, 1e-4, 250, 5001)
        value = reorg_integral(SpectralDensity.tabulated(table))
        self.assertAlmostEqual(value / 0.5, 1, delta=1e-3)

    def test_zero_frequency_row(self):
        table = get_ohmic_table(0.1, 5, 0, 250, 5001)
        value = reorg_integral(SpectralDensity.tabulated(table))
        self.assertAlmostEqual(value / 0.5, 1, delta=1e-3)
        with self.assertRaises(DomainError):
            reorg_integral(SpectralDensity.tabulated([(0, 1), (1, 1)]))


class EnergyBoundTests(SimpleTestCase):
    def test_values(self):
        J = SpectralDensity.ohmic(0.1, 5)
        self.assertEqual(energy_bound(J, 0), 0)
        self.assertAlmostEqual(energy_bound(J, 2), 2, delta=1e-6)
        self.assertAlmostEqual(
            energy_bound(J, 8) / energy_bound(J, 2), 2, delta=1e-12
        )
        with self.assertRaises(DomainError):
            energy_bound(J, -1)


class CoolingBoundTests(SimpleTestCase):
    def test_zero_temperature_limit(self):
        J = SpectralDensity.ohmic(0.5, 2, beta_eff=1e8 / 2)
        for method in (QUADRATURE, CLOSED, SERIES):
            bound = cooling_bound(J, method)
            self.assertAlmostEqual(bound.value, 1.0, delta=1e-4)
            self.assertFalse(bound.outside_expansion)

    def test_quadrature_matches_closed_form(self):
        for beta in (10, 100, 1000):
            J = SpectralDensity.ohmic(0.3, 1, beta_eff=beta)
            quadrature = cooling_bound(J, QUADRATURE).value
            closed = cooling_bound(J, CLOSED).value
            self.assertAlmostEqual(quadrature / closed, 1, delta=1e-4)

    def test_series_matches_closed_form(self):
        for beta in (100, 300, 1000, 10**4):
            J = SpectralDensity.ohmic(0.3, 1, beta_eff=beta)
            series = cooling_bound(J, SERIES).value
            closed = cooling_bound(J, CLOSED).value
            self.assertAlmostEqual(series / closed, 1, delta=1e-2)

    def test_decreasing_in_beta(self):
        values = [
            cooling_bound(
                SpectralDensity.ohmic(0.3, 1, beta_eff=beta), QUADRATURE
            ).value
            for beta in (0.5, 1, 2, 5, 10, 100)
        ]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

    def test_series_zero_point_floor(self):
        for alpha, omega_c, beta in [(0.3, 1, 0.1), (0.01, 7, 50), (2, 3, 2)]:
            J = SpectralDensity.ohmic(alpha, omega_c, beta_eff=beta)
            self.assertGreaterEqual(
                cooling_bound(J, SERIES).value,
                math.sqrt(alpha / 2) * omega_c,
            )

    def test_closed_form_outside_regime(self):
        J = SpectralDensity.ohmic(0.3, 1, beta_eff=0.5)
        with self.assertLogs('spectra.bounds', level='WARNING'):
            bound = cooling_bound(J, CLOSED)
        self.assertTrue(bound.outside_expansion)
        self.assertTrue(math.isfinite(bound.value))

    def test_tabulated_quadrature(self):
        table = get_ohmic_table(0.3, 1, 0, 50, 20001)
        tabulated = SpectralDensity.tabulated(table, beta_eff=10)
        ohmic = SpectralDensity.ohmic(0.3, 1, beta_eff=10)
        self.assertAlmostEqual(
            cooling_bound(tabulated).value / cooling_bound(ohmic).value,
            1,
            delta=1e-3,
        )

    def test_errors(self):
        with self.assertRaises(DomainError):
            cooling_bound(SpectralDensity.ohmic(0.3, 1))
        tabulated = SpectralDensity.tabulated([(1, 1), (2, 1)], beta_eff=1)
        with self.assertRaises(DomainError):
            cooling_bound(tabulated, CLOSED)
        with self.assertRaises(DomainError):
            cooling_bound(SpectralDensity.ohmic(0.3, 1, 1), 'pade')


class HyperfineTests(SimpleTestCase):
    def test_spin_coupling_spectrum(self):
        values = la.eigvalsh(spin_coupling_operator().matrix)
        np.testing.assert_allclose(
            values, [-1.5, 0.5, 0.5, 0.5], atol=1e-12
        )

    def test_examples(self):
        self.assertEqual(hyperfine_bound(HyperfineModel(1, 1, (0, 0))), 0)
        single = HyperfineModel(A_hf=2, v0=0.5, weights=(1,))
        self.assertAlmostEqual(hyperfine_bound(single), 1.5)
        self.assertAlmostEqual(hyperfine_exact_norm(single), 1.5, delta=1e-12)
        pair = HyperfineModel(A_hf=2, v0=0.5, weights=(0.5, 0.5))
        self.assertAlmostEqual(hyperfine_bound(pair), 1.5)

    def test_random_weights(self):
        rng = np.random.default_rng(5)
        for trial in range(1000):
            sites = int(rng.integers(1, 7))
            weights = rng.dirichlet(np.ones(sites)) * rng.random()
            model = HyperfineModel(
                A_hf=float(rng.uniform(0.1, 3)),
                v0=float(rng.uniform(0.1, 3)),
                weights=tuple(weights),
            )
            bound = hyperfine_bound(model)
            self.assertLessEqual(bound, 1.5 * model.A_hf * model.v0 + 1e-12)
            if trial < 100:
                self.assertLessEqual(
                    hyperfine_exact_norm(model), bound + 1e-9
                )

    def test_validation(self):
        with self.assertRaises(DomainError):
            HyperfineModel(1, 1, (0.7, 0.7))
        with self.assertRaises(DomainError):
            HyperfineModel(1, 1, (-0.1,))
        with self.assertRaises(DomainError):
            hyperfine_exact_norm(HyperfineModel(1, 1, (0.1,) * 7))


class SpectralTableTests(SimpleTestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)

    def write(self, text):
        path = os.path.join(self.tmpdir.name, 'table.csv')
        with open(path, 'w') as f:
            f.write(text)
        return path

    def test_read(self):
        path = self.write('omega,J\n0,0\n1,0.5\n2,0.25\n')
        self.assertEqual(
            read_spectral_table(path), ((0, 0), (1, 0.5), (2, 0.25))
        )

    def test_missing_column(self):
        path = self.write('omega,spectrum\n0,0\n')
        with self.assertRaises(DomainError):
            read_spectral_table(path)

    def test_blank_cell(self):
        path = self.write('omega,J\n0.1,0.03\n0.5,\n1.0,0.11\n')
        with self.assertRaisesMessage(DomainError, 'lines [3]'):
            read_spectral_table(path)
