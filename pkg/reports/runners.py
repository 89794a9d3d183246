"""One runner per command: validate parameters, compute, fill a Report"""
import json
import logging

import numpy as np
from django.conf import settings
from rest_framework import serializers as drf

from baths.decoherence import fidelity_decay, spectral_width
from concatenation.propagation import lemma8_property_check, propagate_errors
from concatenation.serializers import (
    FaultSetSerializer,
    LayoutSerializer,
    ScheduleSerializer,
)
from concatenation.sparseness import is_sparse, is_sparse_qubits
from faults.expansion import (
    fault_path_sweep,
    lemma1_sweep,
    lemma2_sweep,
    random_fault_path,
    random_spread_circuit,
    verify_spread_identity,
)
from ftnm.exceptions import DomainError
from operators.linalg import op_norm, pauli, random_hermitian
from operators.models import Operator
from spectra.bounds import (
    MAX_HYPERFINE_SITES,
    cooling_bound,
    energy_bound,
    hyperfine_bound,
    hyperfine_exact_norm,
    read_spectral_table,
    reorg_integral,
)
from spectra.models import (
    CLOSED,
    QUADRATURE,
    SERIES,
    HyperfineModel,
    SpectralDensity,
)
from thresholds.models import ThresholdParams
from thresholds.recursion import (
    compare_base_rules,
    empirical_threshold,
    fixed_point,
    iterate_recursion,
    probabilistic_threshold,
    required_level,
    threshold_value,
)

from . import serializers
from .models import Report, RunConfig

logger = logging.getLogger(__name__)


class Runner:
    """Base class for commands"""
    command = None
    serializer_class = None

    def get_serializer(self, parameters: dict) -> drf.Serializer:
        return self.serializer_class(data=parameters)

    def execute(self, config: RunConfig) -> Report:
        """Raises ValidationError for bad parameters, FtnmError on failure"""
        seed = config.seed
        serializer = self.get_serializer(config.parameters)
        serializer.is_valid(raise_exception=True)
        params = serializer.validated_data
        report = Report(command=self.command, seed=seed, parameters=params)
        logger.debug('Running %s seed=%d: %s', self.command, seed, params)
        self.fill(report, params, seed)
        logger.info(
            '%s finished, failed checks: %s',
            self.command, report.failed_checks or 'none',
        )
        return report

    def fill(self, report: Report, params: dict, seed: int) -> None:
        """Adds result tables and verdicts to the report"""
        raise NotImplementedError


class LayoutMixin:
    """Builds circuit objects from validated parameters and records them
    as documents, which read back as config parameters"""
    @staticmethod
    def get_layout(report: Report, params: dict):
        layout = LayoutSerializer().create(params['layout'])
        report.add_document('layout', LayoutSerializer(layout).data)
        return layout

    @staticmethod
    def get_faults(report: Report, params: dict):
        faults = FaultSetSerializer().create(params)
        report.add_document('faults', FaultSetSerializer(faults).data)
        return faults

    @staticmethod
    def get_schedule(report: Report, params: dict) -> dict[int, str]:
        schedule = ScheduleSerializer().create(params)
        report.add_document('schedule', ScheduleSerializer(schedule).data)
        return schedule


class SpectralWidthRunner(Runner):
    command = 'spectral-width'
    serializer_class = serializers.SpectralWidthSerializer

    def fill(self, report, params, seed):
        if 'matrix' in params:
            H = Operator(np.array(params['matrix'], dtype=complex))
        else:
            H = random_hermitian(params['dim'], np.random.default_rng(seed))
        summary = spectral_width(H)
        minimal = op_norm(H.shifted(summary.alpha_opt))
        spread = 2 * summary.delta + 1
        shifts = np.linspace(
            summary.alpha_opt - spread,
            summary.alpha_opt + spread,
            params['shift_scan'],
        )
        scanned = min(
            (op_norm(H.shifted(float(a))) for a in shifts), default=minimal
        )
        report.add_table('spectrum', [{
            'dim': H.dim,
            'mu_min': summary.mu_min,
            'mu_max': summary.mu_max,
            'delta': summary.delta,
            'alpha_opt': summary.alpha_opt,
            'minimal_norm': minimal,
            'min_scanned_norm': scanned,
        }])
        slack = settings.FTNM_NORM_ATOL
        report.add_verdict(
            'minimal norm equals delta', abs(minimal - summary.delta) <= slack
        )
        report.add_verdict(
            'no scanned shift beats alpha_opt', scanned >= minimal - slack
        )


class FidelityRunner(Runner):
    command = 'fidelity'
    serializer_class = serializers.FidelitySerializer

    def fill(self, report, params, seed):
        if 'coupling' in params:
            H = Operator(np.array(params['coupling'], dtype=complex))
        else:
            H = pauli('ZZ')
        rows = []
        for t in params['times']:
            result = fidelity_decay(H, t, params['samples'], seed)
            rows.append({
                't': t,
                'delta_t': result.delta * t,
                'analytic_floor': result.analytic_floor,
                'min_sampled_fidelity': result.min_sampled_fidelity,
                'worst_state_fidelity': result.worst_state_fidelity,
                'samples': result.n_samples,
            })
            report.add_verdict(f'fidelity floor t={t:g}', result.passed())
        report.add_table('fidelity', rows)


class VerifyBoundsRunner(Runner):
    command = 'verify-bounds'
    serializer_class = serializers.VerifyBoundsSerializer

    @staticmethod
    def sweep_row(sweep) -> dict:
        return {
            'check': sweep.name,
            'trials': sweep.trials,
            'violations': sweep.violations,
            'max_ratio': sweep.max_ratio,
        }

    def fill(self, report, params, seed):
        rows = []
        for qubits in params['n_system_qubits']:
            sweep = lemma2_sweep(
                seed=seed,
                trials=params['trials'],
                n_system_qubits=qubits,
                bath_dim=params['bath_dim'],
                t0_range=(params['t0_min'], params['t0_max']),
                lambda0=params['lambda0'],
                bound_scale=params['bound_scale'],
            )
            rows.append(self.sweep_row(sweep))
            report.add_verdict(sweep.name, sweep.passed)
        report.add_table('gate_fault_bounds', rows)
        self.fill_tail_bounds(report, params, seed)
        self.fill_fault_paths(report, params, seed)

    def fill_tail_bounds(self, report, params, seed):
        if not params['tail_trials']:
            return
        sweeps = [
            lemma1_sweep(seed, params['tail_trials'], n, k, eps, unitary)
            for n in range(1, params['tail_factors'] + 1)
            for k in range(n + 1)
            for eps in params['eps']
            for unitary in (True, False)
        ]
        report.add_table(
            'binomial_tail_bounds', [self.sweep_row(s) for s in sweeps]
        )
        report.add_verdict(
            'binomial tail bound', all(s.passed for s in sweeps)
        )

    def fill_fault_paths(self, report, params, seed):
        if not params['fault_path_trials']:
            return
        rows = []
        for eta in params['eta']:
            for qubits in params['n_system_qubits']:
                sweep = fault_path_sweep(
                    seed=seed,
                    trials=params['fault_path_trials'],
                    n_locations=params['fault_path_locations'],
                    n_system_qubits=qubits,
                    bath_dim=params['bath_dim'],
                    eta=eta,
                )
                rows.append(self.sweep_row(sweep))
                report.add_verdict(sweep.name, sweep.passed)
        report.add_table('fault_path_bounds', rows)


class SpreadIdentityRunner(Runner):
    command = 'spread-identity'
    serializer_class = serializers.SpreadIdentitySerializer

    def fill(self, report, params, seed):
        rows = []
        children = np.random.SeedSequence(seed).spawn(len(params['faults']))
        for k, child in zip(params['faults'], children):
            rng = np.random.default_rng(child)
            worst = 0.0
            for _ in range(params['trials']):
                circuit = random_spread_circuit(
                    rng, bath_dim=params['bath_dim']
                )
                path = random_fault_path(rng, circuit, k)
                worst = max(worst, verify_spread_identity(circuit, path))
            rows.append({
                'faults': k,
                'trials': params['trials'],
                'max_distance': worst,
            })
            report.add_verdict(
                f'spread identity k={k}', worst <= settings.FTNM_NORM_ATOL
            )
        report.add_table('spread_identity', rows)


class SparseCheckRunner(LayoutMixin, Runner):
    command = 'sparse-check'
    serializer_class = serializers.SparseCheckSerializer

    def fill(self, report, params, seed):
        layout = self.get_layout(report, params)
        faults = self.get_faults(report, params)
        level = params.get('level', layout.r)
        report.add_table('sparseness', [{
            'leaf_count': layout.leaf_count,
            'faults': len(faults),
            'level': level,
            'sparse': is_sparse(faults, layout, level),
        }])


class PropagateRunner(LayoutMixin, Runner):
    command = 'propagate'
    serializer_class = serializers.PropagateSerializer

    def fill(self, report, params, seed):
        layout = self.get_layout(report, params)
        if 'trials' in params:
            result = lemma8_property_check(layout, params['trials'], seed)
            report.add_table('sparse_faults_property', [{
                'r': result.r,
                'trials': result.trials,
                'rejected': result.rejected,
                'violations': result.violations,
            }])
            report.add_verdict(
                'sparse faults leave sparse errors', result.passed
            )
            return

        faults = self.get_faults(report, params)
        schedule = self.get_schedule(report, params)
        state = propagate_errors(layout, faults, schedule)
        report.add_table('periods', [
            {
                'period': period,
                'errors': len(errors),
                'sparse': is_sparse_qubits(errors, layout.code, layout.r),
                'descriptor': json.dumps(state.descriptor(period)),
            }
            for period, errors in enumerate(state.periods)
        ])
        report.add_table('failed_rectangles', [
            {'level': level, 'index': index}
            for level, index in sorted(state.failed)
        ])


class ThresholdRunner(Runner):
    command = 'threshold'
    serializer_class = serializers.ThresholdSerializer

    def fill(self, report, params, seed):
        rows = []
        for A_C in params['A_C']:
            row = {
                'A_C': A_C,
                'threshold': threshold_value(A_C),
                'probabilistic_threshold': probabilistic_threshold(A_C),
                'fixed_point': fixed_point(A_C),
            }
            if params['empirical']:
                empirical = empirical_threshold(
                    A_C, params['base_rule'], params['tol']
                )
                row['empirical_threshold'] = empirical
                report.add_verdict(
                    f'empirical >= formula A_C={A_C}',
                    empirical >= row['threshold'],
                )
            rows.append(row)
        report.add_table('thresholds', rows)


class RecursionRunner(Runner):
    command = 'recursion'
    serializer_class = serializers.RecursionSerializer

    def fill(self, report, params, seed):
        threshold_params = ThresholdParams(
            A_C=params['A_C'],
            eta=params['eta'],
            epsilon_target=params['epsilon_target'],
        )
        trace = iterate_recursion(
            threshold_params, params['r_max'], params['base_rule']
        )
        report.add_table('trace', [
            {'r': level.r, 'x_r': level.x, 'log_x_r': level.log_x}
            for level in trace.levels
        ])
        report.add_table('summary', [{
            'threshold': threshold_value(params['A_C']),
            'converged': trace.converged,
            'diverged': trace.diverged,
        }])
        report.add_table('base_rules', [
            {'base_rule': rule, 'x_1': x}
            for rule, x in compare_base_rules(
                params['A_C'], params['eta']
            ).items()
        ])


class LevelRunner(Runner):
    command = 'level'
    serializer_class = serializers.LevelSerializer

    def fill(self, report, params, seed):
        result = required_level(
            ThresholdParams(
                A_C=params['A_C'],
                eta=params['eta'],
                N=params['N'],
                epsilon_target=params['epsilon'],
            ),
            params['base_rule'],
        )
        report.add_table('level', [{
            'r': result.r,
            'total_locations': result.total_locations,
            'eps_prime': result.eps_prime,
            'x_r': result.x_r,
            'global_bad': result.global_bad,
        }])


class SpinBosonRunner(Runner):
    command = 'spinboson'
    serializer_class = serializers.SpinBosonSerializer

    def get_density(self, params, beta_eff=None) -> SpectralDensity:
        if 'table' not in params:
            return SpectralDensity.ohmic(
                params['alpha'], params['omega_c'], beta_eff
            )
        try:
            table = read_spectral_table(params['table'])
        except (OSError, ValueError) as e:
            raise DomainError(f'table: cannot read {params["table"]}: {e}')
        return SpectralDensity.tabulated(table, beta_eff)

    def fill(self, report, params, seed):
        J = self.get_density(params)
        report.add_table('energy', [{
            'reorg_integral': reorg_integral(J),
            'bath_energy': params['bath_energy'],
            'energy_bound': energy_bound(J, params['bath_energy']),
        }])
        rows = []
        for beta in params['beta_eff']:
            J = self.get_density(params, beta)
            row = {'beta_eff': beta, QUADRATURE: cooling_bound(J).value}
            if 'table' not in params:
                closed = cooling_bound(J, CLOSED)
                row[CLOSED] = closed.value
                row[SERIES] = cooling_bound(J, SERIES).value
                row['outside_expansion'] = closed.outside_expansion
                if not closed.outside_expansion:
                    agreement = abs(row[QUADRATURE] / closed.value - 1)
                    report.add_verdict(
                        f'quadrature matches closed form beta={beta:g}',
                        agreement <= 1e-4,
                    )
            rows.append(row)
        if rows:
            report.add_table('cooling', rows)


class HyperfineRunner(Runner):
    command = 'hyperfine'
    serializer_class = serializers.HyperfineSerializer

    def fill(self, report, params, seed):
        model = HyperfineModel(
            A_hf=params['A_hf'],
            v0=params['v0'],
            weights=tuple(params['weights']),
        )
        bound = hyperfine_bound(model, params.get('kappa'))
        row = {'sites': len(model.weights), 'bound': bound}
        if len(model.weights) <= MAX_HYPERFINE_SITES:
            exact = hyperfine_exact_norm(model)
            row['exact_norm'] = exact
            report.add_verdict(
                'exact norm within bound',
                exact <= bound + settings.FTNM_BOUND_SLACK,
            )
        report.add_table('hyperfine', [row])


RUNNERS = {
    runner.command: runner
    for runner in (
        SpectralWidthRunner,
        FidelityRunner,
        VerifyBoundsRunner,
        SpreadIdentityRunner,
        SparseCheckRunner,
        PropagateRunner,
        ThresholdRunner,
        RecursionRunner,
        LevelRunner,
        SpinBosonRunner,
        HyperfineRunner,
    )
}
