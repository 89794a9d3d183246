import math

from rest_framework import serializers

from concatenation.serializers import (
    FaultSetSerializer,
    LayoutSerializer,
    ScheduleSerializer,
    location_ids_field,
    phases_field,
)
from thresholds.models import BASE_RULES, LEMMA2_PRODUCT

from .models import COMMANDS, FORMATS


class ComplexField(serializers.Field):
    """Matrix entry: a real number or a [re, im] pair"""
    default_error_messages = {
        'invalid': 'Expected a number or a [re, im] pair.',
    }

    def to_internal_value(self, data) -> complex:
        if isinstance(data, bool):
            self.fail('invalid')
        if isinstance(data, (int, float)):
            return complex(data)
        if isinstance(data, (list, tuple)) and len(data) == 2:
            try:
                return complex(float(data[0]), float(data[1]))
            except (TypeError, ValueError):
                pass
        self.fail('invalid')

    def to_representation(self, value: complex):
        return [value.real, value.imag]


def check_square(rows: list[list[complex]]) -> list[list[complex]]:
    if any(len(row) != len(rows) for row in rows):
        raise serializers.ValidationError(
            f'Expected a square matrix, got {len(rows)} rows of lengths '
            f'{sorted({len(row) for row in rows})}'
        )
    return rows


def matrix_field(**kwargs):
    return serializers.ListField(
        child=serializers.ListField(child=ComplexField(), min_length=1),
        min_length=1,
        validators=[check_square],
        **kwargs,
    )


class RunConfigSerializer(serializers.Serializer):
    """Reserved keys of a config file"""
    command = serializers.ChoiceField(choices=COMMANDS)
    seed = serializers.IntegerField(min_value=0, default=0)
    format = serializers.ChoiceField(choices=FORMATS, default='csv')
    output_path = serializers.CharField(required=False, allow_null=True)


class SpectralWidthSerializer(serializers.Serializer):
    """Δ and α_opt of a Hermitian operator, checked against a shift scan"""
    matrix = matrix_field(required=False)
    dim = serializers.IntegerField(min_value=1, required=False)
    shift_scan = serializers.IntegerField(min_value=0, default=100)

    def validate(self, data):
        if ('matrix' in data) == ('dim' in data):
            raise serializers.ValidationError(
                'Give exactly one of matrix or dim'
            )
        return data


class FidelitySerializer(serializers.Serializer):
    """Sampled fidelity decay against the cos(Δt) floor"""
    coupling = matrix_field(required=False)
    times = serializers.ListField(
        child=serializers.FloatField(min_value=0),
        default=[0.2, 0.5, 1.0, math.pi / 2],
    )
    samples = serializers.IntegerField(min_value=1, default=1000)


class VerifyBoundsSerializer(serializers.Serializer):
    """Randomized sweeps of the gate fault bound ||E|| ≤ t0·Δ (2·t0·λ0),
    the binomial tail bound and the fault-path norm bound"""
    trials = serializers.IntegerField(min_value=1, default=100)
    bath_dim = serializers.IntegerField(min_value=2, default=8)
    t0_min = serializers.FloatField(min_value=0, default=0.01)
    t0_max = serializers.FloatField(min_value=0, default=0.2)
    lambda0 = serializers.FloatField(min_value=0, default=1.0)
    n_system_qubits = serializers.ListField(
        child=serializers.ChoiceField(choices=(1, 2)), default=[1, 2]
    )
    bound_scale = serializers.FloatField(min_value=0, default=1.0)
    tail_trials = serializers.IntegerField(min_value=0, default=50)
    tail_factors = serializers.IntegerField(
        min_value=1, max_value=4, default=4
    )
    eps = serializers.ListField(
        child=serializers.FloatField(min_value=0), default=[0.05, 0.1]
    )
    fault_path_trials = serializers.IntegerField(min_value=0, default=5)
    fault_path_locations = serializers.IntegerField(
        min_value=1, max_value=3, default=2
    )
    eta = serializers.ListField(
        child=serializers.FloatField(min_value=0), default=[0.01, 0.05]
    )

    def validate_eta(self, value):
        if any(eta <= 0 for eta in value):
            raise serializers.ValidationError('eta must be positive')
        return value

    def validate(self, data):
        if data['t0_min'] > data['t0_max']:
            raise serializers.ValidationError('t0_min exceeds t0_max')
        return data


class SpreadIdentitySerializer(serializers.Serializer):
    """Causal-cone identity on random three-interval circuits"""
    trials = serializers.IntegerField(min_value=1, default=100)
    faults = serializers.ListField(
        child=serializers.IntegerField(min_value=0, max_value=3),
        default=[0, 1, 2],
    )
    bath_dim = serializers.IntegerField(min_value=1, default=2)


class CircuitSerializer(serializers.Serializer):
    """Layout plus faults and schedule checked through the concatenation
    serializers, so errors name the offending field"""
    layout = LayoutSerializer()

    def validate(self, data):
        try:
            layout = LayoutSerializer().create(data['layout'])
        except serializers.ValidationError as e:
            raise serializers.ValidationError({'layout': e.detail})
        if 'faults' in data:
            faults = FaultSetSerializer(
                data={'faults': data['faults']}, context={'layout': layout}
            )
            faults.is_valid(raise_exception=True)
        if 'schedule' in data:
            schedule = ScheduleSerializer(data={'schedule': data['schedule']})
            schedule.is_valid(raise_exception=True)
            data['schedule'] = schedule.validated_data['schedule']
            missing = sorted(
                set(data.get('faults', ())) - set(data['schedule'])
            )
            if missing:
                raise serializers.ValidationError(
                    {'schedule': f'No phase for faulty locations {missing}'}
                )
        return data


class SparseCheckSerializer(CircuitSerializer):
    """(level,1)-sparseness of a fault set"""
    faults = location_ids_field(default=list)
    level = serializers.IntegerField(min_value=0, required=False)


class PropagateSerializer(CircuitSerializer):
    """Error propagation for one schedule, or the sparse-faults property"""
    faults = location_ids_field(required=False)
    schedule = phases_field(required=False)
    trials = serializers.IntegerField(min_value=1, required=False)

    def validate(self, data):
        explicit = 'faults' in data or 'schedule' in data
        if explicit == ('trials' in data):
            raise serializers.ValidationError(
                'Give either faults and schedule, or trials'
            )
        if explicit:
            data.setdefault('faults', [])
            data.setdefault('schedule', {})
        return super().validate(data)


class ThresholdSerializer(serializers.Serializer):
    """Threshold formula, optionally with the empirical boundary"""
    A_C = serializers.ListField(
        child=serializers.IntegerField(min_value=2), min_length=1
    )
    base_rule = serializers.ChoiceField(
        choices=BASE_RULES, default=LEMMA2_PRODUCT
    )
    tol = serializers.FloatField(min_value=0, default=1e-10)
    empirical = serializers.BooleanField(default=False)

    def to_internal_value(self, data):
        if isinstance(data.get('A_C'), int):
            data = {**data, 'A_C': [data['A_C']]}
        return super().to_internal_value(data)

    def validate_tol(self, value: float) -> float:
        if value <= 0:
            raise serializers.ValidationError('tol must be positive')
        return value


class RecursionSerializer(serializers.Serializer):
    """Bad-norm iterates x_r of the concatenation recursion"""
    A_C = serializers.IntegerField(min_value=2)
    eta = serializers.FloatField(min_value=0)
    r_max = serializers.IntegerField(min_value=1, default=10)
    base_rule = serializers.ChoiceField(
        choices=BASE_RULES, default=LEMMA2_PRODUCT
    )
    epsilon_target = serializers.FloatField(default=0.1)

    def validate_epsilon_target(self, value: float) -> float:
        if not 0 < value < 1:
            raise serializers.ValidationError('Must lie in (0, 1)')
        return value


class LevelSerializer(serializers.Serializer):
    """Smallest concatenation level reaching a target output accuracy"""
    N = serializers.IntegerField(min_value=1)
    A_C = serializers.IntegerField(min_value=2)
    eta = serializers.FloatField(min_value=0)
    epsilon = serializers.FloatField()
    base_rule = serializers.ChoiceField(
        choices=BASE_RULES, default=LEMMA2_PRODUCT
    )

    def validate_epsilon(self, value: float) -> float:
        if not 0 < value < 1:
            raise serializers.ValidationError('Must lie in (0, 1)')
        return value


class SpinBosonSerializer(serializers.Serializer):
    """Energy and cooling bounds for a bosonic bath"""
    alpha = serializers.FloatField(min_value=0, required=False)
    omega_c = serializers.FloatField(required=False)
    table = serializers.CharField(required=False)
    beta_eff = serializers.ListField(
        child=serializers.FloatField(), default=list
    )
    bath_energy = serializers.FloatField(min_value=0, default=0.0)

    def validate_omega_c(self, value: float) -> float:
        if value <= 0:
            raise serializers.ValidationError('Must be positive')
        return value

    def validate_beta_eff(self, value: list[float]) -> list[float]:
        if any(beta <= 0 for beta in value):
            raise serializers.ValidationError('Must be positive')
        return value

    def validate(self, data):
        ohmic = 'alpha' in data and 'omega_c' in data
        if ohmic == ('table' in data):
            raise serializers.ValidationError(
                'Give either alpha and omega_c, or a table'
            )
        return data


class HyperfineSerializer(serializers.Serializer):
    """Hyperfine coupling bound κ·A·v0·Σ|ψ_s(i)|²"""
    A_hf = serializers.FloatField(min_value=0)
    v0 = serializers.FloatField(min_value=0)
    weights = serializers.ListField(
        child=serializers.FloatField(min_value=0), min_length=1
    )
    kappa = serializers.FloatField(min_value=0, required=False)

    def validate_weights(self, value: list[float]) -> list[float]:
        if sum(value) > 1 + 1e-12:
            raise serializers.ValidationError(
                f'Weights sum to {sum(value)} > 1'
            )
        return value
