from rest_framework import serializers

from ftnm.exceptions import DomainError

from .models import PHASES, CircuitLayout, CodeModel, FaultSet, Rectangle


class LayoutSerializer(serializers.Serializer):
    """Serializer for CircuitLayout"""
    N = serializers.IntegerField(min_value=1)
    r = serializers.IntegerField(min_value=0)
    A_C = serializers.IntegerField(min_value=2)
    m = serializers.IntegerField(min_value=1)

    def to_representation(self, instance: CircuitLayout) -> dict:
        return {
            'N': instance.N,
            'r': instance.r,
            'A_C': instance.code.A_C,
            'm': instance.code.m,
            'leaf_count': instance.leaf_count,
            'tree': [rectangle_to_dict(node) for node in instance.tree],
        }

    def create(self, validated_data: dict) -> CircuitLayout:
        try:
            return CircuitLayout(
                N=validated_data['N'],
                r=validated_data['r'],
                code=CodeModel(
                    m=validated_data['m'], A_C=validated_data['A_C']
                ),
            )
        except DomainError as e:
            raise serializers.ValidationError(str(e))


def rectangle_to_dict(node: Rectangle) -> dict:
    data = {'level': node.level, 'index': node.index}
    if node.children:
        data['children'] = [rectangle_to_dict(c) for c in node.children]
    else:
        data['leaves'] = list(node.leaves)
    return data


def location_ids_field(**kwargs) -> serializers.ListField:
    return serializers.ListField(
        child=serializers.IntegerField(min_value=0), **kwargs
    )


def phases_field(**kwargs) -> serializers.DictField:
    return serializers.DictField(
        child=serializers.ChoiceField(choices=PHASES), **kwargs
    )


class FaultSetSerializer(serializers.Serializer):
    """Serializer for FaultSet; pass the layout in context to bound ids"""
    faults = location_ids_field(allow_empty=True)

    def validate_faults(self, value: list[int]) -> list[int]:
        layout = self.context.get('layout')
        if layout is not None:
            invalid = [leaf for leaf in value if leaf >= layout.leaf_count]
            if invalid:
                raise serializers.ValidationError(
                    f'Unknown locations {sorted(invalid)}, '
                    f'layout has {layout.leaf_count}'
                )
        return value

    def to_representation(self, instance: FaultSet) -> dict:
        return {'faults': sorted(instance.faulty_leaves)}

    def create(self, validated_data: dict) -> FaultSet:
        return FaultSet(frozenset(validated_data['faults']))


class ScheduleSerializer(serializers.Serializer):
    """Phase of each faulty location, keyed by location id"""
    schedule = phases_field(allow_empty=True)

    def validate_schedule(self, value: dict) -> dict[int, str]:
        try:
            return {int(leaf): phase for leaf, phase in value.items()}
        except ValueError:
            raise serializers.ValidationError('Location ids must be integers')

    def to_representation(self, instance: dict[int, str]) -> dict:
        schedule = {str(leaf): instance[leaf] for leaf in sorted(instance)}
        return {'schedule': schedule}

    def create(self, validated_data: dict) -> dict[int, str]:
        return validated_data['schedule']
