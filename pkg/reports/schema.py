"""Config schema: OpenAPI objects of the command serializers"""
from django.conf import settings
from rest_framework.schemas.openapi import AutoSchema

from .models import COMMANDS
from .runners import RUNNERS
from .serializers import ComplexField, RunConfigSerializer

NUMBER = {'type': 'number'}


class ConfigSchema(AutoSchema):
    """Maps serializers without a view; matrix entries become oneOf"""

    def map_field(self, field):
        if isinstance(field, ComplexField):
            return {'oneOf': [NUMBER, {
                'type': 'array', 'items': NUMBER,
                'minItems': 2, 'maxItems': 2,
            }]}
        return super().map_field(field)


def command_schema(command: str) -> dict:
    serializer = RUNNERS[command].serializer_class()
    return ConfigSchema().map_serializer(serializer)


def config_schema() -> dict:
    return {
        'version': settings.FTNM_VERSION,
        'schema_version': settings.FTNM_SCHEMA_VERSION,
        'reserved': ConfigSchema().map_serializer(RunConfigSerializer()),
        'commands': {name: command_schema(name) for name in COMMANDS},
    }


def type_name(schema: dict) -> str:
    if 'enum' in schema:
        return 'one of ' + ', '.join(str(value) for value in schema['enum'])
    if 'oneOf' in schema:
        return ' or '.join(type_name(option) for option in schema['oneOf'])
    if schema.get('type') == 'array':
        return f'array of {type_name(schema["items"])}'
    if 'properties' in schema:
        return 'object {' + ', '.join(schema['properties']) + '}'
    if 'additionalProperties' in schema:
        return f'object of {type_name(schema["additionalProperties"])}'
    return schema.get('type', 'any')


def command_help(command: str) -> list[str]:
    """One line per parameter for the --help epilog"""
    schema = command_schema(command)
    required = set(schema.get('required', ()))
    lines = []
    for name, prop in schema['properties'].items():
        line = f'{name}: {type_name(prop)}'
        if 'default' in prop:
            line += f' = {prop["default"]}'
        elif name not in required:
            line += ' (optional)'
        lines.append(line)
    return lines
