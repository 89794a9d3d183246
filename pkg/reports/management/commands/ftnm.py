import json
from argparse import RawDescriptionHelpFormatter
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from ftnm.exceptions import FtnmError
from reports.models import COMMANDS, FORMATS, RunConfig
from reports.rendering import render
from reports.runners import RUNNERS
from reports.schema import command_help, config_schema
from reports.serializers import RunConfigSerializer

RESERVED_KEYS = ('command', 'seed', 'format', 'output_path')

CONFIG_ERROR = 2
CHECK_FAILED = 1


def reject_constant(name: str):
    raise ValueError(f'{name} is not a finite number')


def format_errors(detail, prefix: str = '') -> list[str]:
    """Flattens DRF error details into 'field: message' lines"""
    if isinstance(detail, dict):
        lines = []
        for key, value in detail.items():
            name = prefix if key == 'non_field_errors' else (
                f'{prefix}.{key}' if prefix else str(key)
            )
            lines.extend(format_errors(value, name))
        return lines
    if isinstance(detail, list):
        lines = []
        for item in detail:
            lines.extend(format_errors(item, prefix))
        return lines
    return [f'{prefix or "config"}: {detail}']


class Command(BaseCommand):
    help = 'Run one ftnm check or calculator and write its report'

    def create_parser(self, prog_name, subcommand, **kwargs):
        lines = ['commands and their parameters:']
        for name in COMMANDS:
            lines.append(f'  {name}')
            lines.extend(f'      {line}' for line in command_help(name))
        kwargs.setdefault('formatter_class', RawDescriptionHelpFormatter)
        kwargs.setdefault('epilog', '\n'.join(lines))
        return super().create_parser(prog_name, subcommand, **kwargs)

    def add_arguments(self, parser):
        parser.add_argument(
            'command', nargs='?', choices=COMMANDS,
            help='Command to run; may also be given in the config file',
        )
        parser.add_argument('--config', help='JSON config file')
        parser.add_argument('--out', dest='output_path', help='Report file')
        parser.add_argument('--format', choices=FORMATS)
        parser.add_argument('--seed', type=int)
        parser.add_argument(
            '--schema', action='store_true',
            help='Print the versioned config schema and exit',
        )

    def load_config(self, path: str | None) -> dict:
        if path is None:
            return {}
        try:
            config = json.loads(
                Path(path).read_text(), parse_constant=reject_constant
            )
        except OSError as e:
            raise CommandError(
                f'config: cannot read {path}: {e}', returncode=CONFIG_ERROR
            )
        except ValueError as e:
            raise CommandError(
                f'config: {path} is not valid JSON: {e}',
                returncode=CONFIG_ERROR,
            )
        if not isinstance(config, dict):
            raise CommandError(
                'config: expected a JSON object', returncode=CONFIG_ERROR
            )
        return config

    def merge(self, config: dict, options: dict) -> RunConfig:
        """Reserved keys from options override the config file"""
        command = options.get('command')
        if command and config.get('command', command) != command:
            raise CommandError(
                f'command: {command!r} conflicts with {config["command"]!r} '
                f'in the config file',
                returncode=CONFIG_ERROR,
            )
        reserved = {key: config[key] for key in RESERVED_KEYS if key in config}
        for key in RESERVED_KEYS:
            if options.get(key) is not None:
                reserved[key] = options[key]
        serializer = RunConfigSerializer(data=reserved)
        if not serializer.is_valid():
            raise CommandError(
                '\n'.join(format_errors(serializer.errors)),
                returncode=CONFIG_ERROR,
            )
        return RunConfig(
            parameters={
                key: value for key, value in config.items()
                if key not in RESERVED_KEYS
            },
            **serializer.validated_data,
        )

    def handle(self, *args, **options):
        if options['schema']:
            self.stdout.write(
                json.dumps(config_schema(), indent=2, sort_keys=True)
            )
            return

        config = self.load_config(options['config'])
        run = self.merge(config, options)
        runner = RUNNERS[run.command]()
        try:
            report = runner.execute(run)
        except serializers.ValidationError as e:
            raise CommandError(
                '\n'.join(format_errors(e.detail)), returncode=CONFIG_ERROR
            )
        except FtnmError as e:
            raise CommandError(
                f'{run.command}: {e}', returncode=CONFIG_ERROR
            )

        text = render(report, run.format)
        output_path = run.output_path
        if output_path:
            try:
                Path(output_path).write_text(text)
            except OSError as e:
                raise CommandError(
                    f'output_path: cannot write {output_path}: {e}',
                    returncode=CONFIG_ERROR,
                )
        else:
            self.stdout.write(text, ending='')

        if not report.passed:
            raise CommandError(
                'Failed checks: ' + ', '.join(report.failed_checks),
                returncode=CHECK_FAILED,
            )
