import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from rest_framework.exceptions import ValidationError

from .management.commands.ftnm import Command
from .models import COMMANDS, Report, RunConfig
from .rendering import plain, render, render_body
from .runners import RUNNERS

FIXTURES = Path(__file__).resolve().parent / 'fixtures'


def read_section(text, title):
    """Rows of a CSV section of a report"""
    lines = text.splitlines()
    start = lines.index(title) + 1
    end = next(
        (i for i in range(start, len(lines)) if lines[i].startswith('#')),
        len(lines),
    )
    return list(csv.DictReader(lines[start:end]))


def read_table(text, name):
    return read_section(text, f'# table {name}')


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)

    def write_config(self, config):
        path = os.path.join(self.tmpdir.name, 'config.json')
        with open(path, 'w') as f:
            json.dump(config, f)
        return path

    def run_command(
        self, *args, config=None, fixture=None, path=None, **options
    ):
        if path is not None:
            options['config'] = path
        elif fixture is not None:
            options['config'] = str(FIXTURES / fixture)
        elif config is not None:
            options['config'] = self.write_config(config)
        out = io.StringIO()
        call_command('ftnm', *args, stdout=out, **options)
        return out.getvalue()

    def assertExitCode(self, code, *args, **kwargs):
        with self.assertRaises(CommandError) as cm:
            self.run_command(*args, **kwargs)
        self.assertEqual(cm.exception.returncode, code)
        return cm.exception


class ReportTests(CommandTestCase):
    def test_header_and_threshold_row(self):
        text = self.run_command(fixture='threshold.json')
        self.assertRegex(
            text.splitlines()[0],
            r'^# ftnm \S+ schema \S+ generated \d{4}-\d\d-\d\dT.*Z$',
        )
        [row] = read_table(text, 'thresholds')
        self.assertEqual(row['A_C'], '10')
        self.assertAlmostEqual(float(row['threshold']), 4.0876e-3, delta=1e-7)

    def test_sparse_check_is_a_query(self):
        text = self.run_command(fixture='sparse_check.json')
        [row] = read_table(text, 'sparseness')
        self.assertEqual(row['sparse'], 'False')
        self.assertNotIn('# verdicts', text)

    def test_verify_bounds_pass(self):
        text = self.run_command(fixture='verify_bounds.json')
        rows = read_table(text, 'gate_fault_bounds')
        self.assertEqual([row['violations'] for row in rows], ['0', '0'])
        tails = read_table(text, 'binomial_tail_bounds')
        self.assertEqual(len(tails), 56)
        self.assertEqual({row['violations'] for row in tails}, {'0'})
        paths = read_table(text, 'fault_path_bounds')
        self.assertEqual(len(paths), 4)
        for row in paths:
            self.assertLessEqual(float(row['max_ratio']), 1 + 1e-9)
        verdicts = read_section(text, '# verdicts')
        self.assertEqual(len(verdicts), 7)
        self.assertEqual({row['passed'] for row in verdicts}, {'True'})

    def test_verify_bounds_without_extra_sweeps(self):
        text = self.run_command(
            config={
                'command': 'verify-bounds', 'trials': 5, 'bath_dim': 2,
                'tail_trials': 0, 'fault_path_trials': 0,
            },
        )
        self.assertNotIn('# table binomial_tail_bounds', text)
        self.assertNotIn('# table fault_path_bounds', text)
        self.assertEqual(len(read_section(text, '# verdicts')), 2)

    def test_json_format(self):
        text = self.run_command(
            fixture='threshold_empirical.json', format='json'
        )
        document = json.loads(text.split('\n', 1)[1])
        self.assertTrue(document['passed'])
        self.assertEqual(document['command'], 'threshold')
        self.assertEqual(len(document['tables']['thresholds']), 5)
        for row in document['tables']['thresholds']:
            self.assertGreaterEqual(
                row['empirical_threshold'], row['threshold']
            )

    def test_output_path(self):
        path = os.path.join(self.tmpdir.name, 'report.csv')
        out = self.run_command(fixture='recursion.json', output_path=path)
        self.assertEqual(out, '')
        text = Path(path).read_text()
        self.assertEqual(len(read_table(text, 'trace')), 8)

    def test_propagate_schedule(self):
        text = self.run_command(fixture='propagate_schedule.json')
        periods = read_table(text, 'periods')
        self.assertEqual([row['errors'] for row in periods], ['5', '5'])
        self.assertEqual(
            [row['sparse'] for row in periods], ['False', 'False']
        )
        failed = read_table(text, 'failed_rectangles')
        self.assertEqual(
            failed,
            [{'level': '1', 'index': '0'}, {'level': '1', 'index': '1'}],
        )

    def test_layout_documents(self):
        text = self.run_command(fixture='propagate_schedule.json')
        prefix = '# document layout '
        [line] = [x for x in text.splitlines() if x.startswith(prefix)]
        layout = json.loads(line[len(prefix):])
        self.assertEqual(layout['leaf_count'], 10)
        self.assertEqual(
            [node['level'] for node in layout['tree']], [1, 1]
        )
        self.assertIn('# document faults {"faults": [0, 1, 2, 7]}', text)

    def test_documents_read_back_as_config(self):
        text = self.run_command(
            fixture='propagate_schedule.json', format='json'
        )
        report = json.loads(text.split('\n', 1)[1])
        documents = report['documents']
        config = {
            'command': 'propagate',
            'layout': documents['layout'],
            **documents['faults'],
            **documents['schedule'],
        }
        again = json.loads(
            self.run_command(config=config, format='json').split('\n', 1)[1]
        )
        self.assertEqual(again['tables'], report['tables'])
        self.assertEqual(again['documents'], documents)

    def test_propagate_property(self):
        text = self.run_command(fixture='propagate.json')
        [row] = read_table(text, 'sparse_faults_property')
        self.assertEqual(row['violations'], '0')

    def test_other_commands(self):
        for fixture, table in [
            ('level.json', 'level'),
            ('spinboson.json', 'cooling'),
            ('hyperfine.json', 'hyperfine'),
            ('spread_identity.json', 'spread_identity'),
            ('fidelity.json', 'fidelity'),
            ('spectral_width.json', 'spectrum'),
        ]:
            text = self.run_command(fixture=fixture)
            self.assertTrue(read_table(text, table), fixture)

    def test_tabulated_spin_boson(self):
        text = self.run_command(config={
            'command': 'spinboson',
            'table': str(FIXTURES / 'ohmic_table.csv'),
            'beta_eff': [10],
        })
        [energy] = read_table(text, 'energy')
        self.assertAlmostEqual(
            float(energy['reorg_integral']), 0.3, delta=1e-3
        )

    def test_command_argument(self):
        text = self.run_command('hyperfine', config={
            'A_hf': 2, 'v0': 0.5, 'weights': [1],
        })
        [row] = read_table(text, 'hyperfine')
        self.assertAlmostEqual(float(row['bound']), 1.5)
        self.assertAlmostEqual(float(row['exact_norm']), 1.5)


class DeterminismTests(CommandTestCase):
    def test_identical_bodies(self):
        fixtures = sorted(
            path.name for path in FIXTURES.glob('*.json')
            if path.name != 'injected_violation.json'
        )
        self.assertEqual(len(fixtures), 13)
        for fixture in fixtures:
            first = self.run_command(fixture=fixture)
            second = self.run_command(fixture=fixture)
            self.assertEqual(
                first.split('\n', 1)[1], second.split('\n', 1)[1], fixture
            )

    def test_seed_changes_body(self):
        first = self.run_command(fixture='spectral_width.json')
        second = self.run_command(fixture='spectral_width.json', seed=12)
        self.assertNotEqual(first.split('\n', 1)[1], second.split('\n', 1)[1])


class ExitCodeTests(CommandTestCase):
    def test_injected_violation(self):
        error = self.assertExitCode(1, fixture='injected_violation.json')
        self.assertIn('gate fault', str(error))

    def test_unknown_command(self):
        error = self.assertExitCode(2, config={'command': 'simulate'})
        self.assertIn('command', str(error))

    def test_missing_parameter(self):
        error = self.assertExitCode(2, config={
            'command': 'level', 'A_C': 10, 'eta': 1e-3, 'epsilon': 0.1,
        })
        self.assertIn('N:', str(error))

    def test_nested_parameter(self):
        error = self.assertExitCode(2, config={
            'command': 'sparse-check',
            'layout': {'N': 1, 'r': 1, 'A_C': 1, 'm': 5},
        })
        self.assertIn('layout.A_C', str(error))

    def test_unknown_location(self):
        error = self.assertExitCode(2, config={
            'command': 'sparse-check',
            'layout': {'N': 1, 'r': 1, 'A_C': 5, 'm': 5},
            'faults': [0, 99],
        })
        self.assertIn('faults: Unknown locations [99]', str(error))

    def test_missing_phase(self):
        error = self.assertExitCode(2, config={
            'command': 'propagate',
            'layout': {'N': 1, 'r': 1, 'A_C': 5, 'm': 5},
            'faults': [0, 1],
            'schedule': {'0': 'pre-EC'},
        })
        self.assertIn(
            'schedule: No phase for faulty locations [1]', str(error)
        )

    def test_bad_phase(self):
        error = self.assertExitCode(2, config={
            'command': 'propagate',
            'layout': {'N': 1, 'r': 1, 'A_C': 5, 'm': 5},
            'faults': [0],
            'schedule': {'0': 'mid-gate'},
        })
        self.assertIn('schedule.0', str(error))

    def test_non_finite_constant(self):
        path = os.path.join(self.tmpdir.name, 'nan.json')
        Path(path).write_text('{"command": "threshold", "A_C": NaN}')
        error = self.assertExitCode(2, path=path)
        self.assertIn('not a finite number', str(error))

    def test_unreadable_config(self):
        self.assertExitCode(
            2, path=os.path.join(self.tmpdir.name, 'missing.json')
        )

    def test_invalid_json(self):
        path = os.path.join(self.tmpdir.name, 'broken.json')
        Path(path).write_text('{"command": ')
        self.assertExitCode(2, path=path)

    def test_conflicting_command(self):
        self.assertExitCode(2, 'threshold', fixture='level.json')

    def test_library_error(self):
        error = self.assertExitCode(2, config={
            'command': 'level', 'N': 1, 'A_C': 10, 'eta': 0.1,
            'epsilon': 0.1,
        })
        self.assertIn('threshold', str(error))

    def test_unreadable_table(self):
        error = self.assertExitCode(2, config={
            'command': 'spinboson', 'table': 'no/such/table.csv',
        })
        self.assertIn('table', str(error))

    def test_non_hermitian_matrix(self):
        self.assertExitCode(2, config={
            'command': 'spectral-width', 'matrix': [[0, 1], [0, 0]],
        })
        self.assertExitCode(2, config={
            'command': 'spectral-width', 'matrix': [[0, 1], [1]],
        })


class SchemaTests(CommandTestCase):
    def test_schema_document(self):
        schema = json.loads(self.run_command(schema=True))
        self.assertEqual(sorted(schema['commands']), sorted(COMMANDS))
        self.assertEqual(schema['schema_version'], '1')
        sparse = schema['commands']['sparse-check']
        layout = sparse['properties']['layout']
        self.assertEqual(layout['type'], 'object')
        self.assertEqual(layout['required'], ['N', 'r', 'A_C', 'm'])
        self.assertEqual(layout['properties']['A_C']['minimum'], 2)
        self.assertEqual(sparse['required'], ['layout'])
        self.assertEqual(schema['reserved']['required'], ['command'])

    def test_matrix_entries_are_numbers_or_pairs(self):
        schema = json.loads(self.run_command(schema=True))
        matrix = schema['commands']['spectral-width']['properties']['matrix']
        self.assertEqual(matrix['type'], 'array')
        entry = matrix['items']['items']
        self.assertEqual(entry['oneOf'][0], {'type': 'number'})
        self.assertEqual(entry['oneOf'][1]['maxItems'], 2)

    def test_choices_and_defaults(self):
        schema = json.loads(self.run_command(schema=True))
        bounds = schema['commands']['verify-bounds']['properties']
        self.assertEqual(bounds['n_system_qubits']['items']['enum'], [1, 2])
        self.assertEqual(bounds['eps']['default'], [0.05, 0.1])
        self.assertNotIn('required', schema['commands']['verify-bounds'])

    def test_help_lists_commands(self):
        text = Command().create_parser('manage.py', 'ftnm').format_help()
        for name in COMMANDS:
            self.assertIn(name, text)
        self.assertIn('bound_scale: number = 1.0', text)
        self.assertIn('layout: object {N, r, A_C, m}', text)
        self.assertIn('level: integer (optional)', text)


class RunnerTests(SimpleTestCase):
    def test_every_command_has_a_runner(self):
        self.assertEqual(sorted(RUNNERS), sorted(COMMANDS))

    def test_validation_error(self):
        with self.assertRaises(ValidationError):
            RUNNERS['recursion']().execute(
                RunConfig('recursion', {'A_C': 10})
            )

    def test_threshold_accepts_single_value(self):
        report = RUNNERS['threshold']().execute(
            RunConfig('threshold', {'A_C': 5})
        )
        self.assertEqual(report.tables['thresholds'][0]['A_C'], 5)
        self.assertTrue(report.passed)

    def test_spectral_width_matrix(self):
        report = RUNNERS['spectral-width']().execute(RunConfig(
            'spectral-width', {'matrix': [[1, [0, -1]], [[0, 1], -1]]}
        ))
        [row] = report.tables['spectrum']
        self.assertAlmostEqual(row['delta'], np.sqrt(2))
        self.assertTrue(report.passed)


class MergeTests(SimpleTestCase):
    def test_options_override_config(self):
        run = Command().merge(
            {'command': 'level', 'seed': 4, 'A_C': 10, 'format': 'json'},
            {'command': None, 'seed': 9, 'format': None, 'output_path': None},
        )
        self.assertEqual(
            run,
            RunConfig(
                command='level', parameters={'A_C': 10}, seed=9,
                format='json',
            ),
        )

    def test_defaults(self):
        run = Command().merge({}, {'command': 'threshold'})
        self.assertEqual(run, RunConfig('threshold'))
        self.assertIsNone(run.output_path)


class RenderingTests(SimpleTestCase):
    def get_report(self):
        report = Report(command='threshold', seed=3, parameters={'A_C': [5]})
        report.add_table('rows', [
            {'a': np.int64(1), 'b': np.float64(1 / 3), 'c': True},
        ])
        report.add_verdict('check', np.bool_(False))
        return report

    def test_plain(self):
        self.assertEqual(
            plain({'x': (np.float64(0.5), {1, 0}), 1: 2j}),
            {'x': [0.5, [0, 1]], '1': [0.0, 2.0]},
        )
        self.assertEqual(plain(float('inf')), 'inf')

    def test_csv_body(self):
        report = self.get_report()
        self.assertFalse(report.passed)
        self.assertEqual(
            render_body(report),
            '# command threshold seed 3\n'
            '# input {"A_C": [5]}\n'
            '# table rows\n'
            'a,b,c\n'
            '1,0.333333333333,True\n'
            '# verdicts\n'
            'check,passed\n'
            'check,False\n',
        )

    def test_render_adds_header(self):
        report = self.get_report()
        text = render(report, 'json')
        head, body = text.split('\n', 1)
        self.assertTrue(head.startswith('# ftnm '))
        self.assertEqual(body, render_body(report, 'json'))
        self.assertEqual(json.loads(body)['verdicts'], {'check': False})
