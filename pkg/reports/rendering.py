"""Report serialization: a timestamped header line plus a stable body"""
import io
import json
import math
from collections.abc import Mapping

import numpy as np
import pandas as pd
from django.utils import timezone

from .models import CSV, JSON, Report

FLOAT_FORMAT = '%.12g'


def plain(value):
    """Builtin types only, so that dumps are stable across numpy versions"""
    if isinstance(value, Mapping):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [plain(v) for v in items]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [plain(value.real), plain(value.imag)]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return float(FLOAT_FORMAT % value)
    return value


def header(report: Report) -> str:
    generated = timezone.now().strftime('%Y-%m-%dT%H:%M:%SZ')
    return (
        f'# ftnm {report.version} schema {report.schema_version} '
        f'generated {generated}'
    )


def _csv_table(rows: list[dict]) -> str:
    if not rows:
        return ''
    frame = pd.DataFrame([plain(row) for row in rows])
    return frame.to_csv(
        index=False, float_format=FLOAT_FORMAT, lineterminator='\n'
    )


def render_body(report: Report, fmt: str = CSV) -> str:
    """Everything but the header; identical runs give identical bodies"""
    if fmt == JSON:
        document = {
            'command': report.command,
            'seed': report.seed,
            'input': plain(report.parameters),
            'documents': plain(report.documents),
            'tables': plain(report.tables),
            'verdicts': plain(report.verdicts),
            'passed': report.passed,
            'version': report.version,
            'schema_version': report.schema_version,
        }
        return json.dumps(document, indent=2, sort_keys=True) + '\n'

    out = io.StringIO()
    out.write(f'# command {report.command} seed {report.seed}\n')
    input_echo = json.dumps(plain(report.parameters), sort_keys=True)
    out.write(f'# input {input_echo}\n')
    for name, document in report.documents.items():
        document = json.dumps(plain(document), sort_keys=True)
        out.write(f'# document {name} {document}\n')
    for name, rows in report.tables.items():
        out.write(f'# table {name}\n')
        out.write(_csv_table(rows))
    if report.verdicts:
        out.write('# verdicts\n')
        out.write(_csv_table([
            {'check': name, 'passed': ok}
            for name, ok in report.verdicts.items()
        ]))
    return out.getvalue()


def render(report: Report, fmt: str = CSV) -> str:
    return f'{header(report)}\n{render_body(report, fmt)}'
