"""
Serialisation of sweep results to CSV, JSON and Excel workbooks.

CSV and JSON payloads are deterministic: floats are written with
``FLOAT_DIGITS`` significant digits, JSON keys are sorted and lines end in
``\\n``. Only the metadata timestamp changes between identical runs, and it
can be left out.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any

import openpyxl
from django.core.serializers.json import DjangoJSONEncoder
from openpyxl.styles import Font
from openpyxl.utils import get_column_letter

from probe_qpt.conf import get_setting
from probe_qpt.records import SweepResult

VOLATILE_METADATA = ('tool_version', 'generated_at')


def format_float(value: float) -> str:
    """Shortest decimal up to ``FLOAT_DIGITS`` significant digits; ``-0`` prints as ``0``."""
    text = '{:.{digits}g}'.format(float(value), digits=get_setting('FLOAT_DIGITS'))
    return '0' if text == '-0' else text


def _rounded(value: float) -> float:
    return float(format_float(value))


def emit_csv(result: SweepResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([format_float(value) for value in row])
    return buffer.getvalue()


def _metadata(result: SweepResult, include_metadata: bool) -> dict[str, Any]:
    metadata = dict(result.metadata)
    if not include_metadata:
        for key in VOLATILE_METADATA:
            metadata.pop(key, None)
    metadata['flags'] = {str(index): list(names) for index, names in sorted(result.flags.items())}
    return metadata


def emit_json(result: SweepResult, include_metadata: bool = True) -> str:
    """A single object ``{config, columns, rows, metadata}`` with sorted keys."""
    payload = {
        'config': result.config,
        'columns': list(result.columns),
        'rows': [[_rounded(value) for value in row] for row in result.rows],
        'metadata': _metadata(result, include_metadata),
    }
    return json.dumps(payload, cls=DjangoJSONEncoder, sort_keys=True, indent=2) + '\n'


def emit_xlsx(result: SweepResult, path: str | Path, include_metadata: bool = True) -> None:
    """
    Writes a workbook with a ``dados`` sheet (header plus rows) and a
    ``configuracao`` sheet listing the configuration and metadata.
    """
    workbook = openpyxl.Workbook()
    sheet = workbook.active
    sheet.title = 'dados'
    sheet.append(list(result.columns))
    for cell in sheet[1]:
        cell.font = Font(bold=True)
    for row in result.rows:
        sheet.append([_rounded(value) for value in row])
    for index in range(1, len(result.columns) + 1):
        sheet.column_dimensions[get_column_letter(index)].width = 16

    info = workbook.create_sheet('configuracao')
    info.append(['parametro', 'valor'])
    for key, value in sorted(result.config.items()):
        info.append([key, value])
    for key, value in sorted(_metadata(result, include_metadata).items()):
        info.append([key, json.dumps(value, cls=DjangoJSONEncoder, sort_keys=True)])
    workbook.save(path)


def emit(result: SweepResult, fmt: str, include_metadata: bool = True) -> str:
    """Text payload for ``csv`` or ``json``."""
    if fmt == 'json':
        return emit_json(result, include_metadata)
    return emit_csv(result)


def parse_csv(text: str) -> tuple[tuple[str, ...], list[tuple[float, ...]]]:
    reader = csv.reader(io.StringIO(text))
    header, *rows = list(reader)
    return tuple(header), [tuple(float(value) for value in row) for row in rows]


def parse_json(text: str) -> dict[str, Any]:
    payload = json.loads(text)
    payload['rows'] = [tuple(row) for row in payload['rows']]
    payload['columns'] = tuple(payload['columns'])
    return payload
