import math
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import openpyxl
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from linalg.exceptions import DomainError
from probe_protocol.avoided_crossing import Method
from probe_qpt.records import SweepResult, map_ordered
from .emitters import emit_csv, emit_json, format_float, parse_csv, parse_json
from .runner import Quantity, SweepConfig, columns_for, run


def sweep(*args):
    out = StringIO()
    call_command('sweep', *args, stdout=out, stderr=StringIO())
    return out.getvalue()


class SweepCommandTests(SimpleTestCase):

    def test_level_crossing_step_function(self):
        output = sweep('overlap-lc', '--bz-min=-2', '--bz-max=2', '--steps=5', '--eps=0.2')
        self.assertEqual(output, 'bz,L\n-2,1\n-1,0\n0,1\n1,0\n2,1\n')

    def test_sensitivity_peak(self):
        output = sweep('sensitivity', '--bx=0.1', '--bz-min=1', '--bz-max=1', '--steps=1')
        self.assertEqual(output, 'bz,sensitivity\n1,7.07106781187\n')

    def test_spectrum_single_point(self):
        output = sweep('spectrum', '--steps=1', '--bz-min=0', '--bz-max=0')
        self.assertEqual(output, 'bz,e1,e2,e3,e4\n0,-1,-1,1,1\n')

    def test_avoided_crossing_minima(self):
        for eps in ('0.2', '0.3'):
            output = sweep('overlap-ac', '--bx=0.1', f'--eps={eps}', '--tau=1.6', '--steps=81', '--method=trotter')
            _header, rows = parse_csv(output)
            self.assertEqual(len(rows), 81)
            for half, critical in ((rows[:40], -1.0), (rows[41:], 1.0)):
                lowest = min(half, key=lambda row: row[1])
                self.assertEqual(lowest[0], critical)

    def test_json_without_metadata_is_reproducible(self):
        args = ('overlap-ac', '--steps=7', '--format=json', '--no-metadata')
        first, second = sweep(*args), sweep(*args)
        self.assertEqual(first, second)
        payload = parse_json(first)
        self.assertEqual(payload['columns'], ('bz', 'L'))
        self.assertEqual(len(payload['rows']), 7)
        self.assertNotIn('generated_at', payload['metadata'])
        self.assertEqual(payload['config']['method'], 'exact')
        self.assertEqual(payload['config']['bx'], 0.1)

    def test_json_metadata(self):
        payload = parse_json(sweep('spectrum', '--steps=1', '--bz-min=0', '--bz-max=0', '--format=json'))
        self.assertIn('tool_version', payload['metadata'])
        self.assertIn('generated_at', payload['metadata'])
        self.assertEqual(payload['metadata']['grid'], {'bz_min': 0.0, 'bz_max': 0.0, 'steps': 1})
        self.assertEqual(payload['metadata']['flags'], {'0': ['degenerate']})

    def test_parallel_matches_sequential(self):
        args = ('overlap-ac', '--steps=9', '--method=trotter')
        self.assertEqual(sweep(*args), sweep(*args, '--parallel'))

    def test_compare_columns(self):
        header, rows = parse_csv(sweep('overlap-ac', '--steps=3', '--compare=exact,trotter'))
        self.assertEqual(header, ('bz', 'L_exact', 'L_trotter', 'fidelity'))
        self.assertEqual(len(rows), 3)
        for row in rows:
            self.assertGreater(row[3], 0.9)
            self.assertLessEqual(row[3], 1.0)

    def test_trotter_fidelity_columns(self):
        header, rows = parse_csv(sweep('trotter-fidelity', '--steps=2', '--bz-min=0', '--bz-max=1'))
        self.assertEqual(header, ('bz', 'fidelity_plus', 'fidelity_minus', 'gate_fidelity'))
        for row in rows:
            for value in row[1:]:
                self.assertGreater(value, 0.0)
                self.assertLessEqual(value, 1.0)

    def test_longer_chain_spectrum(self):
        header, rows = parse_csv(sweep('spectrum', '--n=3', '--steps=3', '--bx=0.1'))
        self.assertEqual(len(header), 1 + 8)
        for row in rows:
            self.assertEqual(list(row[1:]), sorted(row[1:]))

    def test_out_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'curva.csv'
            self.assertEqual(sweep('concurrence', '--steps=3', f'--out={path}'), '')
            header, rows = parse_csv(path.read_text(encoding='utf-8'))
        self.assertEqual(header, ('bz', 'C'))
        self.assertEqual([row[0] for row in rows], [-2.0, 0.0, 2.0])
        self.assertAlmostEqual(rows[1][1], 1.0, places=10)

    def test_xlsx_workbook(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'curva.xlsx'
            sweep('overlap-lc', '--steps=5', '--format=xlsx', f'--out={path}')
            workbook = openpyxl.load_workbook(path)
        self.assertEqual(workbook.sheetnames, ['dados', 'configuracao'])
        rows = list(workbook['dados'].iter_rows(values_only=True))
        self.assertEqual(rows[0], ('bz', 'L'))
        self.assertEqual([row[1] for row in rows[1:]], [1, 0, 1, 0, 1])
        self.assertTrue(workbook['dados']['A1'].font.bold)
        parameters = {row[0]: row[1] for row in workbook['configuracao'].iter_rows(min_row=2, values_only=True)}
        self.assertEqual(parameters['quantity'], 'overlap-lc')

    def test_usage_errors(self):
        cases = [
            ('overlap-ac', '--steps=0'),
            ('overlap-ac', '--bz-min=1', '--bz-max=-1'),
            ('overlap-ac', '--steps=1'),
            ('overlap-lc', '--bx=0.1'),
            ('overlap-lc', '--n=3'),
            ('sensitivity', '--bx=0'),
            ('overlap-ac', '--tau=-1'),
            ('overlap-ac', '--eps=-0.2'),
            ('overlap-ac', '--compare=exact'),
            ('spectrum', '--compare=exact,trotter'),
            ('overlap-ac', '--format=xlsx'),
            ('overlap-ac', '--out=/nonexistent/directory/curva.csv'),
        ]
        for args in cases:
            with self.subTest(args=args), self.assertRaises(CommandError) as caught:
                sweep(*args)
            self.assertEqual(caught.exception.returncode, 2)

    def test_degenerate_points_are_reported(self):
        with self.assertLogs('sweeps.runner', 'WARNING') as logs:
            sweep('concurrence', '--steps=5')
        self.assertIn('degenerate', logs.output[0])


class SweepConfigTests(SimpleTestCase):

    def test_defaults(self):
        config = SweepConfig(Quantity.OVERLAP_AC)
        self.assertEqual((config.bz_min, config.bz_max, config.steps), (-2.0, 2.0, 81))
        self.assertEqual((config.bx, config.eps, config.tau), (0.1, 0.2, 1.6))
        self.assertEqual(config.method, Method.EXACT)
        self.assertEqual(SweepConfig('spectrum').bx, 0.0)

    @override_settings(QPT_PROBE={'DEFAULT_STEPS': 11, 'DEFAULT_TAU': 0.5})
    def test_defaults_from_settings(self):
        config = SweepConfig(Quantity.OVERLAP_AC)
        self.assertEqual(config.steps, 11)
        self.assertEqual(config.tau, 0.5)

    def test_grid_endpoints(self):
        grid = SweepConfig(Quantity.SPECTRUM, bz_min=-1.3, bz_max=2.7, steps=37).grid()
        self.assertEqual(grid[0], -1.3)
        self.assertEqual(grid[-1], 2.7)
        self.assertEqual(len(grid), 37)

    def test_echo(self):
        echo = SweepConfig('overlap-ac', method='trotter').echo()
        self.assertEqual(echo['quantity'], 'overlap-ac')
        self.assertEqual(echo['method'], 'trotter')
        self.assertNotIn('parallel', echo)

    def test_invalid(self):
        cases = [
            {'quantity': 'magnetisation'},
            {'quantity': 'overlap-ac', 'method': 'runge-kutta'},
            {'quantity': 'overlap-ac', 'bz_min': math.nan},
            {'quantity': 'overlap-ac', 'trotter_steps': 0},
            {'quantity': 'overlap-lc', 'eps': 0.0},
            {'quantity': 'sensitivity', 'n': 3},
        ]
        for kwargs in cases:
            with self.subTest(**kwargs), self.assertRaises(DomainError):
                SweepConfig(**kwargs)

    def test_columns(self):
        self.assertEqual(columns_for(SweepConfig('spectrum', n=3))[-1], 'e8')
        self.assertEqual(columns_for(SweepConfig('overlap-ac', compare=True))[1:], ('L_exact', 'L_trotter', 'fidelity'))

    def test_run_keeps_grid_order(self):
        result = run(SweepConfig('sensitivity', steps=21, bz_min=0, bz_max=2, parallel=True))
        self.assertEqual(result.grid, sorted(result.grid))
        values = result.column('sensitivity')
        self.assertEqual(values.index(max(values)), 10)


class SweepResultTests(SimpleTestCase):

    def test_build(self):
        result = SweepResult.build({'quantity': 'teste'}, ('bz', 'L'), [(0, 1), (1, 0.5)], {1: ('degenerate',), 0: ()})
        self.assertEqual(result.rows, ((0.0, 1.0), (1.0, 0.5)))
        self.assertEqual(result.flags, {1: ('degenerate',)})
        self.assertEqual(result.metadata['grid']['steps'], 2)

    def test_invalid_rows(self):
        cases = [
            (('L', 'bz'), [(0, 1)]),
            (('bz', 'L'), [(0, 1), (1,)]),
            (('bz', 'L'), [(1, 1), (0, 1)]),
            (('bz', 'L'), [(0, 1), (0, 1)]),
        ]
        for columns, rows in cases:
            with self.subTest(columns=columns, rows=rows), self.assertRaises(DomainError):
                SweepResult.build({}, columns, rows)

    def test_map_ordered(self):
        items = list(range(40))
        self.assertEqual(map_ordered(lambda x: x * x, items, parallel=True, workers=8), [x * x for x in items])
        self.assertEqual(map_ordered(abs, [], parallel=True), [])


class EmitterTests(SimpleTestCase):

    def test_format_float(self):
        self.assertEqual(format_float(-0.0), '0')
        self.assertEqual(format_float(0.1 + 0.2), '0.3')
        self.assertEqual(format_float(-1e-20), '-1e-20')
        self.assertEqual(format_float(2.0), '2')

    def test_csv_round_trip(self):
        result = SweepResult.build({}, ('bz', 'L'), [(-0.5, 0.25), (0.5, 1 / 3)])
        header, rows = parse_csv(emit_csv(result))
        self.assertEqual(header, ('bz', 'L'))
        self.assertEqual(rows[0], (-0.5, 0.25))
        self.assertAlmostEqual(rows[1][1], 1 / 3, places=11)

    def test_json_sorted_keys(self):
        result = SweepResult.build({'tau': 1.6, 'bx': 0.1}, ('bz', 'L'), [(0, 1)])
        text = emit_json(result, include_metadata=False)
        self.assertLess(text.index('"bx"'), text.index('"tau"'))
        self.assertTrue(text.endswith('}\n'))
        self.assertEqual(parse_json(text)['rows'], [(0.0, 1.0)])


class RandomConfigRoundTripTests(SimpleTestCase):

    def random_config(self, rng: np.random.Generator) -> SweepConfig:
        quantity = Quantity(rng.choice(Quantity.values))
        kwargs = {
            'bz_min': float(rng.uniform(-2, 0)),
            'bz_max': float(rng.uniform(0.1, 2)),
            'steps': int(rng.integers(2, 6)),
            'eps': float(rng.uniform(0.05, 0.4)),
            'tau': float(rng.uniform(0.1, 2)),
            'method': rng.choice(Method.values),
            'trotter_steps': int(rng.integers(1, 4)),
        }
        if quantity == Quantity.OVERLAP_LC:
            kwargs.update(bx=0.0, n=2)
        elif quantity == Quantity.SENSITIVITY:
            kwargs.update(bx=float(rng.uniform(0.05, 0.3)), n=2)
        else:
            kwargs.update(bx=float(rng.uniform(0, 0.3)), n=int(rng.integers(2, 4)))
        if quantity == Quantity.OVERLAP_AC:
            kwargs['compare'] = bool(rng.integers(0, 2))
        return SweepConfig(quantity, **kwargs)

    def test_csv_and_json_agree_with_rounded_rows(self):
        for seed in range(100):
            config = self.random_config(np.random.default_rng(seed))
            result = run(config)
            expected = [tuple(float(format_float(value)) for value in row) for row in result.rows]
            with self.subTest(seed=seed, quantity=config.quantity.value):
                header, rows = parse_csv(emit_csv(result))
                self.assertEqual(header, result.columns)
                self.assertEqual(rows, expected)
                payload = parse_json(emit_json(result, include_metadata=False))
                self.assertEqual(payload['columns'], result.columns)
                self.assertEqual(payload['rows'], expected)
                self.assertEqual(payload['config'], result.config)
                self.assertEqual(payload['config'], config.echo())
