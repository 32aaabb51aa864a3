"""
Parameter sweeps over the longitudinal field.

Usage::

    python manage.py sweep overlap-ac --bx 0.1 --eps 0.2 --tau 1.6 --method trotter
    python manage.py sweep spectrum --steps 1 --bz-min 0 --bz-max 0 --format json

Data goes to standard output (or ``--out``); diagnostics go to standard error.
"""

import logging

from django.core.management.base import BaseCommand, CommandError

from linalg.exceptions import DomainError
from probe_protocol.avoided_crossing import Method
from sweeps.emitters import emit, emit_xlsx
from sweeps.runner import Quantity, SweepConfig, run

logger = logging.getLogger('sweeps')

USAGE_ERROR = 2


def _compare_modes(value: str) -> bool:
    modes = {mode.strip() for mode in value.split(',')}
    if modes != {Method.EXACT.value, Method.TROTTER.value}:
        raise CommandError(
            f"--compare aceita apenas 'exact,trotter', recebido '{value}'", returncode=USAGE_ERROR
        )
    return True


class Command(BaseCommand):
    help = 'Varre Bz e emite os dados teóricos de uma grandeza (CSV, JSON ou Excel).'

    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('quantity', choices=Quantity.values, help='Grandeza a calcular.')
        parser.add_argument('--bz-min', type=float, help='Limite inferior de Bz (inclusivo).')
        parser.add_argument('--bz-max', type=float, help='Limite superior de Bz (inclusivo).')
        parser.add_argument('--steps', type=int, help='Número de pontos da grade uniforme.')
        parser.add_argument('--bx', type=float, help='Campo transversal.')
        parser.add_argument('--eps', type=float, help='Acoplamento da sonda.')
        parser.add_argument('--tau', type=float, help='Tempo de evolução.')
        parser.add_argument('--n', type=int, default=2, help='Número de spins do sistema.')
        parser.add_argument('--method', choices=Method.values, default=Method.EXACT.value)
        parser.add_argument('--trotter-steps', type=int, help='Repetições do produto de Trotter.')
        parser.add_argument(
            '--compare', metavar='exact,trotter',
            help='overlap-ac: emite as duas curvas e a fidelidade por ponto.',
        )
        parser.add_argument('--format', choices=['csv', 'json', 'xlsx'], default='csv')
        parser.add_argument('--out', default='', help='Ficheiro de saída; vazio para stdout.')
        parser.add_argument('--parallel', action='store_true', help='Avalia os pontos em paralelo.')
        parser.add_argument(
            '--no-metadata', action='store_true',
            help='Omite versão e data de geração para saídas byte a byte reprodutíveis.',
        )

    def handle(self, *args, **options):
        if options['verbosity'] >= 2:
            logger.setLevel(logging.DEBUG)
        fmt = options['format']
        out = options['out']
        if fmt == 'xlsx' and not out:
            raise CommandError('--format xlsx requer --out', returncode=USAGE_ERROR)

        try:
            config = SweepConfig(
                quantity=options['quantity'],
                bz_min=options['bz_min'],
                bz_max=options['bz_max'],
                steps=options['steps'],
                bx=options['bx'],
                eps=options['eps'],
                tau=options['tau'],
                n=options['n'],
                method=options['method'],
                trotter_steps=options['trotter_steps'],
                compare=_compare_modes(options['compare']) if options['compare'] else False,
                parallel=options['parallel'],
            )
            result = run(config)
        except DomainError as exc:
            raise CommandError('; '.join(str(message) for message in exc.messages), returncode=USAGE_ERROR)

        include_metadata = not options['no_metadata']
        try:
            if fmt == 'xlsx':
                emit_xlsx(result, out, include_metadata)
                return
            payload = emit(result, fmt, include_metadata)
            if out:
                with open(out, 'w', encoding='utf-8', newline='') as handle:
                    handle.write(payload)
            else:
                self.stdout.write(payload, ending='')
        except OSError as exc:
            raise CommandError(f"Não foi possível escrever '{out}': {exc}", returncode=USAGE_ERROR)
