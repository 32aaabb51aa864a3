"""
Sweep configuration and the per-quantity row evaluators.

Every quantity is evaluated independently at each point of a uniform ``Bz``
grid with both endpoints included. Numerical degeneracies never abort a
sweep: they are recorded as per-row flags and reported once as a warning.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from django.db import models
from django.utils.translation import gettext_lazy as _

from linalg.exceptions import DomainError
from probe_protocol.avoided_crossing import Method, ProtocolRun, branch_fidelities, overlap_at
from probe_protocol.level_crossing import overlap_level_crossing
from probe_qpt.conf import get_setting
from probe_qpt.records import SweepResult, map_ordered
from spin_model.chain import ChainSpec, spectrum
from spin_model.entanglement import ground_state_concurrence
from spin_model.two_level import sensitivity

logger = logging.getLogger(__name__)

DEGENERATE = 'degenerate'

Row = tuple[tuple[float, ...], tuple[str, ...]]


class Quantity(models.TextChoices):
    SPECTRUM = 'spectrum', _('Espectro')
    CONCURRENCE = 'concurrence', _('Concorrência')
    OVERLAP_LC = 'overlap-lc', _('Sobreposição (cruzamento de níveis)')
    OVERLAP_AC = 'overlap-ac', _('Sobreposição (cruzamento evitado)')
    SENSITIVITY = 'sensitivity', _('Sensibilidade')
    TROTTER_FIDELITY = 'trotter-fidelity', _('Fidelidade de Trotter')


# level-crossing quantities default to a vanishing transverse field
ZERO_BX_QUANTITIES = {Quantity.SPECTRUM, Quantity.CONCURRENCE, Quantity.OVERLAP_LC}


@dataclass(frozen=True)
class SweepConfig:
    """
    Parameters of a sweep.

    ``bx=None`` selects the quantity's default transverse field: zero for the
    level-crossing quantities, ``DEFAULT_BX`` otherwise. The other ``None``
    fields fall back to their ``DEFAULT_*`` settings.
    """
    quantity: Quantity
    bz_min: float | None = None
    bz_max: float | None = None
    steps: int | None = None
    bx: float | None = None
    eps: float | None = None
    tau: float | None = None
    n: int = 2
    method: Method = Method.EXACT
    trotter_steps: int | None = None
    compare: bool = False
    parallel: bool = False

    def __post_init__(self) -> None:
        try:
            quantity = Quantity(self.quantity)
            method = Method(self.method)
        except ValueError as exc:
            raise DomainError(_("Configuração inválida: {error}").format(error=exc))
        defaults = {
            'bz_min': get_setting('DEFAULT_BZ_MIN'),
            'bz_max': get_setting('DEFAULT_BZ_MAX'),
            'steps': get_setting('DEFAULT_STEPS'),
            'bx': 0.0 if quantity in ZERO_BX_QUANTITIES else get_setting('DEFAULT_BX'),
            'eps': get_setting('DEFAULT_EPS'),
            'tau': get_setting('DEFAULT_TAU'),
            'trotter_steps': get_setting('DEFAULT_TROTTER_STEPS'),
        }
        for name, default in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)
        object.__setattr__(self, 'quantity', quantity)
        object.__setattr__(self, 'method', method)
        object.__setattr__(self, 'steps', int(self.steps))
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'trotter_steps', int(self.trotter_steps))
        for name in ('bz_min', 'bz_max', 'bx', 'eps', 'tau'):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(_("Parâmetro {name} não finito").format(name=name))
            object.__setattr__(self, name, value)
        self._validate()

    def _validate(self) -> None:
        if self.steps < 1:
            raise DomainError(_("--steps deve ser >= 1, recebido {steps}").format(steps=self.steps))
        if self.steps == 1 and self.bz_min != self.bz_max:
            raise DomainError(_("Com --steps 1 é preciso --bz-min igual a --bz-max"))
        if self.steps > 1 and not self.bz_min < self.bz_max:
            raise DomainError(
                _("Intervalo inválido: --bz-min {low} deve ser menor que --bz-max {high}").format(
                    low=self.bz_min, high=self.bz_max
                )
            )
        if self.quantity in (Quantity.OVERLAP_LC, Quantity.SENSITIVITY) and self.n != 2:
            raise DomainError(
                _("{quantity} só está definida para n=2").format(quantity=self.quantity.value)
            )
        if self.quantity == Quantity.OVERLAP_LC and self.bx != 0:
            raise DomainError(_("overlap-lc requer Bx = 0"))
        if self.quantity == Quantity.OVERLAP_LC and not self.eps > 0:
            raise DomainError(_("overlap-lc requer eps > 0"))
        if self.quantity == Quantity.SENSITIVITY and not self.bx > 0:
            raise DomainError(_("sensitivity requer Bx > 0"))
        if self.compare and self.quantity != Quantity.OVERLAP_AC:
            raise DomainError(_("--compare só se aplica a overlap-ac"))
        # build a probe-coupled chain once to surface parameter errors before the sweep
        ChainSpec(n=self.n, bx=self.bx, eps=self.eps, with_probe=True)
        self.protocol_run()

    def grid(self) -> np.ndarray:
        return np.linspace(self.bz_min, self.bz_max, self.steps)

    def chain(self, bz: float) -> ChainSpec:
        return ChainSpec(n=self.n, bz=bz, bx=self.bx, eps=self.eps)

    def protocol_run(self, bz: float = 0.0) -> ProtocolRun:
        return ProtocolRun(self.chain(bz), self.tau, self.method, self.trotter_steps)

    def echo(self) -> dict:
        """The configuration as written into the output files."""
        echo = dataclasses.asdict(self)
        echo.pop('parallel')
        echo['quantity'] = self.quantity.value
        echo['method'] = self.method.value
        return echo


def _spectrum_row(config: SweepConfig, bz: float) -> Row:
    values = spectrum(config.chain(bz))
    flags = (DEGENERATE,) if values[1] - values[0] < get_setting('DEGENERACY_TOL') else ()
    return tuple(values), flags


def _concurrence_row(config: SweepConfig, bz: float) -> Row:
    value, degenerate = ground_state_concurrence(config.chain(bz))
    return (value,), (DEGENERATE,) if degenerate else ()


def _overlap_lc_row(config: SweepConfig, bz: float) -> Row:
    result = overlap_level_crossing(bz, config.eps)
    return (result.value,), (DEGENERATE,) if result.degenerate else ()


def _overlap_ac_row(config: SweepConfig, bz: float) -> Row:
    run = config.protocol_run(bz)
    if not config.compare:
        return (overlap_at(run),), ()
    exact = overlap_at(run.replace(method=Method.EXACT))
    trotter = overlap_at(run.replace(method=Method.TROTTER))
    fidelity = branch_fidelities(run, with_gate=False)
    return (exact, trotter, fidelity.worst), ()


def _sensitivity_row(config: SweepConfig, bz: float) -> Row:
    return (sensitivity(bz, config.bx),), ()


def _trotter_fidelity_row(config: SweepConfig, bz: float) -> Row:
    fidelity = branch_fidelities(config.protocol_run(bz))
    return (fidelity.plus, fidelity.minus, fidelity.gate), ()


EVALUATORS: dict[Quantity, Callable[[SweepConfig, float], Row]] = {
    Quantity.SPECTRUM: _spectrum_row,
    Quantity.CONCURRENCE: _concurrence_row,
    Quantity.OVERLAP_LC: _overlap_lc_row,
    Quantity.OVERLAP_AC: _overlap_ac_row,
    Quantity.SENSITIVITY: _sensitivity_row,
    Quantity.TROTTER_FIDELITY: _trotter_fidelity_row,
}


def columns_for(config: SweepConfig) -> tuple[str, ...]:
    if config.quantity == Quantity.SPECTRUM:
        return ('bz',) + tuple(f'e{k}' for k in range(1, 2 ** config.n + 1))
    if config.quantity == Quantity.CONCURRENCE:
        return ('bz', 'C')
    if config.quantity == Quantity.OVERLAP_AC and config.compare:
        return ('bz', 'L_exact', 'L_trotter', 'fidelity')
    if config.quantity == Quantity.SENSITIVITY:
        return ('bz', 'sensitivity')
    if config.quantity == Quantity.TROTTER_FIDELITY:
        return ('bz', 'fidelity_plus', 'fidelity_minus', 'gate_fidelity')
    return ('bz', 'L')


def run(config: SweepConfig) -> SweepResult:
    """
    Evaluates ``config.quantity`` on every grid point, in grid order.

    Raises:
        DomainError: If a row violates a precondition of its quantity.
    """
    evaluate = EVALUATORS[config.quantity]
    grid = [float(bz) for bz in config.grid()]
    logger.debug("Varredura %s com %d pontos", config.quantity.value, len(grid))
    evaluated = map_ordered(lambda bz: evaluate(config, bz), grid, parallel=config.parallel)
    rows = [(bz,) + values for bz, (values, _flags) in zip(grid, evaluated)]
    flags = {index: row_flags for index, (_values, row_flags) in enumerate(evaluated) if row_flags}
    if flags:
        logger.warning(
            "%d de %d pontos de %s sinalizados: %s",
            len(flags), len(grid), config.quantity.value,
            ', '.join(sorted({name for names in flags.values() for name in names})),
        )
    return SweepResult.build(config.echo(), columns_for(config), rows, flags)
