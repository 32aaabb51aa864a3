"""
Two-level description of the chain near an avoided crossing.

Close to ``|Bz| = 1`` only two triplet levels matter: the mid-phase state
``|φ+>`` and the fully polarised state ``|ll>`` (``|11>`` for ``Bz >= 0``,
``|00>`` for ``Bz < 0``). In the basis ``(|ll>, |φ+>)`` the chain reduces to

    H_eff = -|Bz| I + (1 - |Bz|) σz + √2 Bx σx

whose ground state is ``cos(φ/2)|ll> - sin(φ/2)|φ+>``. The mixing angle
``φ = atan2(√2 Bx, |Bz| - 1)`` lies in ``[0, π]``, equals ``π/2`` at the
critical field and tends to ``π`` (pure ``|φ+>``) inside the mid phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from django.utils.translation import gettext_lazy as _

from linalg.exceptions import DegeneracyError, DomainError
from linalg.operators import DenseOperator, StateVector

SQRT2 = math.sqrt(2)


def _check_fields(bz: float, bx: float) -> None:
    if not (math.isfinite(bz) and math.isfinite(bx)):
        raise DomainError(_("Campos Bz e Bx devem ser finitos"))
    if bx < 0:
        raise DomainError(_("Campo transversal Bx deve ser >= 0, recebido {bx}").format(bx=bx))


def mixing_angle(bz: float, bx: float) -> float:
    """
    Mixing angle ``φ ∈ [0, π]`` of the two-level ground state.

    The ``|ll>`` weight of the ground state is ``cos²(φ/2)``; the angle is
    exactly ``π/2`` whenever ``|Bz| = 1``.

    Raises:
        DegeneracyError: For ``Bx = 0`` at ``|Bz| = 1``, where both levels cross.
    """
    _check_fields(bz, bx)
    detuning = abs(bz) - 1.0
    if detuning == 0.0:
        if bx == 0:
            raise DegeneracyError(
                _("Ângulo de mistura indefinido: cruzamento exato em Bz={bz} com Bx=0").format(bz=bz)
            )
        return math.pi / 2
    return math.atan2(SQRT2 * bx, detuning)


def sensitivity(bz: float, bx: float) -> float:
    """
    Rate at which the two-level basis rotates with the field, ``|dφ/d|Bz||``.

    A Lorentzian in ``|Bz|`` centred on the critical field, with peak
    ``1/(√2 Bx)`` and full width at half maximum ``2√2 Bx``.
    """
    _check_fields(bz, bx)
    if bx == 0:
        raise DomainError(_("A sensibilidade requer Bx > 0"))
    return SQRT2 * bx / (2 * bx ** 2 + (1.0 - abs(bz)) ** 2)


def effective_hamiltonian(bz: float, bx: float) -> np.ndarray:
    """The 2x2 ``H_eff`` in the basis ``(|ll>, |φ+>)``."""
    _check_fields(bz, bx)
    detuning = 1.0 - abs(bz)
    return np.array([
        [-abs(bz) + detuning, SQRT2 * bx],
        [SQRT2 * bx, -abs(bz) - detuning],
    ])


@dataclass(frozen=True)
class EffectiveTwoLevel:
    """
    Attributes:
        bz: Longitudinal field.
        splitting_gap: Distance between the two levels, ``2√2 Bx`` at criticality.
        phi: Mixing angle in ``[0, π]``.
    """
    bz: float
    splitting_gap: float
    phi: float

    @property
    def polarised_bits(self) -> str:
        """Bit string of ``|ll>``."""
        return '11' if self.bz >= 0 else '00'

    def ground_state(self, labels: tuple[int, int] = (1, 2)) -> StateVector:
        """The two-level ground state embedded in the two-spin register."""
        amplitudes = np.zeros(4, dtype=complex)
        amplitudes[int(self.polarised_bits, 2)] = math.cos(self.phi / 2)
        amplitudes[1] = amplitudes[2] = -math.sin(self.phi / 2) / SQRT2
        return StateVector.normalized(amplitudes, labels)

    def hamiltonian(self, labels: tuple[int, int] = (1, 2)) -> DenseOperator:
        """``H_eff`` lifted to the two-spin register, zero outside its two-level span."""
        ll = np.zeros(4, dtype=complex)
        ll[int(self.polarised_bits, 2)] = 1.0
        phi_plus = np.array([0, 1, 1, 0], dtype=complex) / SQRT2
        basis = np.column_stack([ll, phi_plus])
        half_gap = self.splitting_gap / 2
        local = -abs(self.bz) * np.eye(2) + half_gap * np.array([
            [-math.cos(self.phi), math.sin(self.phi)],
            [math.sin(self.phi), math.cos(self.phi)],
        ])
        return DenseOperator(basis @ local @ basis.conj().T, labels, hermitian=True)


def effective_two_level(bz: float, bx: float) -> EffectiveTwoLevel:
    phi = mixing_angle(bz, bx)
    gap = 2 * math.hypot(1.0 - abs(bz), SQRT2 * bx)
    return EffectiveTwoLevel(bz=float(bz), splitting_gap=gap, phi=phi)
