"""
Ground states of the Ising chain, analytic and numerical.

For two spins the analysis can be restricted to the triplet manifold
``{|00>, |φ+>, |11>}``: the singlet ``|φ->`` has energy -1 for every field and
never mixes with it. The triplet solver projects the Hamiltonian onto this
manifold explicitly, so the singlet is excluded by construction. The
full-space solver may return a singlet admixture whenever the singlet is
degenerate with the triplet ground state (``Bx = 0`` and ``|Bz| < 1``); such
results carry the degeneracy flag.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from django.utils.translation import gettext_lazy as _

from linalg.exceptions import DomainError
from linalg.operators import StateVector, eigh
from probe_qpt.conf import get_setting
from .chain import ChainSpec, hamiltonian_transverse

logger = logging.getLogger(__name__)

Sector = Literal['full', 'triplet']

SYSTEM_PAIR = (1, 2)


@dataclass(frozen=True)
class TripletAmplitudes:
    """
    Real amplitudes of a two-spin state on ``|00>``, ``|φ+>`` and ``|11>``.

    The global phase is fixed so that the largest-magnitude component is
    positive.
    """
    c0: float
    c_plus: float
    c1: float

    def __post_init__(self) -> None:
        norm_sq = self.c0 ** 2 + self.c_plus ** 2 + self.c1 ** 2
        if abs(norm_sq - 1.0) >= get_setting('NORM_TOL'):
            raise DomainError(
                _("Amplitudes do tripleto não normalizadas: soma dos quadrados {norm:.12g}").format(
                    norm=norm_sq
                )
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c_plus, self.c1])


@dataclass(frozen=True, eq=False)
class GroundState:
    """
    Lowest state of a Hamiltonian together with its spectral context.

    Attributes:
        state: The ground state, global phase fixed (largest component positive).
        energy: Ground energy.
        gap: Distance to the next level.
        degenerate: Whether ``gap`` is below ``DEGENERACY_TOL``.
        amplitudes: Triplet amplitudes when the state lies in the two-spin
            triplet manifold, otherwise ``None``.
    """
    state: StateVector
    energy: float
    gap: float
    degenerate: bool
    amplitudes: TripletAmplitudes | None = None


def triplet_basis() -> np.ndarray:
    """The 4x3 isometry whose columns are ``|00>``, ``|φ+>`` and ``|11>``."""
    basis = np.zeros((4, 3), dtype=complex)
    basis[0, 0] = 1.0
    basis[1, 1] = basis[2, 1] = 1 / math.sqrt(2)
    basis[3, 2] = 1.0
    return basis


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    pivot = vector[int(np.argmax(np.abs(vector)))]
    return vector * (abs(pivot) / pivot)


def _triplet_amplitudes(vector: np.ndarray) -> TripletAmplitudes | None:
    coefficients = triplet_basis().conj().T @ vector
    norm_sq = float(np.sum(np.abs(coefficients) ** 2))
    if abs(norm_sq - 1.0) > get_setting('NORM_TOL') or np.max(np.abs(coefficients.imag)) > 1e-10:
        return None
    real = coefficients.real / math.sqrt(norm_sq)
    return TripletAmplitudes(*(float(c) for c in real))


def ground_state_analytic(bz: float) -> GroundState:
    """
    Ground state of the two-spin chain in a longitudinal field, within the triplet.

    ``|00>`` below ``Bz = -1``, ``|φ+>`` between the critical points and
    ``|11>`` above ``Bz = 1``. Exactly at ``Bz = ±1`` the ground level is
    degenerate; the mid-phase state ``|φ+>`` is returned with the flag set.
    """
    energies = {'00': 1 + 2 * bz, 'phi': -1.0, '11': 1 - 2 * bz}
    if bz < -1:
        winner, coefficients = '00', (1.0, 0.0, 0.0)
    elif bz > 1:
        winner, coefficients = '11', (0.0, 0.0, 1.0)
    else:
        winner, coefficients = 'phi', (0.0, 1.0, 0.0)
    ordered = sorted(energies.values())
    gap = ordered[1] - ordered[0]
    degenerate = abs(bz) == 1 or gap < get_setting('DEGENERACY_TOL')
    if degenerate:
        logger.debug("Estado fundamental degenerado em Bz=%s", bz)
    amplitudes = TripletAmplitudes(*coefficients)
    state = StateVector(triplet_basis() @ amplitudes.as_array(), SYSTEM_PAIR)
    return GroundState(state, energies[winner], gap, degenerate, amplitudes)


def ground_state_numeric(spec: ChainSpec, sector: Sector = 'full') -> GroundState:
    """
    Lowest eigenvector of the chain Hamiltonian (the probe is never included).

    Args:
        spec: Chain parameters; ``with_probe`` is ignored.
        sector: ``'full'`` diagonalises the whole register. ``'triplet'``
            (two spins only) solves the 3x3 problem projected onto the
            triplet manifold.

    Returns:
        A ``GroundState``; the triplet amplitudes are set whenever the state
        lies in the triplet manifold.

    Raises:
        DomainError: For an unknown sector or a triplet request with n > 2.
    """
    spec = spec.system_only()
    h = hamiltonian_transverse(spec)
    if sector == 'triplet':
        if spec.n != 2:
            raise DomainError(
                _("O setor tripleto só está definido para n=2, recebido n={n}").format(n=spec.n)
            )
        basis = triplet_basis()
        # the projected block is real symmetric for every real field
        projected = (basis.conj().T @ h.matrix @ basis).real
        eigenvalues, vectors = np.linalg.eigh((projected + projected.T) / 2)
        coefficients = _fix_phase(vectors[:, 0])
        amplitudes = TripletAmplitudes(*(float(c) for c in coefficients / np.linalg.norm(coefficients)))
        state = StateVector.normalized(basis @ amplitudes.as_array(), spec.labels)
    elif sector == 'full':
        eigenvalues, vectors = eigh(h)
        state = StateVector.normalized(_fix_phase(vectors.matrix[:, 0]), spec.labels)
        amplitudes = _triplet_amplitudes(state.amplitudes) if spec.n == 2 else None
    else:
        raise DomainError(_("Setor desconhecido: {sector}").format(sector=sector))

    gap = float(eigenvalues[1] - eigenvalues[0])
    degenerate = gap < get_setting('DEGENERACY_TOL')
    if degenerate:
        logger.debug("Estado fundamental quase degenerado (gap=%.3e) para %s", gap, spec)
    return GroundState(state, float(eigenvalues[0]), gap, degenerate, amplitudes)
