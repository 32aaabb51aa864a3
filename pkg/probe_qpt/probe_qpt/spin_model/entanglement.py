"""
Two-qubit entanglement of the chain's ground state.
"""

from __future__ import annotations

import numpy as np
from django.utils.translation import gettext_lazy as _

from linalg.exceptions import DomainError
from linalg.operators import PAULI, DenseOperator, StateVector, partial_trace
from probe_qpt.conf import get_setting
from .chain import ChainSpec
from .ground_states import ground_state_numeric

SPIN_FLIP = np.kron(PAULI['y'], PAULI['y'])


def _density(rho_or_psi: DenseOperator | StateVector) -> np.ndarray:
    if isinstance(rho_or_psi, StateVector):
        rho_or_psi = rho_or_psi.density()
    rho = rho_or_psi.matrix
    if rho.shape != (4, 4):
        raise DomainError(
            _("A concorrência requer um estado de dois qubits, recebido dimensão {dim}").format(
                dim=rho.shape[0]
            )
        )
    tol = get_setting('NORM_TOL')
    if np.max(np.abs(rho - rho.conj().T)) >= get_setting('HERMITIAN_TOL'):
        raise DomainError(_("Matriz densidade não hermitiana"))
    if abs(np.trace(rho).real - 1.0) > tol:
        raise DomainError(_("Matriz densidade com traço diferente de 1"))
    if np.min(np.linalg.eigvalsh(rho)) < -tol:
        raise DomainError(_("Matriz densidade não é positiva semidefinida"))
    return rho


def concurrence(rho_or_psi: DenseOperator | StateVector) -> float:
    """
    Wootters concurrence of a two-qubit state.

    ``C = max(0, λ1 - λ2 - λ3 - λ4)`` where ``λi`` are the decreasing square
    roots of the eigenvalues of ``ρ (σy⊗σy) ρ* (σy⊗σy)``.

    Raises:
        DomainError: If the input is not a valid 4-dimensional density matrix.
    """
    rho = _density(rho_or_psi)
    flipped = SPIN_FLIP @ rho.conj() @ SPIN_FLIP
    eigenvalues = np.linalg.eigvals(rho @ flipped).real
    lambdas = np.sort(np.sqrt(np.clip(eigenvalues, 0.0, None)))[::-1]
    value = lambdas[0] - lambdas[1:].sum()
    return float(min(max(value, 0.0), 1.0))


def ground_state_concurrence(spec: ChainSpec) -> tuple[float, bool]:
    """
    Concurrence between spins 1 and 2 in the chain's ground state.

    Two-spin chains are solved in the triplet sector; longer chains use the
    full register and trace out every spin beyond the first pair.

    Returns:
        The concurrence and the ground-state degeneracy flag.
    """
    sector = 'triplet' if spec.n == 2 else 'full'
    ground = ground_state_numeric(spec, sector=sector)
    rho = ground.state.density() if spec.n == 2 else partial_trace(ground.state, {1, 2})
    return concurrence(rho), ground.degenerate
