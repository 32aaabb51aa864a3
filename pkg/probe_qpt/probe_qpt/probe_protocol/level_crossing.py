"""
Level-crossing protocol: conditional preparation and probe readout.

The probe is put into ``|+>`` and the system is prepared, conditionally on
the probe, in the ground state for the effective field ``Bz + eps`` (probe
``|0>``) or ``Bz - eps`` (probe ``|1>``):

    |Ψ> = (|0>|ψg(Bz + eps)> + |1>|ψg(Bz - eps)>) / √2

The probe's transverse magnetisation then reveals the overlap of the two
branches, ``L = 4 |<σ+>|²``, which drops to zero when the two effective
fields lie in different phases.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from django.utils.translation import gettext_lazy as _

from linalg.exceptions import DomainError
from linalg.operators import DenseOperator, StateVector, overlap, partial_trace, sigma_plus
from probe_qpt.conf import get_setting
from spin_model.chain import PROBE_LABEL
from spin_model.ground_states import ground_state_analytic

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlaggedOverlap:
    value: float
    degenerate: bool = False


@dataclass(frozen=True, eq=False)
class ReadoutResult:
    """
    Attributes:
        l_direct: Overlap computed directly from the two probe branches.
        l_probe: Overlap read from the probe, ``4 |tr(ρ σ+)|²``.
        probe_rho: Reduced density matrix of the probe.
    """
    l_direct: float
    l_probe: float
    probe_rho: DenseOperator


def overlap_level_crossing(bz: float, eps: float) -> FlaggedOverlap:
    """
    Overlap of the analytic ground states at ``Bz + eps`` and ``Bz - eps``.

    The result is exactly 1 while both effective fields share a phase and
    exactly 0 once they straddle a critical point. If either effective field
    sits exactly on ``±1`` the value is computed from the mid-phase state and
    the degeneracy flag is set.
    """
    if not eps > 0:
        raise DomainError(_("O acoplamento eps deve ser > 0, recebido {eps}").format(eps=eps))
    upper = ground_state_analytic(bz + eps)
    lower = ground_state_analytic(bz - eps)
    return FlaggedOverlap(
        overlap(upper.state, lower.state), upper.degenerate or lower.degenerate
    )


def network_state(branch0: StateVector, branch1: StateVector) -> StateVector:
    """``(|0>|branch0> + |1>|branch1>) / √2`` with the probe leading the register."""
    if branch0.labels != branch1.labels:
        raise DomainError(
            _("Ramos com registos diferentes: {a} e {b}").format(a=branch0.labels, b=branch1.labels)
        )
    if PROBE_LABEL in branch0.labels:
        raise DomainError(_("Os ramos não podem conter o qubit de sonda"))
    amplitudes = np.concatenate([branch0.amplitudes, branch1.amplitudes]) / math.sqrt(2)
    return StateVector(amplitudes, (PROBE_LABEL,) + branch0.labels)


def build_network_state(bz: float, eps: float) -> StateVector:
    """The output of the conditional-preparation network for two system spins."""
    return network_state(
        ground_state_analytic(bz + eps).state, ground_state_analytic(bz - eps).state
    )


def _branches(psi: StateVector) -> tuple[np.ndarray, np.ndarray]:
    axis = psi.labels.index(PROBE_LABEL)
    tensor = np.moveaxis(psi.amplitudes.reshape((2,) * len(psi.labels)), axis, 0)
    return tensor[0].reshape(-1), tensor[1].reshape(-1)


def probe_readout(psi: StateVector) -> ReadoutResult:
    """
    Reads the branch overlap from the probe's reduced state.

    Raises:
        DomainError: If the register does not contain the probe qubit.
    """
    if PROBE_LABEL not in psi.labels or len(psi.labels) < 2:
        raise DomainError(
            _("O registo {labels} não contém a sonda e um sistema").format(labels=psi.labels)
        )
    rho = partial_trace(psi, {PROBE_LABEL})
    coherence = np.trace(rho.matrix @ sigma_plus(PROBE_LABEL).matrix)
    l_probe = min(4 * abs(coherence) ** 2, 1.0)

    branch0, branch1 = _branches(psi)
    l_direct = min(4 * abs(np.vdot(branch0, branch1)) ** 2, 1.0)

    eigenvalues = np.linalg.eigvalsh(rho.matrix)
    tol = get_setting('NORM_TOL')
    if eigenvalues[0] < -tol or eigenvalues[-1] > 1 + tol:
        logger.warning("Estado reduzido da sonda fora de [0, 1]: %s", eigenvalues)
    return ReadoutResult(float(l_direct), float(l_probe), rho)
