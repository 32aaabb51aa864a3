"""
Gate sequences for the two probe networks.

- ``build_lc_network``: Walsh-Hadamard on the probe, then two controlled
  preparations that put the system into the ground state for ``Bz + eps``
  (probe ``|0>``) or ``Bz - eps`` (probe ``|1>``).
- ``build_ac_circuit``: exact preparation of ``|+>|ψg(Bx, Bz)>`` followed by
  the product-formula evolution, one gate per factor.

Preparations are synthesised as exact unitaries whose first column is the
target state. ``prep_angles`` exposes the rotation-cascade angles of the
same preparation for two spins; the circuits do not use them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from django.utils.translation import gettext_lazy as _

from linalg.exceptions import DomainError
from linalg.operators import StateVector
from probe_protocol.avoided_crossing import ProtocolRun, initial_ground_state
from probe_protocol.trotter import trotter_factors
from spin_model.chain import PROBE_LABEL
from spin_model.ground_states import TripletAmplitudes, ground_state_analytic
from .gates import Circuit, Gate, GateKind, rotation

SQRT2 = math.sqrt(2)

FACTOR_GATES = {'x': GateKind.ROT_X, 'z': GateKind.ROT_Z, 'zz': GateKind.ZZ}


def state_preparation_unitary(target: StateVector | np.ndarray) -> np.ndarray:
    """
    A unitary whose first column is ``target``, so it maps ``|0...0>`` onto it.

    The remaining columns complete ``target`` to an orthonormal basis by QR
    factorisation of ``[target | I]``.
    """
    vector = np.asarray(getattr(target, 'amplitudes', target), dtype=complex)
    norm = np.linalg.norm(vector)
    if vector.ndim != 1 or norm == 0:
        raise DomainError(_("Estado alvo inválido para a preparação"))
    vector = vector / norm
    q, r = np.linalg.qr(np.column_stack([vector, np.eye(vector.shape[0], dtype=complex)]))
    # qr fixes the first column only up to a phase
    q[:, 0] *= r[0, 0] / abs(r[0, 0])
    return q


def build_lc_network(bz: float, eps: float) -> Circuit:
    """The conditional-preparation network on the register ``(0, 1, 2)``."""
    system = (1, 2)
    upper = state_preparation_unitary(ground_state_analytic(bz + eps).state)
    lower = state_preparation_unitary(ground_state_analytic(bz - eps).state)
    return Circuit(
        (PROBE_LABEL,) + system,
        (
            Gate(GateKind.WALSH_HADAMARD, (PROBE_LABEL,)),
            Gate(GateKind.CONTROLLED_UNITARY, system, control=PROBE_LABEL, control_value=0, unitary=upper),
            Gate(GateKind.CONTROLLED_UNITARY, system, control=PROBE_LABEL, control_value=1, unitary=lower),
        ),
    )


@dataclass(frozen=True)
class PrepAngles:
    """
    Rotation angles of the two-spin preparation cascade.

    They satisfy ``tan(α/2) = -√2 c1 / c+``, ``tan(β/2) = -c+ / (√2 c0)`` and
    ``tan(θ/2) = sin(β/2) / cos(α/2)``. ``saturated`` names the angles whose
    ratio had a vanishing denominator and were set to their limit value.
    """
    alpha: float
    beta: float
    theta: float
    saturated: frozenset[str] = field(default_factory=frozenset)


def _half_angle(numerator: float, denominator: float) -> tuple[float, bool]:
    """``2 arctan(numerator / denominator)`` with the pole mapped to ``±π``."""
    if denominator != 0:
        return 2 * math.atan(numerator / denominator), False
    if numerator == 0:
        return 0.0, True
    return math.copysign(math.pi, numerator), True


def prep_angles(amplitudes: TripletAmplitudes) -> PrepAngles:
    """
    Principal-value angles for the given triplet amplitudes.

    A vanishing ``c+`` saturates ``α`` (``±π``, or 0 when ``c1`` vanishes too);
    a vanishing ``c0`` saturates ``β`` in the same way; ``θ`` saturates when
    ``cos(α/2)`` vanishes. The sign of a saturated angle follows the sign its
    ratio diverges with.
    """
    c0, c_plus, c1 = amplitudes.c0, amplitudes.c_plus, amplitudes.c1
    alpha, alpha_saturated = _half_angle(-SQRT2 * c1, c_plus)
    beta, beta_saturated = _half_angle(-c_plus, SQRT2 * c0)
    cos_half_alpha = 0.0 if alpha_saturated and alpha != 0 else math.cos(alpha / 2)
    theta, theta_saturated = _half_angle(math.sin(beta / 2), cos_half_alpha)
    saturated = {
        name for name, flag in
        (('alpha', alpha_saturated), ('beta', beta_saturated), ('theta', theta_saturated)) if flag
    }
    return PrepAngles(alpha, beta, theta, frozenset(saturated))


def build_ac_circuit(run: ProtocolRun) -> Circuit:
    """
    Preparation of ``|+>|ψg>`` followed by the product-formula evolution.

    The register is the probe plus the system spins; the first two gates
    prepare the state from ``|0...0>`` and each remaining gate is one factor
    of the product, with ``σz⁰`` kept as an operator.
    """
    spec = run.spec.replace(with_probe=True)
    system = spec.system_labels
    preparation = state_preparation_unitary(initial_ground_state(run.spec))
    gates = [
        Gate(GateKind.WALSH_HADAMARD, (PROBE_LABEL,)),
        Gate(GateKind.UNITARY, system, unitary=preparation),
    ]
    dt = run.tau / run.trotter_steps
    for _step in range(run.trotter_steps):
        for factor in trotter_factors(run.spec, dt):
            gates.append(rotation(FACTOR_GATES[factor.kind], factor.targets, factor.theta))
    return Circuit(spec.labels, tuple(gates))
