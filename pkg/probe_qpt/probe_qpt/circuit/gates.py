"""
A small gate-level state-vector engine.

Gates act on labelled qubits of a register. Rotations follow the convention
``RotK(θ) = exp(-i θ σk)`` and ``ZZ(θ) = exp(-i θ σz σz)``; a rotation with
several targets applies the same single-qubit rotation to each of them.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from django.db import models
from django.utils.translation import gettext_lazy as _

from linalg.exceptions import DomainError
from linalg.operators import DenseOperator, StateVector, apply_local, embed_local, identity, pauli_exponential
from probe_qpt.conf import get_setting

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-12

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


class GateKind(models.TextChoices):
    WALSH_HADAMARD = 'W', _('Walsh-Hadamard')
    ROT_X = 'RX', _('Rotação X')
    ROT_Y = 'RY', _('Rotação Y')
    ROT_Z = 'RZ', _('Rotação Z')
    ZZ = 'ZZ', _('Interação ZZ')
    CONTROLLED_UNITARY = 'CU', _('Unitária controlada')
    UNITARY = 'U', _('Unitária')


ROTATION_AXES = {GateKind.ROT_X: 'x', GateKind.ROT_Y: 'y', GateKind.ROT_Z: 'z'}


def _tensor_power(matrix: np.ndarray, count: int) -> np.ndarray:
    result = matrix
    for _index in range(count - 1):
        result = np.kron(result, matrix)
    return result


@dataclass(frozen=True, eq=False)
class Gate:
    """
    One gate of a circuit.

    Attributes:
        kind: The gate family.
        targets: Target labels, in the order the local matrix is written.
        angle: Rotation angle in radians (rotations and ``ZZ`` only).
        control: Control label (``CU`` only).
        control_value: Probe value that triggers the controlled unitary.
        unitary: Target matrix for ``CU`` and ``U``.
    """
    kind: GateKind
    targets: tuple[int, ...]
    angle: float | None = None
    control: int | None = None
    control_value: int = 1
    unitary: np.ndarray | None = None

    def __post_init__(self) -> None:
        try:
            kind = GateKind(self.kind)
        except ValueError:
            raise DomainError(_("Tipo de porta desconhecido: {kind}").format(kind=self.kind))
        targets = tuple(int(target) for target in self.targets)
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'targets', targets)
        if not targets or len(set(targets)) != len(targets):
            raise DomainError(_("Alvos inválidos para {kind}: {targets}").format(kind=kind, targets=targets))
        if kind in ROTATION_AXES or kind == GateKind.ZZ:
            if self.angle is None or not math.isfinite(self.angle):
                raise DomainError(_("A porta {kind} requer um ângulo finito").format(kind=kind))
            object.__setattr__(self, 'angle', float(self.angle))
        if kind == GateKind.ZZ and len(targets) != 2:
            raise DomainError(_("A porta ZZ atua em exatamente dois qubits"))
        if kind == GateKind.CONTROLLED_UNITARY:
            if self.control is None or self.control in targets:
                raise DomainError(_("Controlo inválido {control} para os alvos {targets}").format(
                    control=self.control, targets=targets
                ))
            if self.control_value not in (0, 1):
                raise DomainError(_("O valor de controlo deve ser 0 ou 1"))
        if kind in (GateKind.CONTROLLED_UNITARY, GateKind.UNITARY):
            if self.unitary is None:
                raise DomainError(_("A porta {kind} requer uma matriz unitária").format(kind=kind))
            unitary = np.array(self.unitary, dtype=complex)
            if unitary.shape != (2 ** len(targets),) * 2:
                raise DomainError(_("Matriz {shape} incompatível com {count} alvos").format(
                    shape=unitary.shape, count=len(targets)
                ))
            unitary.setflags(write=False)
            object.__setattr__(self, 'unitary', unitary)
        matrix = self.local_matrix()
        deviation = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))
        if deviation >= UNITARY_TOL:
            raise DomainError(_("Porta {kind} não unitária: desvio {deviation:.3e}").format(
                kind=kind, deviation=deviation
            ))

    @property
    def operands(self) -> tuple[int, ...]:
        """Every label the gate touches; the control comes first."""
        if self.kind == GateKind.CONTROLLED_UNITARY:
            return (self.control,) + self.targets
        return self.targets

    def local_matrix(self) -> np.ndarray:
        """The gate as a matrix over ``operands``."""
        if self.kind == GateKind.WALSH_HADAMARD:
            return _tensor_power(HADAMARD, len(self.targets))
        if self.kind in ROTATION_AXES:
            return _tensor_power(pauli_exponential(ROTATION_AXES[self.kind], self.angle), len(self.targets))
        if self.kind == GateKind.ZZ:
            return pauli_exponential('zz', self.angle)
        if self.kind == GateKind.UNITARY:
            return self.unitary
        dim = self.unitary.shape[0]
        blocks = [np.eye(dim, dtype=complex), np.eye(dim, dtype=complex)]
        blocks[self.control_value] = self.unitary
        matrix = np.zeros((2 * dim, 2 * dim), dtype=complex)
        matrix[:dim, :dim], matrix[dim:, dim:] = blocks
        return matrix

    def apply(self, psi: StateVector) -> StateVector:
        return apply_local(self.local_matrix(), self.operands, psi)

    def to_text(self) -> str:
        parts = [self.kind.value, ','.join(str(target) for target in self.targets)]
        if self.angle is not None:
            parts.append(_format(self.angle))
        if self.kind == GateKind.CONTROLLED_UNITARY:
            parts.append(f'control={self.control}:{self.control_value}')
        if self.unitary is not None:
            rows = (','.join(_format_complex(entry) for entry in row) for row in self.unitary)
            parts.append('u=' + ';'.join(rows))
        return ' '.join(parts)


def _format(value: float) -> str:
    text = '{:.{digits}g}'.format(float(value), digits=get_setting('FLOAT_DIGITS'))
    return '0' if text == '-0' else text


def _format_complex(value: complex) -> str:
    sign = '-' if value.imag < 0 and _format(abs(value.imag)) != '0' else '+'
    return f'{_format(value.real)}{sign}{_format(abs(value.imag))}j'


@dataclass(frozen=True, eq=False)
class Circuit:
    """
    An ordered list of gates on a fixed register.

    Gates are applied in list order.
    """
    labels: tuple[int, ...]
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        labels = tuple(int(label) for label in self.labels)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'gates', tuple(self.gates))
        for gate in self.gates:
            outside = set(gate.operands) - set(labels)
            if outside:
                raise DomainError(
                    _("Porta {gate} atua fora do registo {labels}").format(gate=gate.to_text(), labels=labels)
                )

    def __len__(self) -> int:
        return len(self.gates)

    def unitary(self) -> DenseOperator:
        """The product of all gates as a register operator."""
        result = identity(self.labels)
        for gate in self.gates:
            result = embed_local(gate.local_matrix(), gate.operands, self.labels) @ result
        return result

    def to_text(self) -> str:
        """Line-oriented listing: a ``REGISTER`` header, then one gate per line."""
        lines = ['REGISTER ' + ' '.join(str(label) for label in self.labels)]
        lines.extend(gate.to_text() for gate in self.gates)
        return '\n'.join(lines) + '\n'


def run_circuit(circuit: Circuit, psi: StateVector) -> StateVector:
    """
    Applies every gate of ``circuit`` to ``psi`` in order.

    Raises:
        DomainError: If the state's register differs from the circuit's.
    """
    if psi.labels != circuit.labels:
        raise DomainError(
            _("Registo do estado {state} difere do circuito {circuit}").format(
                state=psi.labels, circuit=circuit.labels
            )
        )
    for gate in circuit.gates:
        psi = gate.apply(psi)
    logger.debug("Circuito com %d portas aplicado", len(circuit))
    return psi


def rotation(kind: GateKind, targets: Sequence[int], angle: float) -> Gate:
    return Gate(kind, tuple(targets), angle=angle)
