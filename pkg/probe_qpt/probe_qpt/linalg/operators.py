"""
Dense complex linear algebra on labelled qubit registers.

This module provides the two value types used throughout the simulator:

- ``DenseOperator``: a square complex matrix (Hamiltonian, unitary or density
  matrix) acting on an ordered tuple of qubit labels.
- ``StateVector``: a normalised amplitude vector over the computational basis
  of an ordered tuple of qubit labels.

The first label of a register is the most significant bit of the basis index,
so a register ``(0, 1, 2)`` orders its basis as ``|q0 q1 q2>``. The probe qubit
is always label 0 and therefore leads every register it belongs to.

All functions are pure: inputs are never mutated and the matrices held by the
value types are read-only arrays.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from django.utils.translation import gettext_lazy as _

from probe_qpt.conf import get_setting
from .exceptions import CapacityError, DomainError

logger = logging.getLogger(__name__)

Labels = tuple[int, ...]

PAULI = {
    'i': np.eye(2, dtype=complex),
    'x': np.array([[0, 1], [1, 0]], dtype=complex),
    'y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'z': np.array([[1, 0], [0, -1]], dtype=complex),
}
for _matrix in PAULI.values():
    _matrix.setflags(write=False)
del _matrix

# sigma_+ = (sigma_x + i sigma_y) / 2 = |0><1|
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS.setflags(write=False)


def _as_labels(labels: Iterable[int]) -> Labels:
    labels = tuple(int(label) for label in labels)
    if len(set(labels)) != len(labels):
        raise DomainError(
            _("Rótulos de qubit repetidos no registo: {labels}").format(labels=labels)
        )
    return labels


def _check_dimension(dim: int, labels: Labels) -> None:
    if dim > get_setting('MAX_DIM'):
        raise CapacityError(
            _("Dimensão {dim} excede o máximo configurado de {max_dim}").format(
                dim=dim, max_dim=get_setting('MAX_DIM')
            )
        )
    if dim != 2 ** len(labels):
        raise DomainError(
            _("Dimensão {dim} incompatível com {count} rótulos de qubit").format(
                dim=dim, count=len(labels)
            )
        )


def _check_same_labels(a: Labels, b: Labels) -> None:
    if a != b:
        raise DomainError(
            _("Registos incompatíveis: {a} e {b}").format(a=a, b=b)
        )


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """
    A square complex matrix acting on a labelled qubit register.

    Attributes:
        matrix: The ``dim x dim`` complex matrix, stored read-only.
        labels: Ordered qubit labels; ``dim == 2 ** len(labels)``.
        hermitian: Whether the operator is asserted Hermitian. The assertion
            is checked against ``HERMITIAN_TOL`` and the stored matrix is
            symmetrised exactly.
    """
    matrix: np.ndarray
    labels: Labels
    hermitian: bool = False

    # numpy scalars defer to __rmul__ instead of broadcasting
    __array_ufunc__ = None

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DomainError(
                _("Operador deve ser uma matriz quadrada, recebido {shape}").format(
                    shape=matrix.shape
                )
            )
        labels = _as_labels(self.labels)
        _check_dimension(matrix.shape[0], labels)
        if not np.all(np.isfinite(matrix)):
            raise DomainError(_("Operador contém entradas não finitas"))
        if self.hermitian:
            deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
            if deviation >= get_setting('HERMITIAN_TOL'):
                raise DomainError(
                    _("Operador não hermitiano: desvio máximo {deviation:.3e}").format(
                        deviation=deviation
                    )
                )
            matrix = (matrix + matrix.conj().T) / 2
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'labels', labels)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def zeros(cls, labels: Sequence[int]) -> DenseOperator:
        dim = 2 ** len(labels)
        return cls(np.zeros((dim, dim), dtype=complex), tuple(labels), hermitian=True)

    def dagger(self) -> DenseOperator:
        return DenseOperator(self.matrix.conj().T, self.labels, self.hermitian)

    def apply(self, psi: StateVector) -> StateVector:
        """Applies the operator to a state, which must stay normalised."""
        _check_same_labels(self.labels, psi.labels)
        return StateVector(self.matrix @ psi.amplitudes, psi.labels)

    def __add__(self, other: DenseOperator) -> DenseOperator:
        _check_same_labels(self.labels, other.labels)
        return DenseOperator(
            self.matrix + other.matrix, self.labels, self.hermitian and other.hermitian
        )

    def __sub__(self, other: DenseOperator) -> DenseOperator:
        _check_same_labels(self.labels, other.labels)
        return DenseOperator(
            self.matrix - other.matrix, self.labels, self.hermitian and other.hermitian
        )

    def __mul__(self, scalar: complex) -> DenseOperator:
        real = np.isreal(scalar)
        return DenseOperator(scalar * self.matrix, self.labels, self.hermitian and bool(real))

    __rmul__ = __mul__

    def __matmul__(self, other: DenseOperator) -> DenseOperator:
        _check_same_labels(self.labels, other.labels)
        return DenseOperator(self.matrix @ other.matrix, self.labels)


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    A normalised pure state over the computational basis of a register.

    Attributes:
        amplitudes: Complex amplitudes, stored read-only.
        labels: Ordered qubit labels; ``len(amplitudes) == 2 ** len(labels)``.
    """
    amplitudes: np.ndarray
    labels: Labels

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 1:
            raise DomainError(_("Amplitudes devem formar um vetor unidimensional"))
        labels = _as_labels(self.labels)
        _check_dimension(amplitudes.shape[0], labels)
        if not np.all(np.isfinite(amplitudes)):
            raise DomainError(_("Estado contém amplitudes não finitas"))
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) >= get_setting('NORM_TOL'):
            raise DomainError(
                _("Estado não normalizado: norma {norm:.12g}").format(norm=norm)
            )
        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)
        object.__setattr__(self, 'labels', labels)

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex], labels: Sequence[int]) -> StateVector:
        """Builds a state from arbitrary non-zero amplitudes, rescaling them to unit norm."""
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = float(np.linalg.norm(amplitudes))
        if norm < get_setting('NORM_TOL'):
            raise DomainError(_("Não é possível normalizar o vetor nulo"))
        return cls(amplitudes / norm, tuple(labels))

    @classmethod
    def basis(cls, bits: str, labels: Sequence[int] | None = None) -> StateVector:
        """
        Builds a computational basis state such as ``'01'``.

        Args:
            bits: One character per qubit, most significant (first label) first.
            labels: Register labels; defaults to ``0 .. len(bits) - 1``.
        """
        if labels is None:
            labels = range(len(bits))
        labels = tuple(labels)
        if len(bits) != len(labels) or set(bits) - {'0', '1'}:
            raise DomainError(
                _("Estado de base inválido {bits} para o registo {labels}").format(
                    bits=bits, labels=labels
                )
            )
        amplitudes = np.zeros(2 ** len(labels), dtype=complex)
        amplitudes[int(bits, 2)] = 1.0
        return cls(amplitudes, labels)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> DenseOperator:
        """Returns the projector ``|psi><psi|``."""
        return DenseOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.labels, hermitian=True)


Register = Union[DenseOperator, StateVector]


def kron(a: Register, b: Register) -> Register:
    """
    Kronecker product of two operators (or two states) on disjoint registers.

    The resulting register lists the labels of ``a`` followed by those of ``b``.

    Raises:
        CapacityError: If the product dimension exceeds ``MAX_DIM``.
        DomainError: If the registers share a label or the operand kinds differ.
    """
    labels = a.labels + b.labels
    if a.dim * b.dim > get_setting('MAX_DIM'):
        raise CapacityError(
            _("Dimensão {dim} excede o máximo configurado de {max_dim}").format(
                dim=a.dim * b.dim, max_dim=get_setting('MAX_DIM')
            )
        )
    if isinstance(a, DenseOperator) and isinstance(b, DenseOperator):
        return DenseOperator(np.kron(a.matrix, b.matrix), labels, a.hermitian and b.hermitian)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), labels)
    raise DomainError(_("kron requer dois operadores ou dois estados"))


def pauli(kind: str, label: int = 0) -> DenseOperator:
    """Returns the single-qubit Pauli operator ``kind`` (``i``, ``x``, ``y``, ``z``) on ``label``."""
    try:
        matrix = PAULI[kind]
    except KeyError:
        raise DomainError(_("Operador de Pauli desconhecido: {kind}").format(kind=kind))
    return DenseOperator(matrix, (label,), hermitian=True)


def sigma_plus(label: int = 0) -> DenseOperator:
    """The raising operator ``|0><1|`` on ``label``; not Hermitian."""
    return DenseOperator(SIGMA_PLUS, (label,))


def pauli_exponential(kinds: str, theta: float) -> np.ndarray:
    """
    Local matrix ``exp(-i θ P)`` for a Pauli string ``P`` such as ``'x'`` or ``'zz'``.

    Every Pauli string squares to the identity, so the exponential is
    ``cos θ I - i sin θ P``.
    """
    try:
        factors = [PAULI[kind] for kind in kinds]
        if not factors:
            raise KeyError(kinds)
    except KeyError:
        raise DomainError(_("Cadeia de Pauli desconhecida: {kinds}").format(kinds=kinds))
    string = factors[0]
    for factor in factors[1:]:
        string = np.kron(string, factor)
    return math.cos(theta) * np.eye(string.shape[0], dtype=complex) - 1j * math.sin(theta) * string


def identity(labels: Sequence[int]) -> DenseOperator:
    return DenseOperator(np.eye(2 ** len(labels), dtype=complex), tuple(labels), hermitian=True)


def site_product(factors: Mapping[int, str], register: Sequence[int]) -> DenseOperator:
    """
    Builds the product of Pauli factors on the given sites, identity elsewhere.

    Example: ``site_product({1: 'z', 2: 'z'}, (0, 1, 2))`` is ``I ⊗ σz ⊗ σz``.
    """
    register = tuple(register)
    unknown = set(factors) - set(register)
    if unknown:
        raise DomainError(
            _("Rótulos {unknown} fora do registo {register}").format(
                unknown=sorted(unknown), register=register
            )
        )
    result = pauli(factors.get(register[0], 'i'), register[0])
    for label in register[1:]:
        result = kron(result, pauli(factors.get(label, 'i'), label))
    return result


def _axes(labels: Labels, targets: Sequence[int]) -> list[int]:
    try:
        return [labels.index(target) for target in targets]
    except ValueError:
        raise DomainError(
            _("Alvos {targets} fora do registo {labels}").format(targets=tuple(targets), labels=labels)
        )


def embed_local(matrix: np.ndarray, targets: Sequence[int], register: Sequence[int]) -> DenseOperator:
    """
    Embeds a k-qubit matrix acting on ``targets`` into the full register.

    ``targets`` need not be contiguous nor ordered like ``register``; the
    local matrix is interpreted in the order given by ``targets``.
    """
    register = _as_labels(register)
    targets = _as_labels(targets)
    _axes(register, targets)
    matrix = np.asarray(matrix, dtype=complex)
    k, n = len(targets), len(register)
    if matrix.shape != (2 ** k, 2 ** k):
        raise DomainError(
            _("Matriz local {shape} incompatível com {k} alvos").format(shape=matrix.shape, k=k)
        )
    rest = [label for label in register if label not in targets]
    order = list(targets) + rest
    full = np.kron(matrix, np.eye(2 ** len(rest), dtype=complex))
    # reordena os eixos de (alvos + resto) para a ordem do registo
    perm = [order.index(label) for label in register]
    tensor = full.reshape((2,) * (2 * n)).transpose(perm + [n + p for p in perm])
    return DenseOperator(tensor.reshape(2 ** n, 2 ** n), register)


def apply_local(matrix: np.ndarray, targets: Sequence[int], psi: StateVector) -> StateVector:
    """Applies a k-qubit matrix on ``targets`` to ``psi`` without building the full operator."""
    targets = _as_labels(targets)
    axes = _axes(psi.labels, targets)
    k, n = len(targets), len(psi.labels)
    local = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * k))
    tensor = psi.amplitudes.reshape((2,) * n)
    result = np.tensordot(local, tensor, axes=(list(range(k, 2 * k)), axes))
    result = np.moveaxis(result, list(range(k)), axes)
    return StateVector(result.reshape(-1), psi.labels)


def eigh(h: DenseOperator) -> tuple[np.ndarray, DenseOperator]:
    """
    Hermitian eigendecomposition.

    Returns:
        The eigenvalues in ascending order and the unitary whose columns are
        the matching orthonormal eigenvectors. The ground state is column 0;
        ties keep the solver's order.

    Raises:
        DomainError: If ``h`` is not flagged Hermitian.
    """
    if not h.hermitian:
        raise DomainError(_("eigh requer um operador hermitiano"))
    eigenvalues, eigenvectors = np.linalg.eigh(h.matrix)
    eigenvalues.setflags(write=False)
    return eigenvalues, DenseOperator(eigenvectors, h.labels)


def propagator(h: DenseOperator, t: float) -> DenseOperator:
    """Returns ``exp(-i h t)`` computed from the eigendecomposition of ``h``."""
    eigenvalues, vectors = eigh(h)
    v = vectors.matrix
    return DenseOperator((v * np.exp(-1j * eigenvalues * t)) @ v.conj().T, h.labels)


def evolve(h: DenseOperator, t: float, psi: StateVector) -> StateVector:
    """
    Evolves ``psi`` for time ``t`` under ``h`` (hbar = 1).

    Raises:
        DomainError: If ``h`` is not Hermitian or the registers differ.
    """
    _check_same_labels(h.labels, psi.labels)
    return propagator(h, t).apply(psi)


def partial_trace(rho_or_psi: Register, keep: Iterable[int]) -> DenseOperator:
    """
    Reduced density matrix on the ``keep`` labels.

    The kept labels appear in register order in the result, regardless of the
    order in which they are passed.

    Raises:
        DomainError: If ``keep`` is empty or names labels outside the register.
    """
    keep = set(keep)
    labels = rho_or_psi.labels
    if not keep or not keep <= set(labels):
        raise DomainError(
            _("Conjunto de qubits a manter inválido: {keep} para o registo {labels}").format(
                keep=sorted(keep), labels=labels
            )
        )
    kept = [label for label in labels if label in keep]
    traced = [label for label in labels if label not in keep]
    kept_axes, traced_axes = _axes(labels, kept), _axes(labels, traced)
    n, dk, de = len(labels), 2 ** len(kept), 2 ** len(traced)

    if isinstance(rho_or_psi, StateVector):
        tensor = rho_or_psi.amplitudes.reshape((2,) * n)
        block = tensor.transpose(kept_axes + traced_axes).reshape(dk, de)
        return DenseOperator(block @ block.conj().T, tuple(kept), hermitian=True)

    tensor = rho_or_psi.matrix.reshape((2,) * (2 * n))
    perm = kept_axes + traced_axes + [n + a for a in kept_axes] + [n + a for a in traced_axes]
    reshaped = tensor.transpose(perm).reshape(dk, de, dk, de)
    reduced = np.trace(reshaped, axis1=1, axis2=3)
    return DenseOperator(reduced, tuple(kept), hermitian=rho_or_psi.hermitian)


def overlap(a: StateVector, b: StateVector) -> float:
    """Returns ``|<a|b>|^2``, clipped to ``[0, 1]``."""
    _check_same_labels(a.labels, b.labels)
    value = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(value, 1.0))
