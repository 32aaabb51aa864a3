"""
Ising chain parameters and Hamiltonian builders.

The system spins carry labels ``1 .. n``. When ``with_probe`` is set, the
probe qubit (label 0) is added at the front of the register and couples to
every system spin through ``eps * σz⁰ σz^i``. Two system spins reproduce the
minimal chain; longer chains use open-boundary nearest-neighbour couplings.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
import operator
from dataclasses import dataclass

import numpy as np
from django.utils.translation import gettext_lazy as _

from linalg.exceptions import DomainError
from linalg.operators import DenseOperator, eigh, site_product

logger = logging.getLogger(__name__)

PROBE_LABEL = 0


@dataclass(frozen=True)
class ChainSpec:
    """
    Parameters of the Ising chain, optionally coupled to the probe qubit.

    Attributes:
        n: Number of system spins (at least 2).
        bz: Longitudinal field.
        bx: Transverse field (non-negative).
        eps: Probe coupling strength (non-negative).
        with_probe: Whether the register includes the probe qubit 0.
    """
    n: int = 2
    bz: float = 0.0
    bx: float = 0.0
    eps: float = 0.0
    with_probe: bool = False

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(
                _("A cadeia precisa de pelo menos 2 spins, recebido n={n}").format(n=self.n)
            )
        for name in ('bz', 'bx', 'eps'):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(_("Parâmetro {name} não finito").format(name=name))
        if self.bx < 0:
            raise DomainError(_("Campo transversal Bx deve ser >= 0, recebido {bx}").format(bx=self.bx))
        if self.eps < 0:
            raise DomainError(_("Acoplamento eps deve ser >= 0, recebido {eps}").format(eps=self.eps))
        object.__setattr__(self, 'n', int(self.n))
        for name in ('bz', 'bx', 'eps'):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def system_labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    @property
    def labels(self) -> tuple[int, ...]:
        if self.with_probe:
            return (PROBE_LABEL,) + self.system_labels
        return self.system_labels

    def replace(self, **changes) -> ChainSpec:
        return dataclasses.replace(self, **changes)

    def system_only(self) -> ChainSpec:
        return self.replace(with_probe=False)

    def shifted(self, sign: int) -> ChainSpec:
        """The system seen by probe state ``|0>`` (``sign=+1``) or ``|1>`` (``sign=-1``)."""
        return self.replace(bz=self.bz + sign * self.eps, with_probe=False)


def _total(terms: list[DenseOperator], labels: tuple[int, ...]) -> DenseOperator:
    return functools.reduce(operator.add, terms, DenseOperator.zeros(labels))


def _ising_bonds(spec: ChainSpec) -> DenseOperator:
    labels = spec.labels
    bonds = [site_product({i: 'z', i + 1: 'z'}, labels) for i in spec.system_labels[:-1]]
    return _total(bonds, labels)


def _field(kind: str, spec: ChainSpec) -> DenseOperator:
    labels = spec.labels
    return _total([site_product({i: kind}, labels) for i in spec.system_labels], labels)


def _probe_coupling(spec: ChainSpec) -> DenseOperator:
    labels = spec.labels
    terms = [site_product({PROBE_LABEL: 'z', i: 'z'}, labels) for i in spec.system_labels]
    return _total(terms, labels)


def _assemble(spec: ChainSpec, transverse: bool) -> DenseOperator:
    h = _ising_bonds(spec) + spec.bz * _field('z', spec)
    if transverse and spec.bx:
        h = h + spec.bx * _field('x', spec)
    if spec.with_probe and spec.eps:
        h = h + spec.eps * _probe_coupling(spec)
    return h


def hamiltonian_longitudinal(spec: ChainSpec) -> DenseOperator:
    """
    Ising chain in a purely longitudinal field.

    ``Σ σz^i σz^{i+1} + Bz Σ σz^i``, plus ``eps σz⁰ Σ σz^i`` when the probe is
    part of the register.

    Raises:
        DomainError: If the spec carries a transverse field.
    """
    if spec.bx != 0:
        raise DomainError(
            _("O Hamiltoniano longitudinal requer Bx = 0, recebido {bx}").format(bx=spec.bx)
        )
    return _assemble(spec, transverse=False)


def hamiltonian_transverse(spec: ChainSpec) -> DenseOperator:
    """Longitudinal Hamiltonian plus the transverse field ``Bx Σ σx^i``."""
    return _assemble(spec, transverse=True)


def hamiltonian_total(spec: ChainSpec) -> DenseOperator:
    """
    Chain in longitudinal and transverse fields coupled to the probe qubit.

    The result is block diagonal in the probe basis: the ``|0>`` block is the
    chain at ``Bz + eps`` and the ``|1>`` block the chain at ``Bz - eps``.

    Raises:
        DomainError: If the spec does not include the probe.
    """
    if not spec.with_probe:
        raise DomainError(_("O Hamiltoniano total requer a sonda no registo"))
    return _assemble(spec, transverse=True)


def branch_hamiltonian(spec: ChainSpec, sign: int) -> DenseOperator:
    """``H^s_T ± eps Σ σz^i`` on the system register (``sign=+1`` for probe ``|0>``)."""
    return hamiltonian_transverse(spec.shifted(sign))


def spectrum(spec: ChainSpec) -> np.ndarray:
    """All eigenvalues of the chain Hamiltonian in ascending order."""
    eigenvalues, _vectors = eigh(hamiltonian_transverse(spec))
    return eigenvalues
