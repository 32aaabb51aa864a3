"""
Error hierarchy shared by every app of the simulator.

All errors derive from Django's ``ValidationError`` so that callers (the
``sweep`` command in particular) can treat domain violations uniformly.
"""

from django.core.exceptions import ValidationError


class DomainError(ValidationError):
    """A precondition or domain violation (label mismatch, non-Hermitian input, ...)."""


class CapacityError(DomainError):
    """The requested register exceeds the configured dense capacity."""


class DegeneracyError(DomainError):
    """A quantity is undefined because the relevant levels are exactly degenerate."""
