"""
Ordered sweep results and the thread-pool map shared by the protocol and sweep apps.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence, TypeVar

from django.utils import timezone
from django.utils.translation import gettext_lazy as _

import probe_qpt
from linalg.exceptions import DomainError
from probe_qpt.conf import get_setting

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def map_ordered(
    fn: Callable[[T], R], items: Iterable[T], parallel: bool = False, workers: int | None = None
) -> list[R]:
    """
    Evaluates ``fn`` on every item and returns the results in input order.

    With ``parallel`` the items are spread over a thread pool of
    ``SWEEP_WORKERS`` threads; completion order never affects the output.
    """
    items = list(items)
    if not parallel or len(items) < 2:
        return [fn(item) for item in items]
    workers = workers or get_setting('SWEEP_WORKERS')
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


@dataclass(frozen=True, eq=False)
class SweepResult:
    """
    Rows of a sweep, ascending in ``bz``.

    Attributes:
        config: Echo of the parameters that produced the rows.
        columns: Column names; the first is always ``bz``.
        rows: One tuple of floats per grid point.
        flags: Row index to the list of numerical flags raised at that point.
        metadata: Tool version, generation time and grid description.
    """
    config: Mapping[str, Any]
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    flags: Mapping[int, tuple[str, ...]] = field(default_factory=dict)
    metadata: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        config: Mapping[str, Any],
        columns: Sequence[str],
        rows: Sequence[Sequence[float]],
        flags: Mapping[int, Sequence[str]] | None = None,
    ) -> SweepResult:
        """
        Validates the rows and stamps the metadata.

        Raises:
            DomainError: On ragged rows or a grid that is not strictly ascending.
        """
        columns = tuple(columns)
        rows = tuple(tuple(float(value) for value in row) for row in rows)
        if not columns or columns[0] != 'bz':
            raise DomainError(_("A primeira coluna deve ser bz"))
        for row in rows:
            if len(row) != len(columns):
                raise DomainError(
                    _("Linha com {got} valores para {expected} colunas").format(
                        got=len(row), expected=len(columns)
                    )
                )
        grid = [row[0] for row in rows]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError(_("A grade de Bz deve ser estritamente crescente"))
        flags = {int(index): tuple(names) for index, names in (flags or {}).items() if names}
        metadata = {
            'tool_version': probe_qpt.__version__,
            'generated_at': timezone.now().isoformat(),
            'grid': {
                'bz_min': grid[0] if grid else None,
                'bz_max': grid[-1] if grid else None,
                'steps': len(grid),
            },
        }
        return cls(dict(config), columns, rows, flags, metadata)

    @property
    def grid(self) -> list[float]:
        return [row[0] for row in self.rows]

    def column(self, name: str) -> list[float]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]
