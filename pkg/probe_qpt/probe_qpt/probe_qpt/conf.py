"""Access to the ``QPT_PROBE`` settings with built-in defaults."""

from typing import Any

from django.conf import settings

DEFAULTS = {
    'MAX_DIM': 2 ** 14,
    'HERMITIAN_TOL': 1e-12,
    'NORM_TOL': 1e-10,
    'DEGENERACY_TOL': 1e-9,
    'FLOAT_DIGITS': 12,
    'SWEEP_WORKERS': 4,
    'DEFAULT_BZ_MIN': -2.0,
    'DEFAULT_BZ_MAX': 2.0,
    'DEFAULT_STEPS': 81,
    'DEFAULT_BX': 0.1,
    'DEFAULT_EPS': 0.2,
    'DEFAULT_TAU': 1.6,
    'DEFAULT_TROTTER_STEPS': 1,
}


def get_setting(name: str) -> Any:
    """
    Returns a ``QPT_PROBE`` setting, falling back to the project default.

    Raises:
        KeyError: If ``name`` is not a known setting.
    """
    overrides = getattr(settings, 'QPT_PROBE', {})
    if name in overrides:
        return overrides[name]
    return DEFAULTS[name]
