"""
Engine settings.

Values come from ``settings.CONTACTFORMS`` when Django is configured and fall
back to the defaults below otherwise, so the algebra can be imported from
plain scripts.
"""
from django.conf import settings

DEFAULTS = {
    'DEFAULT_TOL': 1e-9,
    'RANK_CUTOFF': 1e-10,
    'PROFILE_MARGIN': 1e-9,
    'DEFAULT_GRID': 21,
    'PROFILE_GRID': 201,
    'WEDGE_OVERFLOW': 'error',
    'SINGULAR_SAMPLE_LIMIT': 200,
    'MAX_GRID_POINTS': 2_000_000,
    'REPORT_DIR': 'reports',
}


def get(name):
    """Return the configured value for ``name``."""
    if name not in DEFAULTS:
        raise KeyError(f"Unknown contactforms setting: {name}")
    overrides = getattr(settings, 'CONTACTFORMS', {}) if settings.configured else {}
    return overrides.get(name, DEFAULTS[name])
