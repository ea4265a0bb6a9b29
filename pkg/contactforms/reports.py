"""
Result containers for verification runs.
"""
import math
from dataclasses import asdict, dataclass, field

import numpy as np


def plain(value):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe Python values."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


@dataclass
class VerificationReport:
    """Outcome of a single check."""
    check: str
    passed: bool = False
    params: dict = field(default_factory=dict)
    label: str = ''
    min_defect: float = None
    witness: dict = None
    singular_samples: list = field(default_factory=list)
    singular_count: int = 0
    residuals: list = field(default_factory=list)
    max_residual: float = None
    ranks: list = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    error: str = None
    elapsed: float = 0.0

    @property
    def status(self):
        return 'pass' if self.passed else 'fail'

    def fail(self, message):
        self.passed = False
        self.error = message
        return self

    def to_dict(self, timings=False):
        data = plain(asdict(self))
        data['status'] = self.status
        if not timings:
            data.pop('elapsed')
        return data

    def __str__(self):
        mark = '✓' if self.passed else '✗'
        extra = f" ({self.error})" if self.error else ''
        return f"{mark} {self.check}{extra}"


@dataclass
class SingularLocus:
    """Grid points where the contact defect is below tolerance."""
    points: list = field(default_factory=list)
    count: int = 0
    extents: dict = field(default_factory=dict)
    pinned: dict = field(default_factory=dict)
    steps: dict = field(default_factory=dict)
    grid: int = 0
    tol: float = 0.0

    @property
    def is_empty(self):
        return self.count == 0

    def pinned_names(self):
        return sorted(self.pinned)

    def matches(self, expected, slack=None):
        """True if exactly the ``expected`` coordinates are pinned near the given values."""
        if self.is_empty or set(expected) != set(self.pinned):
            return False
        for name, value in expected.items():
            width = slack if slack is not None else self.steps.get(name, 0.0)
            lo, hi = self.extents[name]
            if lo < value - width - 1e-12 or hi > value + width + 1e-12:
                return False
        return True

    def to_dict(self):
        return plain(asdict(self))
