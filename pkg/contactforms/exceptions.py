"""
Error types raised by the exterior-calculus engine.

Every error derives from ContactFormsError, itself a ValueError, so callers
that only care about "bad input" can keep catching ValueError.
"""


class ContactFormsError(ValueError):
    """Base class for all engine errors."""


class ExpressionSyntaxError(ContactFormsError):
    """Text does not conform to the expression or form grammar."""

    def __init__(self, message, text='', position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} (at position {position})")

    def pointer(self):
        """Return the offending text with a caret under the error position."""
        return f"{self.text}\n{' ' * self.position}^"


class UnknownIdentifierError(ContactFormsError):
    """An identifier is not a coordinate of the chart in use."""

    def __init__(self, name, chart_names=()):
        self.name = name
        known = ', '.join(chart_names)
        super().__init__(f"Unknown coordinate '{name}' (chart: {known})")


class ChartMismatchError(ContactFormsError):
    """Two forms live on different charts."""


class DegreeError(ContactFormsError):
    """Degree overflow, mixed-degree sums, or non-top degree where top is required."""


class DimensionError(ContactFormsError):
    """Chart dimension is unsuitable (e.g. even where odd is required)."""


class MissingRealizationError(ContactFormsError):
    """A profile or potential symbol has no numeric realization."""

    def __init__(self, name):
        self.name = name
        super().__init__(f"No realization supplied for '{name}'")


class DomainError(ContactFormsError):
    """A point lies outside the declared chart or profile domain."""


class CyclicBindingError(ContactFormsError):
    """Substitution bindings refer to each other."""


class ProfileInfeasibleError(ContactFormsError):
    """Profile parameters leave no room for the prescribed segments."""


class KernelDimensionError(ContactFormsError):
    """The kernel of a 2-form at a point is not one-dimensional."""

    def __init__(self, dimension, point=None):
        self.dimension = dimension
        self.point = point
        super().__init__(f"Kernel has dimension {dimension}, expected 1")


class VanishingFormError(ContactFormsError):
    """A 1-form vanishes at a point where its kernel is needed."""


class ConstructionError(ContactFormsError):
    """A builder received inconsistent ingredients."""


class CollarMismatchError(ConstructionError):
    """Adjacent regions of a piecewise form do not glue."""


class PartitionOfUnityError(ConstructionError):
    """Weights of a bundle sum do not add up to one."""


class MissingModelError(ConstructionError):
    """A contact model lacks its hatted partner."""


class ScenarioError(ContactFormsError):
    """A scenario file could not be parsed or resolved."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ''
        super().__init__(f"{prefix}{message}")
