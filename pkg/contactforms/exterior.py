"""
Exterior algebra of differential forms on a coordinate chart.

A chart is an ordered list of coordinates with the identity metric; its order
fixes the orientation (the positive volume form is the ascending wedge of all
differentials). Forms are homogeneous and store a map from strictly ascending
index tuples to canonical SymPy coefficients.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import sympy as sp

from . import conf, grammar
from .exceptions import (
    ChartMismatchError,
    CyclicBindingError,
    DegreeError,
    DimensionError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)
from .expr import (
    checked_division,
    checked_power,
    coordinate,
    format_scalar,
    parse_scalar,
    scalar_from_node,
    simplify,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Interval:
    """Closed coordinate range; ``None`` bounds are unbounded."""
    lo: float = None
    hi: float = None
    periodic: bool = False

    def contains(self, value, slack=1e-12):
        if self.periodic:
            return True
        if self.lo is not None and value < self.lo - slack:
            return False
        if self.hi is not None and value > self.hi + slack:
            return False
        return True

    @property
    def bounded(self):
        return self.lo is not None and self.hi is not None


def permutation_sign(sequence):
    """Sign of the permutation sorting ``sequence``; 0 if an entry repeats."""
    items = list(sequence)
    if len(set(items)) != len(items):
        return 0
    inversions = sum(1 for i in range(len(items)) for j in range(i + 1, len(items)) if items[i] > items[j])
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class Chart:
    """Ordered coordinates with per-coordinate domains and an identity metric."""
    coordinates: tuple
    domains: tuple = field(default=(), compare=False)
    factors: tuple = field(default=(), compare=False)

    def __post_init__(self):
        coords = tuple(self.coordinates)
        object.__setattr__(self, 'coordinates', coords)
        if len(set(coords)) != len(coords):
            raise DimensionError(f"Duplicate coordinate names in chart {coords}")
        for name in coords:
            if name in grammar.RESERVED:
                raise ExpressionSyntaxError(f"Coordinate name '{name}' is reserved", name, 0)
        domains = tuple(self.domains) or tuple(Interval() for _ in coords)
        if len(domains) != len(coords):
            raise DimensionError('One domain interval per coordinate is required')
        object.__setattr__(self, 'domains', domains)

    @classmethod
    def parse(cls, text):
        """Chart from ``"x1,y1,z1"``."""
        names = [n.strip() for n in text.split(',') if n.strip()]
        if not names:
            raise DimensionError('A chart needs at least one coordinate')
        return cls(tuple(names))

    @classmethod
    def product(cls, *charts, labels=None):
        """Flattened product chart recording which coordinates came from which factor."""
        coords, domains, factors = [], [], []
        labels = labels or [f"factor{i}" for i in range(len(charts))]
        for label, chart in zip(labels, charts):
            coords.extend(chart.coordinates)
            domains.extend(chart.domains)
            factors.append((label, chart.coordinates))
        return cls(tuple(coords), tuple(domains), tuple(factors))

    @property
    def dim(self):
        return len(self.coordinates)

    @cached_property
    def symbols(self):
        return tuple(coordinate(n) for n in self.coordinates)

    def index(self, name):
        try:
            return self.coordinates.index(name)
        except ValueError:
            raise UnknownIdentifierError(name, self.coordinates) from None

    def domain(self, name):
        return self.domains[self.index(name)]

    def with_domains(self, **intervals):
        """Copy of the chart with some domains replaced; values are Interval or (lo, hi)."""
        domains = list(self.domains)
        for name, value in intervals.items():
            domains[self.index(name)] = value if isinstance(value, Interval) else Interval(*value)
        return Chart(self.coordinates, tuple(domains), self.factors)

    def without(self, names):
        names = set(names)
        keep = [i for i, n in enumerate(self.coordinates) if n not in names]
        return Chart(
            tuple(self.coordinates[i] for i in keep),
            tuple(self.domains[i] for i in keep),
        )

    def factor(self, label):
        for name, coords in self.factors:
            if name == label:
                return coords
        raise KeyError(label)

    def __str__(self):
        return ','.join(self.coordinates)


class DifferentialForm:
    """Homogeneous differential form on a chart."""

    def __init__(self, chart, degree, terms=None):
        if degree < 0:
            raise DegreeError(f"Negative degree {degree}")
        self.chart = chart
        self.degree = degree
        collected = {}
        for indices, coefficient in (terms or {}).items():
            indices = tuple(indices)
            if len(indices) != degree:
                raise DegreeError(f"Term {indices} does not have degree {degree}")
            sign = permutation_sign(indices)
            if sign == 0:
                continue
            key = tuple(sorted(indices))
            collected.setdefault(key, []).append(sign * sp.sympify(coefficient))
        self.terms = {}
        for key in sorted(collected):
            value = simplify(sp.Add(*collected[key]))
            if value != 0:
                self.terms[key] = value
        if degree > chart.dim and self.terms:
            raise DegreeError(f"Degree {degree} exceeds chart dimension {chart.dim}")

    @classmethod
    def zero(cls, chart, degree):
        return cls(chart, degree)

    @classmethod
    def scalar(cls, chart, value):
        return cls(chart, 0, {(): value})

    @classmethod
    def differential(cls, chart, name):
        return cls(chart, 1, {(chart.index(name),): 1})

    @classmethod
    def from_names(cls, chart, terms):
        """Build from ``{("x", "y"): coefficient}`` keyed by coordinate names."""
        degree = len(next(iter(terms))) if terms else 0
        return cls(chart, degree, {tuple(chart.index(n) for n in names): c for names, c in terms.items()})

    @property
    def is_zero(self):
        return not self.terms

    def coefficient(self, *names):
        """Coefficient of ``d[names[0]]^...``, sign adjusted to the given order."""
        indices = [self.chart.index(n) for n in names]
        sign = permutation_sign(indices)
        if sign == 0 or len(indices) != self.degree:
            return sp.Integer(0)
        return sign * self.terms.get(tuple(sorted(indices)), sp.Integer(0))

    def items(self):
        """Terms keyed by coordinate names in chart order."""
        return [(tuple(self.chart.coordinates[i] for i in key), c) for key, c in self.terms.items()]

    def free_symbols(self):
        symbols = set()
        for c in self.terms.values():
            symbols |= c.free_symbols
        return symbols

    def map_coefficients(self, func):
        return DifferentialForm(self.chart, self.degree, {k: func(c) for k, c in self.terms.items()})

    def scale(self, factor):
        factor = sp.sympify(factor)
        return self.map_coefficients(lambda c: c * factor)

    def rechart(self, chart):
        """Express the form on ``chart``, which must contain every coordinate of the current chart."""
        if chart == self.chart:
            return self
        mapping = [chart.index(name) for name in self.chart.coordinates]
        return DifferentialForm(chart, self.degree, {tuple(mapping[i] for i in key): c for key, c in self.terms.items()})

    def _check_compatible(self, other):
        if not isinstance(other, DifferentialForm):
            raise TypeError(f"Expected a DifferentialForm, got {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartMismatchError(f"Charts differ: ({self.chart}) vs ({other.chart})")

    def __add__(self, other):
        if not isinstance(other, DifferentialForm):
            if self.degree != 0:
                return NotImplemented
            other = DifferentialForm.scalar(self.chart, other)
        self._check_compatible(other)
        if other.degree != self.degree:
            raise DegreeError(f"Cannot add forms of degree {self.degree} and {other.degree}")
        terms = dict(self.terms)
        merged = {}
        for key in set(terms) | set(other.terms):
            merged[key] = terms.get(key, 0) + other.terms.get(key, 0)
        return DifferentialForm(self.chart, self.degree, merged)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DifferentialForm):
            return wedge(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self.chart == other.chart and self.degree == other.degree and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        return f"DifferentialForm({format_form(self)!r}, chart=({self.chart}))"


@dataclass(frozen=True)
class VectorField:
    """Vector field with components keyed by coordinate name."""
    chart: Chart
    components: dict

    def component(self, index):
        return sp.sympify(self.components.get(self.chart.coordinates[index], 0))

    @classmethod
    def coordinate_field(cls, chart, name):
        chart.index(name)
        return cls(chart, {name: sp.Integer(1)})


def _overflow(chart, degree):
    if conf.get('WEDGE_OVERFLOW') == 'zero':
        logger.debug('Degree %s exceeds dimension %s, returning zero', degree, chart.dim)
        return DifferentialForm(chart, degree)
    raise DegreeError(f"Degree {degree} exceeds chart dimension {chart.dim}")


def wedge(a, b, *rest):
    """Exterior product; signs follow the permutation sorting the merged indices."""
    if rest:
        return wedge(wedge(a, b), *rest)
    a._check_compatible(b)
    degree = a.degree + b.degree
    if degree > a.chart.dim:
        return _overflow(a.chart, degree)
    terms = {}
    for i, ca in a.terms.items():
        for j, cb in b.terms.items():
            merged = i + j
            sign = permutation_sign(merged)
            if sign:
                terms.setdefault(tuple(sorted(merged)), []).append(sign * ca * cb)
    return DifferentialForm(a.chart, degree, {k: sp.Add(*v) for k, v in terms.items()})


def exterior_derivative(omega):
    """d ω; raises the degree by one."""
    chart = omega.chart
    if omega.degree + 1 > chart.dim:
        return DifferentialForm(chart, omega.degree + 1)
    terms = {}
    for key, c in omega.terms.items():
        for j, symbol in enumerate(chart.symbols):
            if j in key:
                continue
            partial = sp.diff(c, symbol)
            if partial != 0:
                terms.setdefault((j,) + key, []).append(partial)
    return DifferentialForm(chart, omega.degree + 1, {k: sp.Add(*v) for k, v in terms.items()})


def wedge_power(omega, n):
    """
    n-fold wedge of ω with itself.

    For even degree the terms commute, so the power is n! times the sum over
    n-element sets of pairwise disjoint terms. Odd-degree forms square to zero.
    """
    if n < 0:
        raise DegreeError(f"Wedge power must be non-negative, got {n}")
    chart = omega.chart
    if n == 0:
        return DifferentialForm.scalar(chart, 1)
    degree = n * omega.degree
    if degree > chart.dim:
        return _overflow(chart, degree)
    if n == 1:
        return omega
    if omega.degree == 0:
        return DifferentialForm.scalar(chart, omega.terms.get((), 0) ** n)
    if omega.degree % 2:
        return DifferentialForm(chart, degree)
    items = list(omega.terms.items())
    factor = math.factorial(n)
    terms = {}
    for combo in combinations(items, n):
        indices = sum((key for key, _ in combo), ())
        sign = permutation_sign(indices)
        if not sign:
            continue
        product = sp.Mul(factor * sign, *(c for _, c in combo))
        terms.setdefault(tuple(sorted(indices)), []).append(product)
    return DifferentialForm(chart, degree, {k: sp.Add(*v) for k, v in terms.items()})


def hodge_star(omega):
    """⋆ in the orthonormal coordinate frame: ⋆e_I = sign(I, I^c) e_{I^c}."""
    chart = omega.chart
    full = range(chart.dim)
    terms = {}
    for key, c in omega.terms.items():
        complement = tuple(i for i in full if i not in key)
        terms[complement] = permutation_sign(key + complement) * c
    return DifferentialForm(chart, chart.dim - omega.degree, terms)


def interior_product(v, omega):
    """ι_v ω, the antiderivation of degree -1. A 0-form gives the zero 0-form."""
    if v.chart != omega.chart:
        raise ChartMismatchError(f"Charts differ: ({v.chart}) vs ({omega.chart})")
    if omega.degree == 0:
        return DifferentialForm(omega.chart, 0)
    terms = {}
    for key, c in omega.terms.items():
        for position, index in enumerate(key):
            component = v.component(index)
            if component == 0:
                continue
            rest = key[:position] + key[position + 1:]
            terms.setdefault(rest, []).append((-1) ** position * component * c)
    return DifferentialForm(omega.chart, omega.degree - 1, {k: sp.Add(*v) for k, v in terms.items()})


def top_coefficient(omega):
    """Coefficient against the ascending wedge of all chart differentials."""
    if omega.degree != omega.chart.dim:
        raise DegreeError(f"Top coefficient needs degree {omega.chart.dim}, got {omega.degree}")
    return omega.terms.get(tuple(range(omega.chart.dim)), sp.Integer(0))


def _coerce_bindings(bindings, chart):
    result = {}
    for name, value in bindings.items():
        chart.index(name)
        if isinstance(value, str):
            value = parse_scalar(value)
        result[name] = sp.sympify(value)
    return result


def _resolve_bindings(bindings):
    """Compose bindings until no right-hand side mentions a bound coordinate."""
    bound = {coordinate(n): e for n, e in bindings.items()}
    resolved = {}

    def resolve(symbol, trail):
        if symbol in resolved:
            return resolved[symbol]
        if symbol in trail:
            chain = ' -> '.join(str(s) for s in trail + (symbol,))
            raise CyclicBindingError(f"Cyclic bindings: {chain}")
        e = bound[symbol]
        inner = {s: resolve(s, trail + (symbol,)) for s in e.free_symbols if s in bound}
        value = e.xreplace(inner) if inner else e
        resolved[symbol] = value
        return value

    for symbol in bound:
        resolve(symbol, ())
    return resolved


def substitute(omega, bindings, pullback=True):
    """
    Substitute coordinates by expressions.

    In pullback mode the bound coordinates leave the chart and their
    differentials expand by the chain rule in the remaining coordinates, so a
    constant binding restricts the form to a slice. With ``pullback=False``
    only the coefficients are evaluated along the bindings; chart and
    differentials are kept (a form along a submanifold, not on it).

    Raises:
        CyclicBindingError: if bindings refer to each other
        UnknownIdentifierError: for a binding outside the chart
    """
    chart = omega.chart
    resolved = _resolve_bindings(_coerce_bindings(bindings, chart))

    def coefficient(c):
        return c.subs(resolved, simultaneous=True) if resolved else c

    if not pullback:
        return omega.map_coefficients(coefficient)

    reduced = chart.without(bindings)
    leftover = set().union(*(e.free_symbols for e in resolved.values())) if resolved else set()
    bound_symbols = {coordinate(n) for n in bindings}
    if leftover & bound_symbols:
        raise CyclicBindingError('Bindings still reference bound coordinates after resolution')

    differentials = {}
    for i, name in enumerate(chart.coordinates):
        symbol = coordinate(name)
        if symbol in resolved:
            e = resolved[symbol]
            differentials[i] = DifferentialForm(
                reduced, 1,
                {(j,): sp.diff(e, s) for j, s in enumerate(reduced.symbols)},
            )
        else:
            differentials[i] = DifferentialForm.differential(reduced, name)

    result = DifferentialForm(reduced, omega.degree)
    for key, c in omega.terms.items():
        piece = DifferentialForm.scalar(reduced, coefficient(c))
        for i in key:
            piece = wedge(piece, differentials[i])
        result = result + piece
    return result


def pullback(omega, mapping):
    """
    Pull back along a self-map of the chart given by simultaneous substitution.

    Unlike ``substitute`` the chart is kept and a coordinate may appear on both
    sides (``{x: x + theta}``).
    """
    chart = omega.chart
    images = _coerce_bindings(mapping, chart)
    replacements = {coordinate(n): e for n, e in images.items()}
    differentials = []
    for name in chart.coordinates:
        e = images.get(name, coordinate(name))
        differentials.append(DifferentialForm(chart, 1, {(j,): sp.diff(e, s) for j, s in enumerate(chart.symbols)}))
    result = DifferentialForm(chart, omega.degree)
    for key, c in omega.terms.items():
        piece = DifferentialForm.scalar(chart, c.xreplace(replacements))
        for i in key:
            piece = wedge(piece, differentials[i])
        result = result + piece
    return result


def _form_from_node(node, text, chart):
    names = chart.coordinates
    kind = node.kind
    if kind == 'dform':
        name = node.args[0]
        if name not in names:
            raise UnknownIdentifierError(name, names)
        return DifferentialForm.differential(chart, name)
    if kind == 'add':
        result = None
        for sign, term in node.args:
            value = _form_from_node(term, text, chart)
            if sign == '-':
                value = -value
            if result is not None and result.degree != value.degree:
                raise DegreeError(
                    f"Mixed-degree sum: degree {result.degree} and {value.degree} (at position {term.loc})"
                )
            result = value if result is None else result + value
        return result
    if kind == 'neg':
        return -_form_from_node(node.args[0], text, chart)
    if kind == 'mul':
        left = _form_from_node(node.args[0], text, chart)
        right = _form_from_node(node.args[1], text, chart)
        if left.degree and right.degree:
            raise DegreeError(f"Use '^' or '∧' to wedge differentials (at position {node.loc})")
        return wedge(left, right)
    if kind == 'div':
        left = _form_from_node(node.args[0], text, chart)
        right = _form_from_node(node.args[1], text, chart)
        if right.degree:
            raise ExpressionSyntaxError('Cannot divide by a differential', text, node.loc)
        divisor = right.terms.get((), sp.Integer(0))
        checked_division(sp.Integer(1), divisor, text, node)
        return left.scale(1 / divisor)
    if kind in ('pow', 'wedge'):
        left = _form_from_node(node.args[0], text, chart)
        right = _form_from_node(node.args[1], text, chart)
        if kind == 'pow' and left.degree == 0 and right.degree == 0:
            base = left.terms.get((), sp.Integer(0))
            exponent = right.terms.get((), sp.Integer(0))
            return DifferentialForm.scalar(chart, checked_power(base, exponent, text, node))
        # '^' is either a power of scalars or a wedge of differentials, never a mix
        if kind == 'pow' and bool(left.degree) != bool(right.degree):
            raise ExpressionSyntaxError(
                "'^' between a form and a scalar; use power(...) for wedge powers "
                "or juxtaposition for scalar multiples", text, node.loc,
            )
        return wedge(left, right)
    return DifferentialForm.scalar(chart, scalar_from_node(node, text, names))


def parse_form(text, chart):
    """
    Parse a differential form such as ``"d[z1]+x1 d[y1]"`` on ``chart``.

    ``^`` between differentials (or ``∧`` anywhere) is the wedge product;
    between scalars ``^`` is a power.

    Raises:
        ExpressionSyntaxError: malformed text
        UnknownIdentifierError: ``d[name]`` outside the chart
        DegreeError: mixed-degree sums
    """
    return _form_from_node(grammar.parse(text), text, chart)


def _format_coefficient(c):
    if c == 1:
        return ''
    if c == -1:
        return '-'
    text = format_scalar(c)
    if isinstance(c, sp.Add):
        return f"({text}) "
    return f"{text} "


def format_form(omega, wedge_symbol='^'):
    """Print a form in the parseable form grammar, terms in chart order."""
    if omega.degree == 0:
        return format_scalar(omega.terms.get((), sp.Integer(0)))
    if omega.is_zero:
        return '0'
    pieces = []
    for names, c in omega.items():
        monomial = wedge_symbol.join(f"d[{n}]" for n in names)
        pieces.append(_format_coefficient(c) + monomial)
    text = pieces[0]
    for piece in pieces[1:]:
        text += f" - {piece[1:]}" if piece.startswith('-') else f" + {piece}"
    return text
