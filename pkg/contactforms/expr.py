"""
Scalar expressions over chart coordinates.

Scalars are SymPy expressions built from exact rationals, real coordinate
symbols, sums, products, non-negative integer powers, ``exp``, one-variable
profile applications ``f^{(k)}(arg)`` and multi-variable potentials
``psi(x, y)`` with their formal partial derivatives. The canonical form is the
fully expanded expression.
"""
import logging
from functools import lru_cache

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef
from sympy.printing.precedence import PRECEDENCE
from sympy.printing.str import StrPrinter

from . import grammar
from .exceptions import (
    DegreeError,
    DomainError,
    ExpressionSyntaxError,
    MissingRealizationError,
    UnknownIdentifierError,
)

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def coordinate(name):
    """Return the real SymPy symbol for a coordinate or parameter name."""
    return sp.Symbol(name, real=True)


class ProfileApplication(sp.Function):
    """
    Application of the ``order``-th derivative of a one-variable profile.

    Concrete classes are produced by ``profile_symbol``; the class name carries
    the primes so that ``f'`` and ``f''`` are distinct SymPy heads.
    """
    profile_name = None
    order = 0
    nargs = 1

    def fdiff(self, argindex=1):
        return profile_symbol(self.profile_name, self.order + 1)(self.args[0])

    def _eval_is_real(self):
        return self.args[0].is_real


@lru_cache(maxsize=None)
def profile_symbol(name, order=0):
    """SymPy function class for ``name`` differentiated ``order`` times."""
    if order < 0:
        raise ValueError(f"Derivative order must be non-negative, got {order}")
    return type(name + "'" * order, (ProfileApplication,), {
        'profile_name': name,
        'order': order,
        'nargs': 1,
    })


@lru_cache(maxsize=None)
def potential(name):
    """Abstract real function of several coordinates (monodromy potentials)."""
    return sp.Function(name, real=True)


def is_opaque(e):
    """True for profile applications, potentials and their derivatives."""
    return isinstance(e, (ProfileApplication, AppliedUndef, sp.Derivative))


def opaque_atoms(e):
    """Outermost opaque sub-expressions of ``e`` in deterministic order."""
    found = []

    def walk(node):
        if is_opaque(node):
            if node not in found:
                found.append(node)
            return
        for arg in node.args:
            walk(arg)

    walk(sp.sympify(e))
    return sorted(found, key=sp.default_sort_key)


def simplify(e):
    """Canonical form: the expanded expression. Idempotent."""
    return sp.expand(sp.sympify(e))


def diff(e, x):
    """Formal partial derivative of ``e`` with respect to coordinate ``x``."""
    if isinstance(x, str):
        x = coordinate(x)
    return simplify(sp.diff(e, x))


class ScalarPrinter(StrPrinter):
    """Prints scalars in the grammar accepted by ``parse_scalar``."""

    def _print_Pow(self, expr, rational=False):
        base, exponent = expr.as_base_exp()
        if exponent.is_Integer and exponent >= 0:
            return '%s^%s' % (self.parenthesize(base, PRECEDENCE['Pow'], strict=True), exponent)
        return super()._print_Pow(expr, rational=rational)

    def _print_ProfileApplication(self, expr):
        return "%s%s(%s)" % (expr.profile_name, "'" * expr.order, self._print(expr.args[0]))

    def _print_Exp1(self, expr):
        return 'exp(1)'

    def _print_Derivative(self, expr):
        variables = []
        for variable, count in expr.variable_count:
            variables.extend([self._print(variable)] * int(count))
        return 'D[%s, %s]' % (self._print(expr.expr), ', '.join(variables))


_printer = ScalarPrinter()


def format_scalar(e):
    """Render a scalar in the parseable grammar."""
    return _printer.doprint(sp.sympify(e))


def _syntax_error(message, text, node):
    return ExpressionSyntaxError(message, text, node.loc if node is not None else 0)


def checked_power(base, exponent, text='', node=None):
    """``base^exponent`` with a non-negative integer constant exponent."""
    if not (exponent.is_Integer and exponent >= 0):
        raise _syntax_error('Exponent must be a non-negative integer constant', text, node)
    return base ** exponent


def checked_division(numerator, denominator, text='', node=None):
    """Division restricted to nonzero rational constants."""
    if not denominator.is_Rational or denominator == 0:
        raise _syntax_error('Division is only allowed by nonzero rational constants', text, node)
    return numerator / denominator


def scalar_from_node(node, text='', chart_names=None, strict=False):
    """
    Convert a syntax-tree node into a SymPy scalar.

    Args:
        node: grammar.Node produced by ``grammar.parse``
        text: original text, used for error positions
        chart_names: coordinate names of the chart in use, if any
        strict: reject identifiers that are not chart coordinates

    Raises:
        ExpressionSyntaxError, UnknownIdentifierError, DegreeError
    """
    names = set(chart_names or ())

    def build(n):
        kind = n.kind
        if kind == 'num':
            return sp.Rational(n.args[0])
        if kind == 'name':
            ident = n.args[0]
            if ident in grammar.RESERVED:
                raise _syntax_error(f"'{ident}' is reserved", text, n)
            if strict and ident not in names:
                raise UnknownIdentifierError(ident, chart_names or ())
            return coordinate(ident)
        if kind == 'neg':
            return -build(n.args[0])
        if kind == 'add':
            total = sp.Integer(0)
            for sign, term in n.args:
                value = build(term)
                total = total - value if sign == '-' else total + value
            return total
        if kind == 'mul':
            return build(n.args[0]) * build(n.args[1])
        if kind == 'div':
            return checked_division(build(n.args[0]), build(n.args[1]), text, n)
        if kind == 'pow':
            return checked_power(build(n.args[0]), build(n.args[1]), text, n)
        if kind == 'call':
            return build_call(n)
        if kind == 'deriv':
            target = build(n.args[0])
            variables = []
            for ident in n.args[1:]:
                if strict and ident not in names:
                    raise UnknownIdentifierError(ident, chart_names or ())
                variables.append(coordinate(ident))
            return sp.diff(target, *variables)
        if kind in ('dform', 'wedge'):
            raise DegreeError(f"Differentials are not allowed in a scalar (at position {n.loc})")
        raise _syntax_error(f"Unsupported construct '{kind}'", text, n)

    def build_call(n):
        name, primes, raw_args = n.args
        args = [build(a) for a in raw_args]
        if name == 'exp':
            if primes or len(args) != 1:
                raise _syntax_error('exp takes exactly one argument', text, n)
            return sp.exp(args[0])
        if name in grammar.RESERVED:
            raise _syntax_error(f"'{name}' is reserved", text, n)
        if name in names:
            if primes or len(args) != 1:
                raise _syntax_error(f"Coordinate '{name}' cannot be called", text, n)
            return coordinate(name) * args[0]
        if len(args) == 1:
            return profile_symbol(name, primes)(args[0])
        if primes:
            raise _syntax_error('Primes are only allowed on one-variable profiles; use D[...]', text, n)
        return potential(name)(*args)

    return build(node)


def parse_scalar(text, chart=None, strict=False):
    """
    Parse a scalar expression into canonical form.

    Args:
        text: expression text, e.g. ``"2-(x^2+y^2)^2"``
        chart: optional Chart; calls on its coordinates read as products
        strict: reject identifiers that are not coordinates of ``chart``

    Returns:
        Expanded SymPy expression

    Raises:
        ExpressionSyntaxError: with the character position of the error
        UnknownIdentifierError: in strict mode
    """
    names = tuple(chart.coordinates) if chart is not None else ()
    tree = grammar.parse(text)
    return simplify(scalar_from_node(tree, text, names, strict))


class Point(dict):
    """Mapping from coordinate name to real value."""

    def check(self, chart):
        """
        Verify that every chart coordinate is assigned and inside its domain.

        Raises:
            DomainError: for a missing coordinate or an out-of-range value
        """
        for name, interval in zip(chart.coordinates, chart.domains):
            if name not in self:
                raise DomainError(f"Point assigns no value to coordinate '{name}'")
            if not interval.contains(self[name]):
                raise DomainError(
                    f"Coordinate {name}={self[name]} lies outside [{interval.lo}, {interval.hi}]"
                )
        return self


def _broadcast_shape(values):
    if not values:
        return ()
    return np.broadcast(*values).shape


def compile_scalar(e, names, realizations=None, parameters=None):
    """
    Build a vectorized numeric function of the coordinates ``names``.

    Profile applications call ``realizations[name].derivative(order)``; potentials
    call ``realizations[name].derivative(indices)`` where ``indices`` lists the
    argument positions differentiated. The returned callable takes one array per
    name and returns a float array of their broadcast shape.

    Raises:
        MissingRealizationError: for an opaque symbol without realization
        UnknownIdentifierError: for a free symbol that is neither a name nor a parameter
    """
    realizations = realizations or {}
    e = sp.sympify(e)
    if parameters:
        e = e.subs({coordinate(k): sp.sympify(v) for k, v in parameters.items()})
    symbols = [coordinate(n) for n in names]

    dummies = []
    evaluators = []
    replacements = {}
    for atom in opaque_atoms(e):
        dummy = sp.Dummy()
        replacements[atom] = dummy
        dummies.append(dummy)
        evaluators.append(_compile_opaque(atom, names, realizations, parameters))
    reduced = e.xreplace(replacements)

    unknown = reduced.free_symbols - set(symbols) - set(dummies)
    if unknown:
        missing = sorted(str(s) for s in unknown)[0]
        raise UnknownIdentifierError(missing, names)

    func = sp.lambdify(symbols + dummies, reduced, modules='numpy')

    def numeric(*values):
        arrays = [np.asarray(v, dtype=float) for v in values]
        shape = _broadcast_shape(arrays)
        with np.errstate(all='ignore'):
            extra = [evaluate_opaque(*arrays) for evaluate_opaque in evaluators]
            out = func(*arrays, *extra)
        return np.broadcast_to(np.asarray(out, dtype=float), shape).copy()

    return numeric


def _compile_opaque(atom, names, realizations, parameters):
    if isinstance(atom, ProfileApplication):
        realization = realizations.get(atom.profile_name)
        if realization is None:
            raise MissingRealizationError(atom.profile_name)
        inner = compile_scalar(atom.args[0], names, realizations, parameters)
        numeric = realization.derivative(atom.order)
        return lambda *arrays: numeric(inner(*arrays))

    if isinstance(atom, sp.Derivative):
        applied = atom.expr
        if not isinstance(applied, AppliedUndef):
            raise MissingRealizationError(format_scalar(atom))
        indices = []
        for variable, count in atom.variable_count:
            if variable not in applied.args:
                raise MissingRealizationError(format_scalar(atom))
            indices.extend([applied.args.index(variable)] * int(count))
        indices = tuple(sorted(indices))
    else:
        applied = atom
        indices = ()

    name = applied.func.__name__
    realization = realizations.get(name)
    if realization is None:
        raise MissingRealizationError(name)
    arguments = [compile_scalar(a, names, realizations, parameters) for a in applied.args]
    numeric = realization.derivative(indices)
    return lambda *arrays: numeric(*(arg(*arrays) for arg in arguments))


def evaluate(e, point, realizations=None, chart=None, parameters=None):
    """
    Evaluate a scalar at a point.

    Args:
        e: SymPy scalar
        point: mapping coordinate name -> value
        realizations: profile/potential name -> realization
        chart: when given, the point is checked against the chart domains
        parameters: values for non-coordinate symbols (e.g. R)

    Returns:
        float

    Raises:
        MissingRealizationError, DomainError
    """
    if chart is not None:
        Point(point).check(chart)
    e = sp.sympify(e)
    if not opaque_atoms(e):
        bindings = {coordinate(k): sp.nsimplify(v, rational=True) for k, v in point.items()}
        if parameters:
            bindings.update({coordinate(k): sp.sympify(v) for k, v in parameters.items()})
        exact = e.xreplace(bindings)
        if exact.is_Rational:
            return float(exact)
    names = sorted(point)
    numeric = compile_scalar(e, names, realizations, parameters)
    return float(numeric(*(point[n] for n in names)))
