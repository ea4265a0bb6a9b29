"""
Concrete realizations of the interpolation profiles f, g, h1, h2, u, k, g1, g2.

A profile is exact on a few prescribed segments (e.g. ``f = e^{-t}`` near
``t = 1``) and blends between consecutive segments with the smooth step

    S(x) = e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)}),   0 < x < 1.

The realization is one SymPy ``Piecewise`` whose derivatives come from
symbolic differentiation and are compiled with numpy. Inside forms a profile
only ever appears as an opaque symbol ``f(t)``; the realization enters through
numeric evaluation or through ``localize``.
"""
import logging
import math
import time
from dataclasses import dataclass

import numpy as np
import sympy as sp

from . import conf
from .exceptions import DomainError, MissingRealizationError, ProfileInfeasibleError
from .expr import ProfileApplication, coordinate, parse_scalar, profile_symbol, simplify
from .exterior import DifferentialForm
from .reports import VerificationReport

logger = logging.getLogger(__name__)


KINDS = ('f', 'g', 'h1', 'h2', 'u', 'k', 'g1', 'g2')

VARIABLES = {'f': 't', 'g': 't', 'k': 't', 'g1': 't', 'g2': 't', 'h1': 'r', 'h2': 'r', 'u': 'phi'}

SYMMETRY_TOL = 1e-12


def smooth_step(x):
    """Standard smooth step on (0, 1): all derivatives vanish at both ends."""
    return sp.exp(-1 / x) / (sp.exp(-1 / x) + sp.exp(-1 / (1 - x)))


def _exact(value):
    if isinstance(value, sp.Basic):
        return value
    return sp.Rational(str(value)) if isinstance(value, float) else sp.Integer(value)


@dataclass(frozen=True)
class Segment:
    """Closed interval on which the profile equals ``expression`` exactly."""
    lo: sp.Expr
    hi: sp.Expr
    expression: sp.Expr

    def contains(self, value, slack=1e-12):
        return float(self.lo) - slack <= value <= float(self.hi) + slack


def _vectorize(expression, variable):
    func = sp.lambdify(variable, expression, modules='numpy')

    def numeric(values):
        values = np.asarray(values, dtype=float)
        with np.errstate(all='ignore'):
            out = func(values)
        return np.broadcast_to(np.asarray(out, dtype=float), values.shape).copy()

    return numeric


def assemble(variable, segments):
    """Piecewise expression: segment branches joined by smooth-step blends."""
    pieces = []
    for i, segment in enumerate(segments):
        last = i == len(segments) - 1
        pieces.append((segment.expression, True if last else variable <= segment.hi))
        if last:
            break
        following = segments[i + 1]
        if following.lo == segment.hi:
            continue
        x = (variable - segment.hi) / (following.lo - segment.hi)
        step = smooth_step(x)
        pieces.append(((1 - step) * segment.expression + step * following.expression, variable < following.lo))
    return sp.Piecewise(*pieces)


class ProfileFunction:
    """
    Named one-variable profile with prescribed segments and a smooth realization.

    ``derivative(order)`` returns a vectorized numpy callable, so a profile can
    be handed directly to ``expr.compile_scalar`` as a realization.
    """

    def __init__(self, name, kind, variable, domain, segments, expression,
                 params=None, center=None, constraints=()):
        self.name = name
        self.kind = kind
        self.variable = variable
        self.domain = (float(domain[0]), float(domain[1]))
        self.segments = tuple(segments)
        self.expression = expression
        self.params = dict(params or {})
        self.center = center
        self.constraints = tuple(constraints)
        self._numeric = {}

    def __repr__(self):
        return f"ProfileFunction({self.name!r}, kind={self.kind!r}, domain={self.domain})"

    def derivative(self, order=0):
        if order not in self._numeric:
            self._numeric[order] = _vectorize(sp.diff(self.expression, self.variable, order), self.variable)
        return self._numeric[order]

    def __call__(self, values):
        return self.derivative(0)(values)

    def symbol(self, order=0):
        return profile_symbol(self.name, order)

    def apply(self, argument):
        """Opaque application ``name(argument)`` for use inside forms."""
        return self.symbol()(sp.sympify(argument))

    def segment_at(self, value):
        for segment in self.segments:
            if segment.contains(value):
                return segment
        return None

    def exact_value(self, value, order=0):
        """Exact derivative at ``value`` if it lies in a prescribed segment, else None."""
        segment = self.segment_at(float(value))
        if segment is None:
            return None
        derivative = sp.diff(segment.expression, self.variable, order)
        return sp.simplify(derivative.subs(self.variable, _exact(value)))

    def local_model(self, value=None):
        """Closed-form expression of the segment containing ``value`` (default: the center)."""
        value = self.center if value is None else value
        segment = self.segment_at(float(value))
        if segment is None:
            raise DomainError(f"Profile {self.name} has no prescribed segment at {value}")
        return segment.expression

    def _derived(self, name, transform, suffix_kind):
        s = coordinate('s')
        r = self.variable
        expression = transform(self.expression.subs(r, sp.sqrt(s)), s)
        segments = tuple(
            Segment(seg.lo ** 2, seg.hi ** 2, sp.simplify(transform(seg.expression.subs(r, sp.sqrt(s)), s)))
            for seg in self.segments
        )
        lo, hi = self.domain
        return ProfileFunction(
            name, f"{self.kind}{suffix_kind}", s, (lo ** 2, hi ** 2), segments, expression,
            params=dict(self.params, parent=self.name), center=0,
        )

    def on_squared_radius(self):
        """H(s) = h(√s): the disk profile as a function of s = x² + y²."""
        return self._derived(self.name.upper(), lambda e, s: e, ':s')

    def radial_quotient(self):
        """Q(s) = h(√s)/s, so that h(r) dφ = Q(x² + y²)(x dy - y dx)."""
        return self._derived(
            f"{self.name.upper()}Q", lambda e, s: sp.piecewise_fold(e / s), ':quotient',
        )


class ExpressionRealization:
    """Realization of a potential (or any opaque symbol) by an explicit expression."""

    def __init__(self, name, variables, expression):
        self.name = name
        self.variables = tuple(coordinate(v) if isinstance(v, str) else v for v in variables)
        self.expression = parse_scalar(expression) if isinstance(expression, str) else sp.sympify(expression)
        self._numeric = {}

    def derivative(self, indices=()):
        if isinstance(indices, int):
            indices = (0,) * indices
        indices = tuple(indices)
        if indices not in self._numeric:
            target = self.expression
            for i in indices:
                target = sp.diff(target, self.variables[i])
            func = sp.lambdify(self.variables, target, modules='numpy')

            def numeric(*values, _func=func):
                arrays = [np.asarray(v, dtype=float) for v in values]
                shape = np.broadcast(*arrays).shape if arrays else ()
                with np.errstate(all='ignore'):
                    out = _func(*arrays)
                return np.broadcast_to(np.asarray(out, dtype=float), shape).copy()

            self._numeric[indices] = numeric
        return self._numeric[indices]


class ProfileSet(dict):
    """
    Realizations by symbol name.

    Adding a disk profile also registers its Cartesian forms: ``h1`` brings
    ``H1`` (function of s = x² + y²), ``h2`` brings ``H2`` and ``H2Q``.
    """

    def add(self, realization):
        self[realization.name] = realization
        if isinstance(realization, ProfileFunction):
            if realization.kind in ('h1', 'h2'):
                squared = realization.on_squared_radius()
                self[squared.name] = squared
            if realization.kind == 'h2':
                quotient = realization.radial_quotient()
                self[quotient.name] = quotient
        return realization

    def profile(self, name):
        try:
            return self[name]
        except KeyError:
            raise MissingRealizationError(name) from None


def _check_params(kind, eps, width, R):
    if R < 1:
        raise ProfileInfeasibleError(f"R must be at least 1, got {R}")
    upper = sp.Rational(1, 4) if kind in ('g1', 'g2') else 1
    if not 0 < eps < upper:
        raise ProfileInfeasibleError(f"eps must lie in (0, {upper}) for kind {kind}, got {eps}")
    if width <= 0:
        raise ProfileInfeasibleError(f"Smoothing width must be positive, got {width}")


def _segments_for(kind, t, eps, width, R, model, interval):
    one = sp.Integer(1)
    half = sp.Rational(1, 2)
    if kind in ('f', 'g'):
        t1 = one - eps
        t0 = t1 - width
        if t0 <= 0:
            raise ProfileInfeasibleError(
                f"Smoothing width {width} leaves no room for the central segment (1 - eps - width = {t0})"
            )
        if kind == 'f':
            pieces = [(-one, -t1, sp.exp(t)), (-t0, t0, sp.exp(-t ** 2 / 2)), (t1, one, sp.exp(-t))]
        else:
            pieces = [(-one, -t1, one), (-t0, t0, -t), (t1, one, -one)]
        return pieces, (-one, one), sp.Integer(0)
    if kind in ('h1', 'h2'):
        r0 = one - width
        if r0 <= 0:
            raise ProfileInfeasibleError(f"Smoothing width {width} must be below 1 for kind {kind}")
        if kind == 'h2':
            pieces = [(0, r0, t ** 2), (one, R, one)]
        elif model == 'flat':
            pieces = [(0, 0, 2 * one), (0, r0, 2 - sp.exp(-1 / t ** 2)), (one, R, sp.exp(1 - t))]
        elif model == 'polynomial':
            pieces = [(0, r0, 2 - t ** 4), (one, R, sp.exp(1 - t))]
        else:
            raise ProfileInfeasibleError(f"Unknown h1 model '{model}'")
        return pieces, (sp.Integer(0), R), sp.Integer(0)
    if kind == 'u':
        lo, hi = interval if interval is not None else (sp.Integer(0), 2 * sp.pi * R)
        if hi - lo <= 2 * eps:
            raise ProfileInfeasibleError(f"Interval [{lo}, {hi}] is too short for eps={eps}")
        return [(lo, lo + eps, sp.Integer(0)), (hi - eps, hi, one)], (lo, hi), lo
    if kind == 'k':
        pieces = [(-1 - eps, -one, sp.exp(-1)), (-1 + eps, 1 - eps, sp.exp(t)), (one, 1 + eps, sp.E)]
        return pieces, (-1 - eps, 1 + eps), sp.Integer(0)
    if kind == 'g1':
        return [(-one, -1 + eps, one), (-half - eps, -half, sp.exp(t))], (-one, -half), -half
    if kind == 'g2':
        return [(half, half + eps, sp.exp(-t)), (1 - eps, one, one)], (half, one), half
    raise ProfileInfeasibleError(f"Unknown profile kind '{kind}' (expected one of {', '.join(KINDS)})")


CONSTRAINTS = {
    'f': ('even', 'positive', 'increasing_left', 'segments', 'exact_values', 'smooth_seams'),
    'g': ('odd', 'nonincreasing', 'segments', 'exact_values', 'smooth_seams'),
    'h1': ('positive', 'decreasing', 'segments', 'exact_values', 'smooth_seams'),
    'h2': ('positive_interior', 'nondecreasing', 'segments', 'exact_values', 'smooth_seams'),
    'u': ('nondecreasing', 'segments', 'flat_ends', 'derivative_bound', 'smooth_seams'),
    'k': ('positive', 'nondecreasing', 'segments', 'exact_values', 'smooth_seams'),
    'g1': ('positive', 'segments', 'smooth_seams'),
    'g2': ('positive', 'segments', 'smooth_seams'),
}


EXACT_VALUES = {
    'f': [(0, 0, 1), (0, 1, 0)],
    'g': [(0, 0, 0), (0, 1, -1)],
    'h1': [(0, 0, 2), (0, 1, 0)],
    'h2': [(0, 0, 0), (0, 1, 0)],
    'k': [(0, 0, 1), (0, 1, 1)],
}


def make_profile(kind, eps=0.1, R=10, width=0.1, model='polynomial', interval=None,
                 expression=None, name=None):
    """
    Build a profile of the given kind.

    Args:
        kind: one of f, g, h1, h2, u, k, g1, g2
        eps: size of the prescribed end segments
        R: outer radius for h1/h2 and circle length scale for u
        width: smoothing width between the central and outer segments
        model: "polynomial" (2 - r^4 near the axis) or "flat" for h1
        interval: (lo, hi) for u when it is not parametrized by [0, 2πR]
        expression: explicit realization text; skips the prescribed segments
        name: symbol name, defaults to the kind

    Returns:
        ProfileFunction

    Raises:
        ProfileInfeasibleError: if the parameters leave no room for the segments
    """
    name = name or kind
    eps, width, R = _exact(eps), _exact(width), _exact(R)
    if kind not in KINDS:
        raise ProfileInfeasibleError(f"Unknown profile kind '{kind}' (expected one of {', '.join(KINDS)})")
    _check_params(kind, eps, width, R)
    variable = coordinate(VARIABLES[kind])
    params = {'eps': float(eps), 'width': float(width), 'R': float(R), 'model': model}
    if interval is not None:
        interval = (_exact(interval[0]), _exact(interval[1]))
        params['interval'] = [float(interval[0]), float(interval[1])]

    pieces, domain, center = _segments_for(kind, variable, eps, width, R, model, interval)
    if expression is not None:
        realization = parse_scalar(expression) if isinstance(expression, str) else sp.sympify(expression)
        params['expression'] = str(expression)
        logger.debug('Custom %s profile %s = %s', kind, name, realization)
        return ProfileFunction(name, kind, variable, domain, (), realization, params, center, CONSTRAINTS[kind])

    segments = tuple(Segment(_exact(lo), _exact(hi), e) for lo, hi, e in pieces)
    profile = ProfileFunction(
        name, kind, variable, domain, segments, assemble(variable, segments), params, center, CONSTRAINTS[kind],
    )
    logger.debug('Built profile %s (%s) on [%s, %s]', name, kind, *profile.domain)
    return profile


def derivative_bound_constant(eps):
    """C in sup|u'| <= C/R for the u profile on [0, 2πR]."""
    return 1.0 / (math.pi - float(eps))


def localize(target, profiles, point):
    """
    Replace profile applications by the derivative of their prescribed segment.

    The segment is chosen by evaluating each application's argument at
    ``point`` (a partial assignment of coordinates); applications whose
    argument cannot be evaluated there are left untouched. Works on scalars
    and on DifferentialForms.

    Raises:
        DomainError: if an argument falls outside every prescribed segment
    """
    if isinstance(target, DifferentialForm):
        return target.map_coefficients(lambda c: localize(c, profiles, point))
    bindings = {coordinate(k): _exact(v) for k, v in point.items()}
    replacements = {}
    for atom in sp.sympify(target).atoms(ProfileApplication):
        profile = profiles.get(atom.profile_name)
        if profile is None or not isinstance(profile, ProfileFunction):
            continue
        argument = atom.args[0]
        value = argument.xreplace(bindings)
        if not value.is_number:
            continue
        segment = profile.segment_at(float(value))
        if segment is None:
            raise DomainError(f"No prescribed segment of {profile.name} contains {float(value)}")
        local = sp.diff(segment.expression, profile.variable, atom.order)
        replacements[atom] = local.subs(profile.variable, argument)
    if not replacements:
        return sp.sympify(target)
    return simplify(sp.sympify(target).xreplace(replacements))


def _violations(name, mask, grid, values, limit=10):
    indices = np.flatnonzero(mask)[:limit]
    return [{'constraint': name, 'point': float(grid[i]), 'value': float(values[i])} for i in indices]


def _check(report, name, ok_mask, grid, values):
    ok = bool(np.all(ok_mask))
    report.details[name] = 'ok' if ok else 'violated'
    if not ok:
        report.violations.extend(_violations(name, ~ok_mask, grid, values))
    return ok


def _seam_points(profile):
    points = []
    for left, right in zip(profile.segments, profile.segments[1:]):
        if right.lo != left.hi:
            points.extend([float(left.hi), float(right.lo)])
    return points


def validate_profile(profile, grid=None, partner=None, margin=None):
    """
    Check every constraint of a profile on a uniform grid.

    Strict inequalities of the paired constraints must exceed ``margin``; the
    smallest observed value is reported as the margin. Monotonicity is checked
    by sign.

    Args:
        profile: ProfileFunction
        grid: number of grid points over the profile domain
        partner: g for f, h2 for h1; adds f'g - g'f > 0 or h1 h2' - h1' h2 > 0
        margin: strict-inequality margin, default PROFILE_MARGIN

    Returns:
        VerificationReport (failures are report entries, never exceptions)
    """
    started = time.perf_counter()
    grid = grid or conf.get('PROFILE_GRID')
    margin = conf.get('PROFILE_MARGIN') if margin is None else margin
    report = VerificationReport(
        check=f"profile:{profile.name}",
        params=dict(profile.params, kind=profile.kind, grid=grid, margin=margin),
        label=f"verified on grid of {grid} points",
    )
    if grid < 2:
        return report.fail('Grid needs at least 2 points')

    lo, hi = profile.domain
    t = np.linspace(lo, hi, grid)
    value = profile(t)
    first = profile.derivative(1)(t)
    mins = []
    ok = True

    for constraint in profile.constraints:
        if constraint == 'even':
            ok &= _check(report, 'even', np.abs(value - profile(-t)) <= SYMMETRY_TOL, t, value - profile(-t))
        elif constraint == 'odd':
            ok &= _check(report, 'odd', np.abs(value + profile(-t)) <= SYMMETRY_TOL, t, value + profile(-t))
        elif constraint == 'positive':
            mins.append(float(value.min()))
            ok &= _check(report, 'positive', value > margin, t, value)
        elif constraint == 'positive_interior':
            interior = t > 0
            ok &= _check(report, 'positive_interior', value[interior] > 0, t[interior], value[interior])
        elif constraint == 'increasing_left':
            left = t < 0
            ok &= _check(report, 'increasing_left', first[left] > 0, t[left], first[left])
        elif constraint == 'nonincreasing':
            ok &= _check(report, 'nonincreasing', first <= SYMMETRY_TOL, t, first)
        elif constraint == 'nondecreasing':
            ok &= _check(report, 'nondecreasing', first >= -SYMMETRY_TOL, t, first)
        elif constraint == 'decreasing':
            interior = t > 0
            ok &= _check(report, 'decreasing', first[interior] < 0, t[interior], first[interior])
        elif constraint == 'segments':
            ok &= _check_segments(report, profile, t, value)
        elif constraint == 'exact_values':
            ok &= _check_exact_values(report, profile)
        elif constraint == 'flat_ends':
            ends = np.zeros_like(t, dtype=bool)
            for segment in profile.segments:
                ends |= (t >= float(segment.lo)) & (t <= float(segment.hi))
            ok &= _check(report, 'flat_ends', first[ends] == 0, t[ends], first[ends])
        elif constraint == 'derivative_bound':
            bound = derivative_bound_constant(profile.params['eps']) / profile.params['R']
            sup = float(np.abs(first).max())
            report.thresholds['sup_derivative'] = sup
            report.thresholds['C'] = sup * profile.params['R']
            report.details['derivative_bound'] = f"sup|u'| = {sup:.6g} <= C/R = {bound:.6g}"
            if sup > bound + SYMMETRY_TOL:
                ok = False
                report.violations.append({'constraint': 'derivative_bound', 'point': None, 'value': sup})
        elif constraint == 'smooth_seams':
            ok &= _check_smooth_seams(report, profile)

    if partner is not None:
        paired_ok, paired_min = _check_pair(report, profile, partner, grid, margin)
        ok &= paired_ok
        mins.append(paired_min)

    if mins:
        report.min_defect = min(mins)
    report.passed = bool(ok)
    report.elapsed = time.perf_counter() - started
    logger.info('Profile %s: %s', profile.name, report.status)
    return report


def _check_segments(report, profile, t, value):
    if not profile.segments:
        report.details['segments'] = 'no prescribed segments'
        return True
    ok = True
    for segment in profile.segments:
        inside = (t >= float(segment.lo)) & (t <= float(segment.hi))
        if not inside.any():
            continue
        exact = _vectorize(segment.expression, profile.variable)(t[inside])
        ok &= bool(np.all(np.abs(value[inside] - exact) <= SYMMETRY_TOL * np.maximum(1.0, np.abs(exact))))
        if not ok:
            report.violations.extend(
                _violations('segments', np.abs(value[inside] - exact) > SYMMETRY_TOL, t[inside], value[inside])
            )
    report.details['segments'] = 'ok' if ok else 'violated'
    return ok


def _check_exact_values(report, profile):
    ok = True
    for point, order, expected in EXACT_VALUES.get(profile.kind, []):
        if profile.segments:
            actual = profile.exact_value(point, order)
        else:
            actual = sp.Float(profile.derivative(order)(np.array([float(point)]))[0])
        matches = actual is not None and abs(float(actual) - expected) <= SYMMETRY_TOL
        ok &= matches
        label = profile.name + "'" * order
        report.details[f"{label}({point})"] = None if actual is None else float(actual)
        if not matches:
            report.violations.append({'constraint': 'exact_values', 'point': point, 'value': None if actual is None else float(actual)})
    return ok


def _check_smooth_seams(report, profile, delta=1e-7, tol=1e-6):
    second = profile.derivative(2)
    ok = True
    for point in _seam_points(profile):
        jump = float(abs(second(np.array([point + delta]))[0] - second(np.array([point - delta]))[0]))
        if not math.isfinite(jump) or jump > tol:
            ok = False
            report.violations.append({'constraint': 'smooth_seams', 'point': point, 'value': jump})
    report.details['smooth_seams'] = 'ok' if ok else 'violated'
    return ok


def _check_pair(report, profile, partner, grid, margin):
    kinds = (profile.kind, partner.kind)
    lo, hi = profile.domain
    t = np.linspace(lo, hi, grid)
    p, dp = profile(t), profile.derivative(1)(t)
    q, dq = partner(t), partner.derivative(1)(t)
    if kinds == ('f', 'g'):
        name = "f'g - g'f"
        values = dp * q - dq * p
        mask = np.ones_like(t, dtype=bool)
    elif kinds == ('h1', 'h2'):
        name = "h1 h2' - h1' h2"
        values = p * dq - dp * q
        mask = t > 0
    else:
        report.details['pair'] = f"no paired constraint for kinds {kinds}"
        return False, float('nan')
    observed = float(values[mask].min())
    report.thresholds['pair_margin'] = observed
    ok = _check(report, name, values[mask] > margin, t[mask], values[mask])
    return ok, observed
