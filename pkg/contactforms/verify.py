"""
Contactness, confoliation, tau, null direction, rank and accessibility checks.

Symbolic quantities (defects, tau) are exact; positivity, kernels and ranks
are evaluated numerically on grids or at points. Grid results are evidence,
not proof, and reports say so in their label.
"""
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy import linalg

from . import conf
from .constructions import open_book_correction, open_book_form, open_book_page_term
from .exceptions import (
    ContactFormsError,
    DegreeError,
    DimensionError,
    DomainError,
    KernelDimensionError,
    VanishingFormError,
)
from .expr import Point, coordinate, compile_scalar, evaluate, format_scalar, simplify
from .exterior import Interval, exterior_derivative, hodge_star, top_coefficient, wedge, wedge_power
from .profiles import derivative_bound_constant, make_profile
from .reports import SingularLocus, VerificationReport

logger = logging.getLogger(__name__)


def _half_dimension(eta):
    if eta.degree != 1:
        raise DegreeError(f"Expected a 1-form, got degree {eta.degree}")
    if eta.chart.dim % 2 == 0:
        raise DimensionError(f"Contact defect needs an odd-dimensional chart, got dimension {eta.chart.dim}")
    return (eta.chart.dim - 1) // 2


def contact_defect(eta):
    """Top coefficient of eta ^ (d eta)^k on a (2k+1)-dimensional chart."""
    k = _half_dimension(eta)
    return top_coefficient(wedge(eta, wedge_power(exterior_derivative(eta), k)))


def tau(eta):
    """The 2-form *(eta ^ (d eta)^{k-1})."""
    k = _half_dimension(eta)
    if k < 1:
        raise DimensionError('tau needs a chart of dimension at least 3')
    return hodge_star(wedge(eta, wedge_power(exterior_derivative(eta), k - 1)))


def scaling_identity(eta, k):
    """k^{N+1} defect(eta): the defect of k eta for any function k, since eta ^ eta = 0."""
    n = _half_dimension(eta)
    return simplify(sp.sympify(k) ** (n + 1) * contact_defect(eta))


def collar_factor_identity(eta, s='s', n=None):
    """e^{ns} times the defect restricted to s = 0."""
    if n is None:
        n = len(eta.chart.factor('fiber')) // 2
    defect = contact_defect(eta)
    return simplify(sp.exp(n * coordinate(s)) * defect.subs(coordinate(s), 0))


# -- grids ----------------------------------------------------------------------

def grid_axes(chart, domain=None, grid=None):
    """
    Sample values per coordinate.

    ``domain`` maps a coordinate to a number (pinned), an (lo, hi) pair or an
    Interval; other coordinates use the chart domain, and unbounded ones are
    pinned at 0. Periodic ranges exclude their right end.

    Raises:
        DomainError: when the grid would exceed MAX_GRID_POINTS
    """
    domain = domain or {}
    default = conf.get('DEFAULT_GRID')
    axes = []
    for name, interval in zip(chart.coordinates, chart.domains):
        bounds = domain.get(name, interval)
        count = grid.get(name, default) if isinstance(grid, dict) else (grid or default)
        if isinstance(bounds, (int, float, sp.Number)):
            values = np.array([float(bounds)])
        else:
            if isinstance(bounds, Interval):
                lo, hi, periodic = bounds.lo, bounds.hi, bounds.periodic
            else:
                lo, hi = bounds
                periodic = False
            if lo is None or hi is None:
                values = np.array([0.0])
            elif float(lo) == float(hi) or count < 2:
                values = np.array([float(lo)])
            else:
                values = np.linspace(float(lo), float(hi), count, endpoint=not periodic)
        axes.append((name, values))
    total = math.prod(len(values) for _, values in axes)
    if total > conf.get('MAX_GRID_POINTS'):
        raise DomainError(f"Grid of {total} points exceeds MAX_GRID_POINTS; pin more coordinates")
    return axes


def _broadcast(axes):
    ndim = len(axes)
    arrays = []
    for i, (_, values) in enumerate(axes):
        shape = [1] * ndim
        shape[i] = len(values)
        arrays.append(values.reshape(shape))
    return arrays


def _point(axes, index):
    shape = tuple(len(values) for _, values in axes)
    multi = np.unravel_index(index, shape)
    return {name: float(values[i]) for (name, values), i in zip(axes, multi)}


def _grid_label(axes):
    counts = [len(values) for _, values in axes]
    varied = {name: len(values) for name, values in axes if len(values) > 1}
    return f"verified on grid of {math.prod(counts)} points ({', '.join(f'{k}:{v}' for k, v in varied.items())})"


def scan(expression, axes, realizations=None, parameters=None):
    """Evaluate a scalar on every grid point; returns a flat array in C order."""
    names = [name for name, _ in axes]
    numeric = compile_scalar(expression, names, realizations, parameters)
    shape = tuple(len(values) for _, values in axes)
    values = numeric(*_broadcast(axes))
    return np.broadcast_to(values, shape).ravel()


def _singular_samples(axes, values, tol, limit=None):
    limit = conf.get('SINGULAR_SAMPLE_LIMIT') if limit is None else limit
    indices = np.flatnonzero(np.abs(values) < tol)
    return indices, [_point(axes, i) for i in indices[:limit]]


def check_contact(eta, domain=None, grid=None, tol=None, mode='contact', realizations=None,
                  parameters=None, defect=None, name=None):
    """
    Evaluate the contact defect on a grid.

    Contact mode passes iff min > tol, confoliation mode iff min >= -tol.
    Evaluation problems are recorded in the report rather than raised.
    """
    started = time.perf_counter()
    tol = conf.get('DEFAULT_TOL') if tol is None else tol
    report = VerificationReport(check=name or mode, params={'mode': mode, 'tol': tol, 'grid': grid or conf.get('DEFAULT_GRID')})
    if mode not in ('contact', 'confoliation'):
        return report.fail(f"Unknown mode '{mode}'")
    try:
        defect = contact_defect(eta) if defect is None else defect
        axes = grid_axes(eta.chart, domain, grid)
        values = scan(defect, axes, realizations, parameters)
    except ContactFormsError as e:
        return report.fail(str(e))

    report.label = _grid_label(axes)
    finite = np.isfinite(values)
    if not finite.all():
        report.witness = _point(axes, int(np.flatnonzero(~finite)[0]))
        return report.fail('Defect is not finite on the whole grid')

    index = int(np.argmin(values))
    report.min_defect = float(values[index])
    report.witness = _point(axes, index)
    indices, samples = _singular_samples(axes, values, tol)
    report.singular_count = int(indices.size)
    report.singular_samples = samples
    report.details['max_defect'] = float(values.max())
    if mode == 'contact':
        report.passed = report.min_defect > tol
    else:
        report.passed = report.min_defect >= -tol
    report.elapsed = time.perf_counter() - started
    logger.info('%s check: %s (min defect %.6g)', mode, report.status, report.min_defect)
    return report


def singular_locus(eta, domain=None, grid=None, tol=None, realizations=None, parameters=None,
                   radial=None, defect=None):
    """
    Grid points where |defect| < tol, with the pinned coordinates fitted from them.

    A varied coordinate is pinned when all singular samples share one grid
    value. ``radial`` names a disk pair (x, y) whose radius extent is reported.
    """
    tol = conf.get('DEFAULT_TOL') if tol is None else tol
    defect = contact_defect(eta) if defect is None else defect
    axes = grid_axes(eta.chart, domain, grid)
    values = scan(defect, axes, realizations, parameters)
    indices, samples = _singular_samples(axes, values, tol)
    locus = SingularLocus(points=samples, count=int(indices.size), grid=grid or conf.get('DEFAULT_GRID'), tol=tol)
    if not indices.size:
        return locus

    shape = tuple(len(v) for _, v in axes)
    multi = np.unravel_index(indices, shape)
    coords = {}
    for (name, axis), position in zip(axes, multi):
        coords[name] = axis[position]
        if len(axis) < 2:
            continue
        lo, hi = float(coords[name].min()), float(coords[name].max())
        step = float(axis[1] - axis[0])
        locus.extents[name] = (lo, hi)
        locus.steps[name] = step
        if hi - lo < step / 2:
            locus.pinned[name] = lo
    if radial is not None:
        x, y = radial
        r = np.hypot(coords[x], coords[y])
        locus.extents['r'] = (float(r.min()), float(r.max()))
    logger.info('Singular locus: %s points, pinned %s', locus.count, locus.pinned_names())
    return locus


# -- pointwise linear algebra ---------------------------------------------------

class FormEvaluator:
    """Compiled coefficients of a form, evaluated at single points."""

    def __init__(self, form, realizations=None, parameters=None):
        self.form = form
        names = form.chart.coordinates
        self._terms = [(key, compile_scalar(c, names, realizations, parameters)) for key, c in form.terms.items()]

    def _arguments(self, point):
        Point(point).check(self.form.chart)
        return [float(point[name]) for name in self.form.chart.coordinates]

    def vector(self, point):
        if self.form.degree != 1:
            raise DegreeError(f"Expected a 1-form, got degree {self.form.degree}")
        args = self._arguments(point)
        out = np.zeros(self.form.chart.dim)
        for (i,), func in self._terms:
            out[i] = float(func(*args))
        return out

    def matrix(self, point):
        """Antisymmetric coefficient matrix of a 2-form."""
        if self.form.degree != 2:
            raise DegreeError(f"Expected a 2-form, got degree {self.form.degree}")
        args = self._arguments(point)
        n = self.form.chart.dim
        out = np.zeros((n, n))
        for (i, j), func in self._terms:
            value = float(func(*args))
            out[i, j] = value
            out[j, i] = -value
        return out


def coefficient_matrix(two_form, point, realizations=None, parameters=None):
    return FormEvaluator(two_form, realizations, parameters).matrix(point)


def numeric_rank(matrix, cutoff=None):
    """Number of singular values above ``cutoff`` times the largest one."""
    cutoff = conf.get('RANK_CUTOFF') if cutoff is None else cutoff
    if matrix.size == 0:
        return 0
    s = linalg.svdvals(matrix)
    if s[0] == 0:
        return 0
    return int(np.sum(s > cutoff * s[0]))


def null_direction(two_form, point, realizations=None, parameters=None, cutoff=None, evaluator=None):
    """
    Unit vector spanning the kernel of a 2-form at ``point``.

    The sign is fixed so that the largest component is positive.

    Raises:
        KernelDimensionError: unless the kernel is one-dimensional
    """
    cutoff = conf.get('RANK_CUTOFF') if cutoff is None else cutoff
    evaluator = evaluator or FormEvaluator(two_form, realizations, parameters)
    kernel = linalg.null_space(evaluator.matrix(point), rcond=cutoff)
    if kernel.shape[1] != 1:
        raise KernelDimensionError(kernel.shape[1], dict(point))
    v = kernel[:, 0]
    largest = int(np.argmax(np.abs(v)))
    return -v if v[largest] < 0 else v


def rank_on_kernel(eta, point, realizations=None, parameters=None, cutoff=None):
    """
    Rank of d eta restricted to the hyperplane ker eta(p).

    Raises:
        VanishingFormError: if eta(p) = 0
    """
    covector = FormEvaluator(eta, realizations, parameters).vector(point)
    if not np.any(covector):
        raise VanishingFormError(f"The 1-form vanishes at {dict(point)}")
    basis = linalg.null_space(covector[None, :])
    curvature = FormEvaluator(exterior_derivative(eta), realizations, parameters).matrix(point)
    return numeric_rank(basis.T @ curvature @ basis, cutoff)


def tangent_matrix(chart, tangents, point):
    """Columns are the tangent vectors, given as {coordinate: component} with scalar components."""
    columns = []
    for vector in tangents:
        column = np.zeros(chart.dim)
        for name, component in vector.items():
            column[chart.index(name)] = float(evaluate(component, point)) if isinstance(component, sp.Basic) else float(component)
        columns.append(column)
    return np.column_stack(columns)


def rotation_field(x='x', y='y'):
    """-y d/dx + x d/dy, the angular direction of a disk."""
    return {x: -coordinate(y), y: coordinate(x)}


def slice_rank(two_form, point, tangents, realizations=None, parameters=None, cutoff=None):
    """Rank of a 2-form restricted to the span of ``tangents``."""
    matrix = FormEvaluator(two_form, realizations, parameters).matrix(point)
    basis = tangent_matrix(two_form.chart, tangents, point)
    return numeric_rank(basis.T @ matrix @ basis, cutoff)


# -- accessibility --------------------------------------------------------------

@dataclass(frozen=True)
class RadialPath:
    """r -> base + r (cos a, sin a) in the (x, y) disk, r in (start, stop]."""
    x: str
    y: str
    base: dict = field(default_factory=dict)
    angle: float = 0.0
    start: float = 0.0
    stop: float = 1.0
    samples: int = 100

    def points(self):
        c, s = math.cos(self.angle), math.sin(self.angle)
        tangent = {self.x: c, self.y: s}
        for i in range(1, self.samples + 1):
            r = self.start + (self.stop - self.start) * i / self.samples
            point = dict(self.base)
            point[self.x] = r * c
            point[self.y] = r * s
            yield point, tangent


@dataclass(frozen=True)
class LinePath:
    """base + s direction for s in [start, stop]."""
    base: dict
    direction: dict
    start: float = 0.0
    stop: float = 1.0
    samples: int = 100

    def points(self):
        norm = math.sqrt(sum(float(v) ** 2 for v in self.direction.values()))
        tangent = {k: float(v) / norm for k, v in self.direction.items()}
        for s in np.linspace(self.start, self.stop, self.samples):
            point = dict(self.base)
            for name, component in self.direction.items():
                point[name] = point.get(name, 0.0) + float(s) * float(component)
            yield point, tangent


def accessibility_check(eta, path, tol=None, span=None, realizations=None, parameters=None, cutoff=None):
    """
    Check that the path tangent is orthogonal to Null(tau) at every sample.

    ``eta`` may be the 1-form or tau itself. ``span`` lists coordinates the
    null direction must lie in; the norm of its other components is reported
    as a second residual.
    """
    started = time.perf_counter()
    tol = conf.get('DEFAULT_TOL') if tol is None else tol
    report = VerificationReport(check='accessibility', params={'tol': tol, 'span': list(span or [])})
    try:
        two_form = eta if eta.degree == 2 else tau(eta)
        evaluator = FormEvaluator(two_form, realizations, parameters)
    except ContactFormsError as e:
        return report.fail(str(e))
    chart = two_form.chart
    outside = [i for i, name in enumerate(chart.coordinates) if span and name not in span]
    span_residuals, kernel_residuals, failures = [], [], []
    samples = 0
    for point, tangent in path.points():
        samples += 1
        try:
            v = null_direction(two_form, point, cutoff=cutoff, evaluator=evaluator)
        except KernelDimensionError as e:
            failures.append({'point': point, 'kernel_dimension': e.dimension})
            continue
        except ContactFormsError as e:
            return report.fail(str(e))
        direction = np.zeros(chart.dim)
        for name, component in tangent.items():
            direction[chart.index(name)] = component
        report.residuals.append(abs(float(v @ direction)))
        kernel_residuals.append(float(np.linalg.norm(evaluator.matrix(point) @ v)))
        if span:
            span_residuals.append(float(np.linalg.norm(v[outside])))

    report.details['samples'] = samples
    report.details['kernel_failures'] = failures[:10]
    report.details['max_kernel_residual'] = max(kernel_residuals, default=None)
    if span:
        report.details['max_span_residual'] = max(span_residuals, default=None)
    if failures:
        report.details['kernel_dimensions'] = sorted({f['kernel_dimension'] for f in failures})
    report.max_residual = max(report.residuals, default=None)
    report.passed = (
        not failures
        and report.max_residual is not None
        and report.max_residual < tol
        and (not span or max(span_residuals) < tol)
    )
    if failures:
        report.error = f"Kernel is not one-dimensional at {len(failures)} samples"
    report.elapsed = time.perf_counter() - started
    logger.info('Accessibility: %s (max residual %s)', report.status, report.max_residual)
    return report


# -- symbolic comparisons -------------------------------------------------------

def _monomial(names):
    return '^'.join(names) if names else '1'


def forms_equal(a, b, name='equal'):
    """Exact comparison of coefficient maps; differing monomials are reported."""
    report = VerificationReport(check=name)
    if a.degree != b.degree or a.chart != b.chart:
        return report.fail(f"Cannot compare degree {a.degree} on ({a.chart}) with degree {b.degree} on ({b.chart})")
    difference = a - b
    for names, c in difference.items():
        report.violations.append({'constraint': 'coefficient', 'point': _monomial(names), 'value': format_scalar(c)})
    report.details['terms'] = len(a.terms)
    report.passed = difference.is_zero
    return report


def differs_by_factor(a, b, monomials, factor, name='differs'):
    """
    ``b`` equals ``a`` except on ``monomials``, where b's coefficient is
    ``factor`` times a's.
    """
    report = VerificationReport(check=name, params={'monomials': [_monomial(m) for m in monomials], 'factor': format_scalar(factor)})
    if a.chart != b.chart or a.degree != b.degree:
        return report.fail('Forms live on different charts or have different degrees')
    targets = {tuple(m) for m in monomials}
    ok = True
    for names, c in (a - b).items():
        if names in targets:
            continue
        ok = False
        report.violations.append({'constraint': 'coefficient', 'point': _monomial(names), 'value': format_scalar(c)})
    for names in targets:
        expected = simplify(factor * a.coefficient(*names))
        actual = b.coefficient(*names)
        if simplify(expected - actual) != 0 or actual == a.coefficient(*names):
            ok = False
            report.violations.append({'constraint': 'factor', 'point': _monomial(names), 'value': format_scalar(actual)})
    report.passed = ok
    return report


def defect_identity(eta, expected, name='defect_identity'):
    """The contact defect of eta equals ``expected`` exactly."""
    report = VerificationReport(check=name)
    try:
        difference = simplify(contact_defect(eta) - expected)
    except ContactFormsError as e:
        return report.fail(str(e))
    report.details['expected'] = format_scalar(expected)
    if difference != 0:
        report.details['difference'] = format_scalar(difference)
    report.passed = difference == 0
    return report


def zero_check(form, name='zero'):
    report = VerificationReport(check=name)
    for names, c in form.items():
        report.violations.append({'constraint': 'coefficient', 'point': _monomial(names), 'value': format_scalar(c)})
    report.passed = form.is_zero
    return report


# -- thresholds -----------------------------------------------------------------

def contact_threshold(eta, parameter, lo, hi, domain=None, grid=None, tol=None, realizations=None,
                      parameters=None, resolution=None):
    """
    Smallest value of a symbolic parameter (R, K, ...) for which the grid
    defect is positive, by bisection on [lo, hi].

    Assumes positivity is monotone in the parameter; the found value is
    confirmed at 2x and 4x.
    """
    started = time.perf_counter()
    tol = conf.get('DEFAULT_TOL') if tol is None else tol
    resolution = (hi - lo) * 1e-3 if resolution is None else resolution
    report = VerificationReport(check=f"threshold:{parameter}", params={'lo': lo, 'hi': hi, 'resolution': resolution, 'tol': tol})
    try:
        defect = contact_defect(eta)
        axes = grid_axes(eta.chart, domain, grid)
        names = [name for name, _ in axes] + [parameter]
        numeric = compile_scalar(defect, names, realizations, parameters)
    except ContactFormsError as e:
        return report.fail(str(e))
    arrays = _broadcast(axes)
    report.label = _grid_label(axes)

    def minimum(value):
        values = numeric(*arrays, np.asarray(float(value)))
        return float(values.min()) if np.all(np.isfinite(values)) else -math.inf

    if minimum(hi) <= tol:
        return report.fail(f"Defect is not positive at {parameter}={hi}")
    if minimum(lo) > tol:
        threshold = lo
    else:
        a, b = lo, hi
        while b - a > resolution:
            middle = (a + b) / 2
            if minimum(middle) > tol:
                b = middle
            else:
                a = middle
        threshold = b
    confirmed = {f"{factor}x": minimum(threshold * factor) for factor in (1, 2, 4)}
    report.thresholds[parameter] = threshold
    report.details['confirmed_min_defect'] = confirmed
    report.min_defect = confirmed['1x']
    report.passed = all(v > tol for v in confirmed.values())
    report.elapsed = time.perf_counter() - started
    logger.info('Threshold for %s: %.6g', parameter, threshold)
    return report


def check_piecewise(piecewise, grid=None, tol=None, domain=None, realizations=None, mode='contact'):
    """Grid defect on every region over its own interval of the distinguished coordinate."""
    report = VerificationReport(check=f"regions:{piecewise.name or 'piecewise'}", params={'mode': mode})
    realizations = dict(piecewise.profiles, **(realizations or {}))
    ok = True
    minima = []
    for region in piecewise.regions:
        bounds = dict(domain or {})
        bounds[piecewise.coordinate] = tuple(float(v) for v in region.interval)
        sub = check_contact(region.form, bounds, grid, tol, mode, realizations, name=region.name)
        report.details[region.name] = sub.to_dict()
        ok &= sub.passed
        if sub.min_defect is not None:
            minima.append(sub.min_defect)
    report.min_defect = min(minima) if minima else None
    report.passed = bool(ok)
    return report


def check_open_book(beta, psi, radii=(5, 10, 20), signs=(1, -1), eps=0.1, domain=None, grid=None,
                    tol=None, stability=0.05, u=None):
    """
    Sign of the open-book defect follows l, and the monodromy correction
    is bounded by C/R with a measured C that does not drift with R.

    The correction is -u'(phi) times a page term P, so at every radius it
    must stay within C/R * max|P| with C = derivative_bound_constant(eps).
    ``psi`` is a realization (e.g. ExpressionRealization) of the potential;
    ``u`` optionally replaces the u profile by an explicit expression in phi.
    """
    started = time.perf_counter()
    tol = conf.get('DEFAULT_TOL') if tol is None else tol
    report = VerificationReport(check='open_book', params={'radii': list(radii), 'signs': list(signs), 'eps': eps})
    if u is not None:
        report.params['u'] = str(u)
    bound = derivative_bound_constant(eps)
    ok = True
    constants = {}
    try:
        for R in radii:
            profile = make_profile('u', eps=eps, R=R, expression=u)
            realizations = {psi.name: psi, profile.name: profile}
            for l in signs:
                eta = open_book_form(beta, psi.name, profile.name, l, R)
                axes = grid_axes(eta.chart, domain, grid)
                values = scan(contact_defect(eta), axes, realizations)
                signed = l * values
                good = bool(np.all(np.isfinite(values))) and float(signed.min()) > tol
                report.details[f"R={R},l={l}"] = {'min': float(values.min()), 'max': float(values.max())}
                ok &= good
            axes = grid_axes(eta.chart, domain, grid)
            correction = top_coefficient(open_book_correction(beta, psi.name, profile.name, R))
            correction_max = float(np.abs(scan(correction, axes, realizations)).max())
            page_max = float(np.abs(scan(top_coefficient(open_book_page_term(beta, psi.name, R)), axes, realizations)).max())
            allowed = bound / R * page_max + tol
            lo, hi = profile.domain
            sup = float(np.abs(profile.derivative(1)(np.linspace(float(lo), float(hi), conf.get('PROFILE_GRID') * 10))).max())
            constants[R] = R * sup
            within = correction_max <= allowed
            report.details[f"R={R}"] = {
                'correction_max': correction_max,
                'R*correction_max': R * correction_max,
                'allowed': allowed,
                'within_bound': within,
            }
            if not within:
                ok = False
                report.violations.append({'constraint': 'correction_bound', 'point': f"R={R}", 'value': correction_max})
    except ContactFormsError as e:
        return report.fail(str(e))

    spread = (max(constants.values()) - min(constants.values())) / max(constants.values())
    report.thresholds = {f"C@R={R}": c for R, c in constants.items()}
    report.thresholds['C_bound'] = bound
    report.details['spread'] = spread
    ok &= all(c <= bound + 1e-12 for c in constants.values())
    ok &= spread <= stability
    report.passed = bool(ok)
    report.elapsed = time.perf_counter() - started
    return report
