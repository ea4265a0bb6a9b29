"""
Builders for the explicit contact and confoliation forms.

Every builder returns a DifferentialForm (or a PiecewiseForm) on a flattened
product chart whose ``factors`` record which coordinates came from which
factor. Profiles may be given as ProfileFunction objects or by name; inside
the forms they only ever appear as opaque symbols, so each builder has a
matching identity oracle that states its contact defect in closed form.

Disk factors use Cartesian coordinates (x, y) with s = x^2 + y^2 and
sigma = x dy - y dx = r^2 dphi, so that h1(r) = H1(s) and h2(r) dphi =
Q(s) sigma with Q = h2(sqrt(s))/s.
"""
import logging
import math
from dataclasses import dataclass, field

import sympy as sp

from .exceptions import (
    CollarMismatchError,
    ConstructionError,
    DimensionError,
    MissingModelError,
    PartitionOfUnityError,
)
from .expr import coordinate, parse_scalar, potential, profile_symbol, simplify
from .exterior import (
    Chart,
    DifferentialForm,
    Interval,
    exterior_derivative,
    pullback,
    top_coefficient,
    wedge,
    wedge_power,
)
from .profiles import ProfileFunction, localize
from .reports import VerificationReport

logger = logging.getLogger(__name__)

UNIT = Interval(-1, 1)


@dataclass(frozen=True)
class ContactModel:
    """
    Darboux model dz + x1 dy1 + ... + xk dyk on (x1, y1, ..., xk, yk, z).

    The hatted partner flips the first pair (dz - x1 dy1 + ...); with no
    pairs the model is dz and its partner -dz.
    """
    name: str
    chart: Chart
    form: DifferentialForm
    hatted: DifferentialForm = None
    reeb: str = 'z'
    orientation: int = 1

    @classmethod
    def standard(cls, tag='', pairs=1, name=None):
        if pairs < 0:
            raise DimensionError(f"A contact model needs a non-negative number of pairs, got {pairs}")
        if pairs == 1:
            xs, ys = [f"x{tag}"], [f"y{tag}"]
        else:
            xs = [f"x{tag}_{i}" for i in range(1, pairs + 1)]
            ys = [f"y{tag}_{i}" for i in range(1, pairs + 1)]
        reeb = f"z{tag}"
        coordinates = []
        for x, y in zip(xs, ys):
            coordinates.extend([x, y])
        coordinates.append(reeb)
        chart = Chart(tuple(coordinates), tuple(UNIT for _ in coordinates))

        def build(flip):
            terms = {(reeb,): 1}
            for i, (x, y) in enumerate(zip(xs, ys)):
                terms[(y,)] = -coordinate(x) if flip and i == 0 else coordinate(x)
            return _one_form(chart, terms)

        form = build(False)
        hatted = build(True) if pairs else -form
        return cls(name or f"darboux{tag}", chart, form, hatted, reeb)

    darboux = standard

    @property
    def pairs(self):
        return (self.chart.dim - 1) // 2

    @property
    def half_dimension(self):
        """m with dim = 2m - 1."""
        return self.pairs + 1

    @property
    def defect(self):
        """Contact defect of the model form: pairs!, negated for a hatted partner."""
        return self.orientation * math.factorial(self.pairs)

    def partner(self):
        if self.hatted is None:
            raise MissingModelError(f"Contact model {self.name} has no hatted partner")
        return ContactModel(f"{self.name}^", self.chart, self.hatted, self.form, self.reeb, -self.orientation)

    def on(self, chart, hatted=False):
        """The model form (or its partner) re-expressed on a product chart."""
        if hatted:
            return self.partner().form.rechart(chart)
        return self.form.rechart(chart)


def _one_form(chart, terms):
    return DifferentialForm(chart, 1, {(chart.index(name),): c for (name,), c in terms.items()})


def _name(profile):
    return profile.name if isinstance(profile, ProfileFunction) else str(profile)


def _apply(profile, argument, order=0):
    return profile_symbol(_name(profile), order)(sp.sympify(argument))


def _disk_names(h1, h2):
    return _name(h1).upper(), f"{_name(h2).upper()}Q"


def _value(value):
    """Exact number, or a symbol when given a name (symbolic parameters such as R)."""
    if isinstance(value, str):
        return coordinate(value)
    if isinstance(value, float):
        return sp.Rational(str(value))
    return sp.sympify(value)


def _scalar(value):
    return parse_scalar(value) if isinstance(value, str) else sp.sympify(value)


def _line(name, interval=UNIT):
    return Chart((name,), (interval,))


def _disk(x, y, radius=1):
    return Chart((x, y), (Interval(-radius, radius), Interval(-radius, radius)))


def _profiles(*candidates):
    found = {}
    for candidate in candidates:
        if isinstance(candidate, ProfileFunction):
            found[candidate.name] = candidate
            if candidate.kind in ('h1', 'h2'):
                squared = candidate.on_squared_radius()
                found[squared.name] = squared
            if candidate.kind == 'h2':
                quotient = candidate.radial_quotient()
                found[quotient.name] = quotient
    return found


def _sigma(chart, x, y):
    """x dy - y dx."""
    return _one_form(chart, {(y,): coordinate(x), (x,): -coordinate(y)})


def _squared_radius(x, y):
    return coordinate(x) ** 2 + coordinate(y) ** 2


# -- circle over a fold ---------------------------------------------------------

def fold_circle_form(lam, f='f', g='g', t='t', phi='phi'):
    """
    alpha = f(t) lam + g(t) dphi on (t, N..., phi).

    Contact wherever f^{n-1}(f'g - fg') > 0 (dim N = 2n - 1).
    """
    chart = Chart.product(
        _line(t), lam.chart, _line(phi, Interval(0, 2 * math.pi, periodic=True)),
        labels=['interval', 'N', 'circle'],
    )
    tt = coordinate(t)
    alpha = lam.on(chart).scale(_apply(f, tt)) + DifferentialForm.differential(chart, phi).scale(_apply(g, tt))
    logger.debug('fold_circle_form on (%s)', chart)
    return alpha


def fold_circle_identity(lam, f='f', g='g', t='t', phi='phi'):
    """n * defect(lam) * f^{n-1} (f'g - f g')."""
    tt = coordinate(t)
    n = lam.pairs + 1
    F, dF = _apply(f, tt), _apply(f, tt, 1)
    G, dG = _apply(g, tt), _apply(g, tt, 1)
    return simplify(n * lam.defect * F ** (n - 1) * (dF * G - F * dG))


# -- open books -----------------------------------------------------------------

def open_book_form(beta, psi='psi', u='u', l=1, R=10, phi='phi'):
    """
    eta_E = beta + u(phi) dpsi + l dphi on (page..., phi), phi in [0, 2 pi R].

    ``psi`` is an abstract potential of the page coordinates. ``l = 0`` only
    yields a confoliation.
    """
    page = beta.chart
    if phi in page.coordinates:
        raise DimensionError(f"Page chart already contains '{phi}'")
    circle = _line(phi, Interval(0, 2 * math.pi * float(R), periodic=True))
    chart = Chart.product(page, circle, labels=['page', 'circle'])
    l = _value(l)
    if l == 0:
        logger.warning('open_book_form with l = 0 is a confoliation only')
    psi_form = exterior_derivative(DifferentialForm.scalar(chart, _potential(psi, page.coordinates)))
    eta = beta.rechart(chart) + psi_form.scale(_apply(u, coordinate(phi))) + DifferentialForm.differential(chart, phi).scale(l)
    logger.debug('open_book_form on (%s), l=%s, R=%s', chart, l, R)
    return eta


def _potential(psi, variables):
    if isinstance(psi, sp.Basic):
        return psi
    return potential(str(psi))(*(coordinate(v) for v in variables))


def _page_pieces(beta, psi, chart):
    page_beta = beta.rechart(chart)
    dbeta = exterior_derivative(page_beta)
    dpsi = exterior_derivative(DifferentialForm.scalar(chart, _potential(psi, beta.chart.coordinates)))
    return page_beta, dbeta, dpsi


def open_book_page_term(beta, psi='psi', R=10, phi='phi'):
    """n dphi ^ beta ^ (d beta)^{n-1} ^ d psi; the monodromy correction is -u'(phi) times this."""
    chart = open_book_form(beta, psi, 'u', 1, R, phi).chart
    n = beta.chart.dim // 2
    page_beta, dbeta, dpsi = _page_pieces(beta, psi, chart)
    dphi = DifferentialForm.differential(chart, phi)
    return wedge(dphi, page_beta, wedge_power(dbeta, n - 1), dpsi).scale(n)


def open_book_correction(beta, psi='psi', u='u', R=10, phi='phi'):
    """The monodromy term -n u' dphi ^ beta ^ (d beta)^{n-1} ^ d psi."""
    return open_book_page_term(beta, psi, R, phi).scale(-_apply(u, coordinate(phi), 1))


def open_book_identity(beta, psi='psi', u='u', l=1, R=10, phi='phi'):
    """l dphi ^ (d beta)^n - n u' dphi ^ beta ^ (d beta)^{n-1} ^ d psi, as a top coefficient."""
    if beta.chart.dim % 2:
        raise DimensionError(f"Open book pages need an even-dimensional chart, got {beta.chart.dim}")
    chart = open_book_form(beta, psi, u, l, R, phi).chart
    n = beta.chart.dim // 2
    _, dbeta, _ = _page_pieces(beta, psi, chart)
    dphi = DifferentialForm.differential(chart, phi)
    main = wedge(dphi, wedge_power(dbeta, n)).scale(_value(l))
    correction = open_book_correction(beta, psi, u, R, phi)
    return top_coefficient(main + correction)


def open_book_vanishing_term(beta, psi='psi', R=10, phi='phi'):
    """(d beta)^n ^ d psi, which vanishes because both live on the page."""
    chart = open_book_form(beta, psi, 'u', 1, R, phi).chart
    n = beta.chart.dim // 2
    _, dbeta, dpsi = _page_pieces(beta, psi, chart)
    return wedge(wedge_power(dbeta, n), dpsi)


# -- binding extension and the product over a fold ------------------------------

def binding_extension(nu, h1='h1', h2='h2', l=1, x='x', y='y', radius=1):
    """alpha = H1(s) nu + l Q(s) (x dy - y dx) on (B..., x, y)."""
    chart = Chart.product(nu.chart, _disk(x, y, radius), labels=['B', 'disk'])
    H1, Q = _disk_names(h1, h2)
    s = _squared_radius(x, y)
    l = _value(l)
    if l == 0:
        logger.warning('binding_extension with l = 0 is not contact off the binding')
    alpha = nu.on(chart).scale(_apply(H1, s)) + _sigma(chart, x, y).scale(l * _apply(Q, s))
    return alpha


def binding_extension_identity(nu, h1='h1', h2='h2', l=1, x='x', y='y', radius=1):
    """2 l m! H1^{m-1} (H1 P - s H1' Q) with P = Q + s Q' (the Cartesian h1 h2' - h1' h2)."""
    H1, Q = _disk_names(h1, h2)
    s = _squared_radius(x, y)
    m = nu.half_dimension
    h, dh = _apply(H1, s), _apply(H1, s, 1)
    q, dq = _apply(Q, s), _apply(Q, s, 1)
    P = q + s * dq
    return simplify(2 * _value(l) * m * nu.defect * h ** (m - 1) * (h * P - s * dh * q))


def product_fold_form(nu, lam, f='f', g='g', h1='h1', h2='h2', x='x', y='y', t='t', radius=1):
    """
    eta~ = H1(s) nu + f(t) lam + Q(s) g(t) (x dy - y dx) on (B..., x, y, t, N...).

    Confoliation whose singular set is {x = y = t = 0}.
    """
    chart = Chart.product(nu.chart, _disk(x, y, radius), _line(t), lam.chart, labels=['B', 'disk', 'interval', 'N'])
    H1, Q = _disk_names(h1, h2)
    s = _squared_radius(x, y)
    tt = coordinate(t)
    eta = (
        nu.on(chart).scale(_apply(H1, s))
        + lam.on(chart).scale(_apply(f, tt))
        + _sigma(chart, x, y).scale(_apply(Q, s) * _apply(g, tt))
    )
    logger.debug('product_fold_form on (%s)', chart)
    return eta


def product_fold_constant(nu, lam):
    """Positive integer c with defect = c H1^{m-1} f^{n-1} [...] for the standard models."""
    m, n = nu.half_dimension, lam.half_dimension
    return 2 * math.factorial(m + n)


def product_fold_identity(nu, lam, f='f', g='g', h1='h1', h2='h2', x='x', y='y', t='t', radius=1):
    """c H1^{m-1} f^{n-1} [f'g (H1 P - s H1' Q) + s f g' H1' Q]."""
    H1, Q = _disk_names(h1, h2)
    s = _squared_radius(x, y)
    tt = coordinate(t)
    m, n = nu.half_dimension, lam.half_dimension
    h, dh = _apply(H1, s), _apply(H1, s, 1)
    q, dq = _apply(Q, s), _apply(Q, s, 1)
    F, dF = _apply(f, tt), _apply(f, tt, 1)
    G, dG = _apply(g, tt), _apply(g, tt, 1)
    P = q + s * dq
    scale = sp.Rational(nu.defect * lam.defect,
                        math.factorial(m - 1) * math.factorial(n - 1))
    bracket = dF * G * (h * P - s * dh * q) + s * F * dG * dh * q
    return simplify(scale * product_fold_constant(nu, lam) * h ** (m - 1) * F ** (n - 1) * bracket)


# -- piecewise forms ------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    name: str
    interval: tuple
    form: DifferentialForm

    def contains(self, value, slack=1e-12):
        lo, hi = self.interval
        return float(lo) - slack <= value <= float(hi) + slack


@dataclass(frozen=True)
class Seam:
    """Interface between consecutive regions at ``position`` of the distinguished coordinate."""
    position: object
    kind: str = 'smooth'
    reeb: str = None

    KINDS = ('smooth', 'convex_fold', 'concave_fold')


@dataclass(frozen=True)
class Boundary:
    """Stated normal form of the region containing ``position``."""
    position: object
    expected: DifferentialForm


@dataclass
class PiecewiseForm:
    """1-forms on consecutive intervals of one coordinate, glued along seams."""
    chart: Chart
    coordinate: str
    regions: list
    seams: list = field(default_factory=list)
    boundaries: list = field(default_factory=list)
    profiles: dict = field(default_factory=dict)
    name: str = ''

    def __post_init__(self):
        degrees = {region.form.degree for region in self.regions}
        if len(degrees) > 1:
            raise ConstructionError(f"Regions of {self.name or 'piecewise form'} have mixed degrees {sorted(degrees)}")
        if len(self.seams) != max(len(self.regions) - 1, 0):
            raise ConstructionError('A piecewise form needs exactly one seam between consecutive regions')

    def region(self, name):
        for region in self.regions:
            if region.name == name:
                return region
        raise KeyError(name)

    def region_at(self, value):
        for region in self.regions:
            if region.contains(value):
                return region
        return None

    def rechart(self, chart):
        regions = [Region(r.name, r.interval, r.form.rechart(chart)) for r in self.regions]
        boundaries = [Boundary(b.position, b.expected.rechart(chart)) for b in self.boundaries]
        return PiecewiseForm(chart, self.coordinate, regions, list(self.seams), boundaries, dict(self.profiles), self.name)

    def localized(self, form, position):
        return localize(form, self.profiles, {self.coordinate: position})

    def check_seams(self):
        """Smooth seams: both sides agree after localization. Fold seams: declared convexity matches."""
        report = VerificationReport(check=f"seams:{self.name or 'piecewise'}", params={'coordinate': self.coordinate})
        ok = True
        for seam, (left, right) in zip(self.seams, zip(self.regions, self.regions[1:])):
            label = f"{left.name}|{right.name}@{seam.position}"
            try:
                if seam.kind == 'smooth':
                    a = self.localized(left.form, seam.position)
                    b = self.localized(right.form, seam.position)
                    glued = a == b
                    report.details[label] = 'smooth' if glued else 'mismatch'
                    if not glued:
                        raise CollarMismatchError(f"Regions {left.name} and {right.name} differ at {seam.position}")
                else:
                    found = fold_seam_type(left.form, right.form, self.coordinate, seam.reeb, seam.position, self.profiles)
                    report.details[label] = found
                    if found != seam.kind:
                        raise CollarMismatchError(f"Seam {label} is {found}, declared {seam.kind}")
            except CollarMismatchError as e:
                ok = False
                report.violations.append({'constraint': 'seam', 'point': label, 'value': str(e)})
        report.passed = ok
        logger.info('Seams of %s: %s', self.name or 'piecewise form', report.status)
        return report

    def check_boundaries(self):
        """Each boundary region, localized at its boundary, equals the stated normal form exactly."""
        report = VerificationReport(check=f"boundaries:{self.name or 'piecewise'}", params={'coordinate': self.coordinate})
        ok = True
        for boundary in self.boundaries:
            region = self.region_at(float(boundary.position))
            label = f"{self.coordinate}={boundary.position}"
            if region is None:
                ok = False
                report.violations.append({'constraint': 'boundary', 'point': label, 'value': 'outside every region'})
                continue
            actual = self.localized(region.form, boundary.position)
            matches = actual == boundary.expected
            report.details[label] = 'ok' if matches else 'mismatch'
            if not matches:
                ok = False
                report.violations.append({'constraint': 'boundary', 'point': label, 'value': region.name})
        report.passed = ok
        return report


def _log_derivative(form, t, reeb, position, profiles):
    c = localize(form.coefficient(reeb), profiles, {t: position})
    if c == 0:
        raise CollarMismatchError(f"Form has no d[{reeb}] component at the seam")
    ratio = sp.simplify(sp.diff(c, coordinate(t)) / c)
    return ratio


def fold_seam_type(left, right, t, reeb, position=0, profiles=None):
    """
    Classify a fold seam from the symplectization factor in front of d[reeb].

    The logarithmic t-derivative of that coefficient is +1 for e^t and -1 for
    e^{-t}; e^t on the left meeting e^{-t} on the right is a convex fold, the
    reverse is concave.
    """
    profiles = profiles or {}
    a = _log_derivative(left, t, reeb, position, profiles)
    b = _log_derivative(right, t, reeb, position, profiles)
    if (a, b) == (1, -1):
        return 'convex_fold'
    if (a, b) == (-1, 1):
        return 'concave_fold'
    if a == b:
        return 'smooth'
    raise CollarMismatchError(f"Seam at {t}={position} is not a symplectization fold (log-derivatives {a}, {b})")


def asymmetric_scale(eta, k='k', f='f', g='g', t='t', eps=sp.Rational(1, 10), profiles=None):
    """
    Three regions: e^{-1} eta~(t=-1 model) on [-1-eps, -1], k(t) eta~ on
    [-1, 1] and e eta~(t=1 model) on [1, 1+eps].

    The outer regions replace f and g by their prescribed end segments, so
    they read e^{-1}(alpha_+ + e^t lam) and e(alpha_- + e^{-t} lam).
    """
    eps = _value(eps)
    profiles = dict(profiles or {})
    profiles.update(_profiles(k, f, g))
    for name in (_name(f), _name(g), _name(k)):
        if name not in profiles:
            raise ConstructionError(f"asymmetric_scale needs a realization of '{name}' to localize its collars")
    chart = eta.chart.with_domains(**{t: (-1 - eps, 1 + eps)})
    eta = DifferentialForm(chart, eta.degree, eta.terms)
    tt = coordinate(t)
    end_profiles = {_name(f): profiles[_name(f)], _name(g): profiles[_name(g)]}
    left = localize(eta, end_profiles, {t: -1}).scale(sp.exp(-1))
    right = localize(eta, end_profiles, {t: 1}).scale(sp.E)
    middle = eta.scale(_apply(k, tt))
    regions = [
        Region('W1', (-1 - eps, -1), left),
        Region('middle', (-1, 1), middle),
        Region('W2', (1, 1 + eps), right),
    ]
    seams = [Seam(-1, 'smooth'), Seam(1, 'smooth')]
    return PiecewiseForm(chart, t, regions, seams, [], profiles, name='asymmetric_scale')


def derivative_identity(eta, t='t'):
    """d(e^t eta) - e^t dt ^ eta - e^t d eta, which vanishes identically."""
    chart = eta.chart
    et = sp.exp(coordinate(t))
    scaled = exterior_derivative(eta.scale(et))
    dt = DifferentialForm.differential(chart, t)
    return scaled - wedge(dt, eta).scale(et) - exterior_derivative(eta).scale(et)


# -- bundles --------------------------------------------------------------------

def exact_bundle_form(mu, beta, collar, psi='psi', u='u', R='R', psi_variables=None):
    """
    eta = R mu + beta + u(t) d psi~ on (base..., fiber...).

    ``collar`` is the base coordinate normal to the gluing hypersurface;
    psi~ depends on the remaining base coordinates and the fiber (or on
    ``psi_variables`` when given).
    """
    base = mu.chart
    if collar not in base.coordinates:
        raise DimensionError(f"Collar coordinate '{collar}' is not a base coordinate")
    if beta.chart.dim % 2:
        raise DimensionError(f"The fiber of an exact bundle must be even-dimensional, got {beta.chart.dim}")
    chart = Chart.product(base, beta.chart, labels=['base', 'fiber'])
    variables = psi_variables or [c for c in chart.coordinates if c != collar]
    dpsi = exterior_derivative(DifferentialForm.scalar(chart, _potential(psi, variables)))
    eta = mu.on(chart).scale(_value(R)) + beta.rechart(chart) + dpsi.scale(_apply(u, coordinate(collar)))
    logger.debug('exact_bundle_form on (%s)', chart)
    return eta


def exact_bundle_terms(mu, beta, collar, psi='psi', u='u', R='R', psi_variables=None):
    """
    The four top-degree terms of eta (d eta)^N, N = m + n - 1:

        C1 R^m mu dmu^{m-1} dbeta^n          C2 R^{m-1} u' mu dmu^{m-2} dbeta^n dt dpsi
        C3 R^{m-1} u' beta dmu^{m-1} dbeta^{n-1} dt dpsi
        C4 R^{m-1} u dpsi dmu^{m-1} dbeta^n

    C1 = C4 = N!/((m-1)! n!), C2 = N!/((m-2)! n!), C3 = N!/((m-1)! (n-1)!).
    The C2 term only exists for m >= 2.
    """
    eta = exact_bundle_form(mu, beta, collar, psi, u, R, psi_variables)
    chart = eta.chart
    m, n = mu.half_dimension, beta.chart.dim // 2
    N = m + n - 1
    R = _value(R)
    t = coordinate(collar)
    variables = psi_variables or [c for c in chart.coordinates if c != collar]
    mu_form = mu.on(chart)
    dmu = exterior_derivative(mu_form)
    beta_form = beta.rechart(chart)
    dbeta = exterior_derivative(beta_form)
    dt = DifferentialForm.differential(chart, collar)
    dpsi = exterior_derivative(DifferentialForm.scalar(chart, _potential(psi, variables)))
    U, dU = _apply(u, t), _apply(u, t, 1)
    fact = math.factorial

    terms = {}
    terms['C1'] = wedge(mu_form, wedge_power(dmu, m - 1), wedge_power(dbeta, n)).scale(
        sp.Rational(fact(N), fact(m - 1) * fact(n)) * R ** m)
    if m >= 2:
        terms['C2'] = wedge(mu_form, wedge_power(dmu, m - 2), wedge_power(dbeta, n), dt, dpsi).scale(
            sp.Rational(fact(N), fact(m - 2) * fact(n)) * R ** (m - 1) * dU)
    if n >= 1:
        terms['C3'] = wedge(beta_form, wedge_power(dmu, m - 1), wedge_power(dbeta, n - 1), dt, dpsi).scale(
            sp.Rational(fact(N), fact(m - 1) * fact(n - 1)) * R ** (m - 1) * dU)
    terms['C4'] = wedge(dpsi, wedge_power(dmu, m - 1), wedge_power(dbeta, n)).scale(
        sp.Rational(fact(N), fact(m - 1) * fact(n)) * R ** (m - 1) * U)
    return terms


def exact_bundle_identity(mu, beta, collar, psi='psi', u='u', R='R', psi_variables=None):
    terms = exact_bundle_terms(mu, beta, collar, psi, u, R, psi_variables)
    return simplify(sp.Add(*(top_coefficient(form) for form in terms.values())))


def long_collar_bundle_form(mu_base, mu_boundary, collar, psi='psi', u='u', R='R', s='s', length=None):
    """
    exact_bundle_form with fiber beta = e^s mu_boundary on the collar
    s in [-1, log R_X]; psi~ does not depend on s.

    ``length`` is log R_X, the upper end of the collar (default 0).
    """
    upper = 0 if length is None else length
    fiber_chart = Chart.product(_line(s, Interval(-1, float(upper))), mu_boundary.chart, labels=['collar', 'boundary'])
    beta = mu_boundary.on(fiber_chart).scale(sp.exp(coordinate(s)))
    variables = [c for c in mu_base.chart.coordinates if c != collar] + list(mu_boundary.chart.coordinates)
    return exact_bundle_form(mu_base, beta, collar, psi, u, R, variables)


def contactomorphism_pullback(model, chart, mapping, hatted=False):
    """The model form on ``chart`` pulled back along a base-dependent strict contactomorphism."""
    return pullback(model.on(chart, hatted), mapping)


def bundle_sum_form(beta, charts, K='K'):
    """
    theta = K beta + sum_i w_i eta_i.

    ``charts`` is a list of (weight, fiber form) pairs on one chart; the
    weights must add up to 1 identically.

    Raises:
        PartitionOfUnityError: when the weights do not sum to 1
    """
    if not charts:
        raise PartitionOfUnityError('A bundle sum needs at least one chart')
    chart = charts[0][1].chart
    charts = [(_scalar(w), form) for w, form in charts]
    total = simplify(sp.Add(*(w for w, _ in charts)))
    if total != 1:
        raise PartitionOfUnityError(f"Weights sum to {total}, not 1")
    theta = beta.rechart(chart).scale(_value(K))
    for weight, form in charts:
        theta = theta + form.scale(weight)
    return theta


# -- concave ends ---------------------------------------------------------------

def _require_partners(*models):
    for model in models:
        if model.hatted is None:
            raise MissingModelError(f"Contact model {model.name} has no hatted partner")


def concave_collar_forms(alpha, lam, variant='swap', t='t', g1='g1', g2='g2', profiles=None):
    """
    Collar sequences on (t, X..., N...) with t in [-1, 1].

    swap:       g1(alpha + e^{-t} lam), e^t alpha + lam, e^{-t} alpha + lam^, g2(alpha + e^t lam^)
    four_part:  e^{-t} lam + alpha, e^t lam^ + alpha, e^{-t} lam^ + alpha^, e^t lam + alpha^
    circle:     e^t lam + alpha, e^{-t+1/2} lam + alpha^, e^{t-1/2} lam^ + alpha^, e^{-t+1} lam^ + alpha
                on quarters of a periodic t in [0, 1], chart (t, N..., X...); the
                seams run convex, concave, convex and the wrap seam 1 ~ 0 is concave

    Raises:
        MissingModelError: when a model has no hatted partner
    """
    _require_partners(alpha, lam)
    tt = coordinate(t)
    up, down = sp.exp(tt), sp.exp(-tt)
    half, quarter = sp.Rational(1, 2), sp.Rational(1, 4)
    if variant == 'circle':
        chart = Chart.product(_line(t, Interval(0, 1, periodic=True)), lam.chart, alpha.chart,
                              labels=['circle', 'N', 'X'])
        intervals = [(0, quarter), (quarter, half), (half, 3 * quarter), (3 * quarter, 1)]
    else:
        chart = Chart.product(_line(t), alpha.chart, lam.chart, labels=['interval', 'X', 'N'])
        intervals = [(-1, -half), (-half, 0), (0, half), (half, 1)]
    a, a_hat = alpha.on(chart), alpha.on(chart, hatted=True)
    l, l_hat = lam.on(chart), lam.on(chart, hatted=True)
    profiles = dict(profiles or {})
    profiles.update(_profiles(g1, g2))

    if variant == 'swap':
        for name in (_name(g1), _name(g2)):
            if name not in profiles:
                raise ConstructionError(f"The swap collar needs a realization of '{name}'")
        forms = [
            (a + l.scale(down)).scale(_apply(g1, tt)),
            a.scale(up) + l,
            a.scale(down) + l_hat,
            (a + l_hat.scale(up)).scale(_apply(g2, tt)),
        ]
        seams = [Seam(-half, 'smooth'), Seam(0, 'convex_fold', alpha.reeb), Seam(half, 'smooth')]
        boundaries = [Boundary(-1, a + l.scale(down)), Boundary(1, a + l_hat.scale(up))]
    elif variant == 'four_part':
        forms = [
            l.scale(down) + a,
            l_hat.scale(up) + a,
            l_hat.scale(down) + a_hat,
            l.scale(up) + a_hat,
        ]
        seams = [Seam(-half, 'concave_fold', lam.reeb), Seam(0, 'convex_fold', lam.reeb), Seam(half, 'concave_fold', lam.reeb)]
        boundaries = [Boundary(-1, l.scale(down) + a), Boundary(1, l.scale(up) + a_hat)]
    elif variant == 'circle':
        forms = [
            l.scale(up) + a,
            l.scale(sp.exp(half - tt)) + a_hat,
            l_hat.scale(sp.exp(tt - half)) + a_hat,
            l_hat.scale(sp.exp(1 - tt)) + a,
        ]
        seams = [Seam(quarter, 'convex_fold', lam.reeb), Seam(half, 'concave_fold', lam.reeb),
                 Seam(3 * quarter, 'convex_fold', lam.reeb)]
        boundaries = [Boundary(0, l.scale(up) + a), Boundary(1, l_hat.scale(sp.exp(1 - tt)) + a)]
    else:
        raise ConstructionError(f"Unknown concave collar variant '{variant}' (expected swap, four_part or circle)")

    regions = [Region(f"{variant}{i + 1}", interval, form) for i, (interval, form) in enumerate(zip(intervals, forms))]
    return PiecewiseForm(chart, t, regions, seams, boundaries, profiles, name=variant)


BUILDERS = {
    'fold_circle': fold_circle_form,
    'open_book': open_book_form,
    'binding_extension': binding_extension,
    'product_fold': product_fold_form,
    'asymmetric_scale': asymmetric_scale,
    'exact_bundle': exact_bundle_form,
    'long_collar_bundle': long_collar_bundle_form,
    'concave_collar': concave_collar_forms,
}

IDENTITIES = {
    'fold_circle': fold_circle_identity,
    'open_book': open_book_identity,
    'binding_extension': binding_extension_identity,
    'product_fold': product_fold_identity,
    'exact_bundle': exact_bundle_identity,
}
