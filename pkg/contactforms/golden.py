"""
Printed forms of the 9-dimensional local model near the singular set, and
their reproduction.

The chart is (t1, x, x1, x2, y, y1, y2, z1, z2) in alphabetical order, which
is the order the printed wedge monomials use; with this order the computed
tau and tau^4 match the printed signs.
"""
import logging

from .constructions import ContactModel, asymmetric_scale, product_fold_form
from .expr import coordinate
from .exterior import Chart, exterior_derivative, hodge_star, parse_form, substitute, wedge, wedge_power
from .profiles import ProfileSet, localize, make_profile
from .verify import RadialPath, accessibility_check, differs_by_factor, forms_equal

logger = logging.getLogger(__name__)

COORDINATES = ('t1', 'x', 'x1', 'x2', 'y', 'y1', 'y2', 'z1', 'z2')

ETA1 = '(2-(x^2+y^2)^2)(d[z1]+x1 d[y1])+(d[z2]+x2 d[y2])'

# eta1 with its t1 dependence: the symplectization factor and the local models
# f = 1 - t1^2/2 (seen only through f(0) = 1, f'(0) = 0) and g = -t1.
ETA_FULL = 'exp(t1)*((2-(x^2+y^2)^2)(d[z1]+x1 d[y1]) + (d[z2]+x2 d[y2]) - t1 (x d[y]-y d[x]))'

DETA1 = (
    '(-4 x^3-4 x y^2) d[x]^d[z1] + (-4 x^3 x1-4 x x1 y^2) d[x]^d[y1]'
    ' + (-4 x^2 y-4 y^3) d[y]^d[z1] + (-4 x^2 x1 y-4 x1 y^3) x1 d[y]^d[y1]'
    ' + (2-x^4-2 x^2 y^2-y^4) d[t1]^d[z1] + (2-x^4-2 x^2 y^2-y^4) d[x1]^d[y1]'
    ' + (2 x1-x^4 x1-2 x^2 x1 y^2-x1 y^4) d[t1]^d[y1] + d[x2]^d[y2] + d[t1]^d[z2]'
    ' + x2 d[t1]^d[y2] - x d[t1]^d[y] + y d[t1]^d[x]'
)

_P4 = '(-2+x^4+2 x^2 y^2+y^4)'

TAU = (
    f'24 (x^2+y^2)^2 d[x1]^d[y1]'
    f' - 96 x (-1+x1) x1 y (x^2+y^2)^2 d[t1]^d[x1]'
    f' - 24 x1 (x^2+y^2) (x^2+x1 y^2) d[x1]^d[z1]'
    f' + 6 x {_P4} d[x]^d[z1]'
    f' + 6 y {_P4} d[y]^d[z1]'
    f' - 24 (x^2+y^2)^2 {_P4} d[x2]^d[y2]'
    f' + 24 x2 (x^2+y^2)^2 {_P4} d[x2]^d[z2]'
    f' + 6 x {_P4}^2 d[x]^d[z2]'
    f' + 6 y {_P4}^2 d[y]^d[z2]'
    f' + 24 x (x^2+y^2) {_P4} d[t1]^d[y]'
    f' - 24 y (x^2+y^2) {_P4} d[t1]^d[x]'
    f' - 24 (-1+x1) x1 y^2 (x^2+y^2) {_P4} d[x1]^d[z2]'
)

TAU4 = (
    f'-1990656 (x^2+y^2)^6 {_P4}^3 d[t1]^d[x]^d[x1]^d[x2]^d[y]^d[y1]^d[y2]^d[z1]'
    f' - 1990656 x2 (x^2+y^2)^6 {_P4}^3 d[t1]^d[x]^d[x1]^d[x2]^d[y]^d[y1]^d[z1]^d[z2]'
    f' - 1990656 x1 (x^2+y^2)^6 {_P4}^4 d[t1]^d[x]^d[x1]^d[x2]^d[y]^d[y2]^d[z1]^d[z2]'
    f' - 1990656 (x^2+y^2)^6 {_P4}^4 d[t1]^d[x]^d[x1]^d[x2]^d[y]^d[y1]^d[y2]^d[z2]'
)

NULL_SPAN = ('y1', 'y2', 'z1', 'z2')
RADIAL_BASE = {'t1': 0.0, 'x1': 0.5, 'x2': 0.5, 'y1': 0.0, 'y2': 0.0, 'z1': 0.0, 'z2': 0.0}


def chart():
    return Chart(COORDINATES)


def printed(text):
    return parse_form(text, chart())


def tau_of(eta, deta):
    """*(eta ^ deta^3) with a given exterior derivative."""
    return hodge_star(wedge(eta, wedge_power(deta, 3)))


def corrected_deta():
    """d(eta) of the t1-dependent form, evaluated on t1 = 0."""
    return substitute(exterior_derivative(printed(ETA_FULL)), {'t1': 0}, pullback=False)


def builder_deta(profiles=None):
    """
    The same dη obtained from the product-over-a-fold builder: the middle
    region of the asymmetric scaling, localized at the singular set.
    """
    if profiles is None:
        profiles = ProfileSet()
        for kind in ('f', 'g', 'k', 'h1', 'h2'):
            profiles.add(make_profile(kind))
    eta = product_fold_form(ContactModel.standard('1'), ContactModel.standard('2'), t='t1')
    middle = asymmetric_scale(eta, t='t1', profiles=profiles).region('middle').form
    local = localize(middle, profiles, {'t1': 0, 'x': 0, 'y': 0}).rechart(chart())
    return substitute(exterior_derivative(local), {'t1': 0}, pullback=False)


def radial_path(samples=100, base=None):
    return RadialPath('x', 'y', dict(base or RADIAL_BASE), samples=samples)


def reproduce(samples=100, tol=1e-8):
    """
    Run every comparison and return the reports in a fixed order.

    The printed dη differs from the computed one only on d[y]^d[y1], where
    it carries an extra factor x1; the printed tau is the star of the printed
    dη, and the computed tau agrees with it on x1 = 1.
    """
    eta1 = printed(ETA1)
    deta_printed = printed(DETA1)
    deta = corrected_deta()
    tau_printed = tau_of(eta1, deta_printed)
    tau_true = tau_of(eta1, deta)
    tau_form, tau4_form = printed(TAU), printed(TAU4)

    reports = [
        differs_by_factor(deta, deta_printed, [('y', 'y1')], coordinate('x1'), name='deta1'),
        forms_equal(tau_printed, tau_form, name='tau'),
        forms_equal(
            substitute(tau_true, {'x1': 1}, pullback=False),
            substitute(tau_form, {'x1': 1}, pullback=False),
            name='tau (computed dη, x1 = 1)',
        ),
        forms_equal(wedge_power(tau_printed, 4), tau4_form, name='tau^4'),
        forms_equal(wedge_power(tau_true, 4), tau4_form, name='tau^4 (computed dη)'),
        forms_equal(builder_deta(), deta, name='deta1 from builders'),
        accessibility_check(tau_true, radial_path(samples), tol, span=NULL_SPAN),
    ]
    for report in reports:
        logger.info('%s', report)
    return reports
