"""
Line-oriented scenario files: a chart, profiles, forms and checks.

    # comment
    scenario NAME
    [chart]
    coordinates t1,x,x1
    domain x -1 1
    [profiles]
    f kind=f eps=0.1
    psi kind=potential variables=x1,y1 expression="x1*y1"
    [forms]
    eta = (2-(x^2+y^2)^2)(d[z1]+x1 d[y1])
    N1 := model(tag=1)
    deta := evaluate(d(eta), t1=0)
    [checks]
    equal deta OTHER
    contact eta t=-1:1 grid=11

Declarations run in file order; checks produce one VerificationReport each.
Input problems raise ScenarioError with the offending line number.
"""
import inspect
import logging
import shlex
from dataclasses import dataclass, field
from pathlib import Path

import pyparsing as pp
import sympy as sp
from django.utils import timezone

from . import verify
from .constructions import BUILDERS, IDENTITIES, ContactModel, PiecewiseForm
from .exceptions import ContactFormsError, ScenarioError
from .expr import format_scalar, parse_scalar, simplify
from .exterior import (
    Chart,
    DifferentialForm,
    Interval,
    exterior_derivative,
    hodge_star,
    parse_form,
    substitute,
    wedge,
    wedge_power,
)
from .profiles import ExpressionRealization, ProfileSet, localize, make_profile, validate_profile
from .reports import VerificationReport

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SECTIONS = ('chart', 'profiles', 'forms', 'checks')

_IDENT = pp.Word(pp.alphas + '_', pp.alphanums + '_')
_ARGUMENT = pp.original_text_for(pp.OneOrMore(pp.nested_expr() | pp.CharsNotIn(',()')))
_CALL = _IDENT('name') + pp.Suppress('(') + pp.Group(pp.Optional(pp.DelimitedList(_ARGUMENT)))('args') + pp.Suppress(')') + pp.StringEnd()


def parse_call(text):
    """``name(a, k=v, ...)`` -> (name, [argument texts]), or None when ``text`` is not a call."""
    try:
        result = _CALL.parse_string(text.strip(), parse_all=True)
    except pp.ParseException:
        return None
    return result['name'], [a.strip() for a in result['args']]


def _split_keyword(argument):
    """``k=v`` -> (k, v); a bare argument gives (None, argument). ``==`` is not a keyword."""
    head, sep, tail = argument.partition('=')
    if sep and head.strip().isidentifier() and not tail.startswith('='):
        return head.strip(), tail.strip()
    return None, argument.strip()


@dataclass
class Statement:
    section: str
    text: str
    line: int


@dataclass
class ScenarioResult:
    """Reports of one run plus its exit code (0 pass, 1 check failure, 2 input error)."""
    name: str
    reports: list = field(default_factory=list)
    error: str = None
    timestamp: str = ''

    @property
    def exit_code(self):
        if self.error:
            return 2
        return 0 if all(r.passed for r in self.reports) else 1

    @property
    def status(self):
        return {0: 'pass', 1: 'fail', 2: 'error'}[self.exit_code]

    def to_dict(self, timings=False):
        data = {
            'schema': SCHEMA_VERSION,
            'scenario': self.name,
            'timestamp': self.timestamp,
            'status': self.status,
            'exit_code': self.exit_code,
            'reports': [r.to_dict(timings) for r in self.reports],
        }
        if self.error:
            data['error'] = self.error
        return data


@dataclass
class Scenario:
    name: str
    statements: list
    source: str = ''

    @classmethod
    def parse(cls, text, name=None):
        """
        Split a scenario into statements by section.

        Raises:
            ScenarioError: for unknown sections or statements outside a section
        """
        statements = []
        section = None
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if line.startswith('[') and line.endswith(']'):
                section = line[1:-1].strip()
                if section not in SECTIONS:
                    raise ScenarioError(f"Unknown section [{section}]", number)
                continue
            if line.startswith('scenario ') and section is None:
                name = line.split(None, 1)[1].strip()
                continue
            if section is None:
                raise ScenarioError(f"Statement outside of a section: {line}", number)
            statements.append(Statement(section, line, number))
        return cls(name or 'scenario', statements, text)

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as e:
            raise ScenarioError(f"Cannot read scenario {path}: {e}") from e
        return cls.parse(text, name=path.stem)

    def run(self):
        """Execute every statement; input errors stop the run with exit code 2."""
        result = ScenarioResult(self.name, timestamp=timezone.now().isoformat())
        context = ScenarioContext()
        for statement in self.statements:
            try:
                report = context.execute(statement)
            except ScenarioError as e:
                result.error = str(e)
                logger.error('Scenario %s: %s', self.name, e)
                break
            if report is not None:
                result.reports.append(report)
        logger.info('Scenario %s: %s (%s checks)', self.name, result.status, len(result.reports))
        return result


def _point(text):
    """``x1:0.5,x2:0.5`` -> {x1: 0.5, x2: 0.5}."""
    point = {}
    for item in filter(None, text.split(',')):
        name, sep, value = item.partition(':')
        if not sep:
            raise ScenarioError(f"Expected NAME:VALUE in point, got '{item}'")
        point[name.strip()] = float(parse_scalar(value))
    return point


def _names(text):
    return [n.strip() for n in text.split(',') if n.strip()]


def _number(text):
    value = parse_scalar(text)
    if not value.is_number:
        raise ScenarioError(f"Expected a number, got '{text}'")
    return float(value)


def _monomials(text):
    """``y^y1,x^z`` -> [('y', 'y1'), ('x', 'z')]."""
    return [tuple(part.split('^')) for part in _names(text)]


class ScenarioContext:
    """Named charts, profiles and forms accumulated while a scenario runs."""

    def __init__(self):
        self.chart = None
        self.profiles = ProfileSet()
        self.objects = {}

    def execute(self, statement):
        """
        Run one statement: declarations return None, checks return their report.

        Raises:
            ScenarioError: for any malformed value, option or call, tagged with the line
        """
        handler = getattr(self, f"_declare_{statement.section}", None)
        try:
            if handler is None:
                return self.check(statement)
            handler(statement.text)
        except ScenarioError as e:
            if e.line is None:
                raise ScenarioError(str(e), statement.line) from e
            raise
        # malformed numbers and options surface as ValueError/TypeError from sympy and
        # int/float, unknown builder keywords as TypeError, missing parts as LookupError
        except (ValueError, TypeError, LookupError) as e:
            raise ScenarioError(str(e), statement.line) from e
        return None

    # -- declarations ----------------------------------------------------------

    def _declare_chart(self, text):
        keyword, _, rest = text.partition(' ')
        if keyword == 'coordinates':
            self.chart = Chart.parse(rest.replace(' ', ''))
        elif keyword == 'domain':
            if self.chart is None:
                raise ScenarioError('domain before coordinates')
            parts = rest.split()
            if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != 'periodic'):
                raise ScenarioError('Expected: domain NAME LO HI [periodic]')
            name, lo, hi = parts[:3]
            interval = Interval(_number(lo), _number(hi), periodic=len(parts) == 4)
            self.chart = self.chart.with_domains(**{name: interval})
        else:
            raise ScenarioError(f"Unknown chart statement '{keyword}'")

    def _declare_profiles(self, text):
        tokens = shlex.split(text)
        name, options = tokens[0], self._options(tokens[1:])
        kind = options.pop('kind', None)
        if kind is None:
            raise ScenarioError(f"Profile {name} needs kind=")
        if kind == 'potential':
            if 'variables' not in options or 'expression' not in options:
                raise ScenarioError(f"Potential {name} needs variables= and expression=")
            self.profiles.add(ExpressionRealization(name, _names(options['variables']), options['expression']))
            return
        kwargs = {}
        for key in ('eps', 'R', 'width'):
            if key in options:
                kwargs[key] = sp.Rational(options.pop(key))
        if 'interval' in options:
            lo, hi = options.pop('interval').split(':')
            kwargs['interval'] = (sp.Rational(lo), sp.Rational(hi))
        for key in ('model', 'expression'):
            if key in options:
                kwargs[key] = options.pop(key)
        if options:
            raise ScenarioError(f"Unknown profile options: {', '.join(sorted(options))}")
        self.profiles.add(make_profile(kind, name=name, **kwargs))

    def _declare_forms(self, text):
        if ':=' in text:
            name, _, rhs = text.partition(':=')
            value = self.evaluate(rhs.strip())
        elif '=' in text:
            name, _, rhs = text.partition('=')
            if self.chart is None:
                raise ScenarioError('Form text needs a [chart] section')
            value = parse_form(rhs.strip(), self.chart)
        else:
            raise ScenarioError("Expected 'NAME = form' or 'NAME := operation(...)'")
        name = name.strip()
        if not name.isidentifier():
            raise ScenarioError(f"Invalid name '{name}'")
        self.objects[name] = value
        logger.debug('Declared %s', name)

    # -- values ----------------------------------------------------------------

    def lookup(self, name):
        try:
            return self.objects[name]
        except KeyError:
            raise ScenarioError(f"Unresolved name '{name}'") from None

    def form(self, name):
        value = self.value(name)
        if isinstance(value, ContactModel):
            return value.form
        if not isinstance(value, DifferentialForm):
            raise ScenarioError(f"'{name}' is not a differential form")
        return value

    def piecewise(self, name):
        value = self.value(name)
        if not isinstance(value, PiecewiseForm):
            raise ScenarioError(f"'{name}' is not a piecewise form")
        return value

    def value(self, text):
        """A declared name, a nested operation, a quoted string, a number or a bare name."""
        text = text.strip()
        if text in self.objects:
            return self.objects[text]
        if parse_call(text) is not None:
            return self.evaluate(text)
        if len(text) > 1 and text[0] == text[-1] and text[0] in '"\'':
            return text[1:-1]
        if text.isidentifier():
            return text
        return parse_scalar(text)

    def evaluate(self, text):
        call = parse_call(text)
        if call is None:
            raise ScenarioError(f"Expected an operation call, got '{text}'")
        name, arguments = call
        positional, keywords = [], {}
        for argument in arguments:
            key, value = _split_keyword(argument)
            if key is None:
                positional.append(value)
            else:
                keywords[key] = value
        operation = OPERATIONS.get(name)
        if operation is not None:
            return operation(self, positional, keywords)
        if name in BUILDERS:
            return self.build(BUILDERS[name], positional, keywords)
        raise ScenarioError(f"Unknown operation '{name}'")

    def build(self, builder, positional, keywords):
        args = [self.value(a) for a in positional]
        kwargs = {k: self.value(v) for k, v in keywords.items()}
        if 'profiles' in inspect.signature(builder).parameters and 'profiles' not in kwargs:
            kwargs['profiles'] = self.profiles
        return builder(*args, **kwargs)

    def bindings(self, keywords):
        return {k: parse_scalar(v) for k, v in keywords.items()}

    # -- checks ----------------------------------------------------------------

    def _options(self, tokens):
        options = {}
        for token in tokens:
            key, sep, value = token.partition('=')
            if not sep:
                raise ScenarioError(f"Expected key=value, got '{token}'")
            options[key] = value
        return options

    def check(self, statement):
        tokens = shlex.split(statement.text)
        kind = tokens[0]
        positional = [t for t in tokens[1:] if '=' not in t]
        options = self._options([t for t in tokens[1:] if '=' in t])
        runner = CHECKS.get(kind)
        if runner is None:
            raise ScenarioError(f"Unknown check '{kind}'", statement.line)
        report = runner(self, positional, options)
        report.check = ' '.join([kind] + positional)
        report.params.setdefault('line', statement.line)
        logger.info('%s', report)
        return report

    def grid_options(self, chart, options):
        """Split options into (domain, grid, tol): coordinate keys are ranges ``lo:hi`` or pins."""
        domain = {}
        for key, value in options.items():
            if key in chart.coordinates:
                if ':' in value:
                    lo, hi = value.split(':')
                    domain[key] = (_number(lo), _number(hi))
                else:
                    domain[key] = _number(value)
        grid = int(options['grid']) if 'grid' in options else None
        tol = float(options['tol']) if 'tol' in options else None
        return domain, grid, tol

    def full_point(self, chart, text):
        point = {name: 0.0 for name in chart.coordinates}
        given = _point(text)
        for name in given:
            chart.index(name)
        point.update(given)
        return point


def _expect(positional, count, usage):
    if len(positional) != count:
        raise ScenarioError(f"Usage: {usage}")
    return positional


# -- operations -----------------------------------------------------------------

def _op_model(context, positional, keywords):
    tag = keywords.get('tag', '').strip('"\'')
    pairs = int(keywords.get('pairs', 1))
    return ContactModel.standard(tag=tag, pairs=pairs, name=keywords.get('name'))


def _op_d(context, positional, keywords):
    return exterior_derivative(context.form(_expect(positional, 1, 'd(A)')[0]))


def _op_tau(context, positional, keywords):
    return verify.tau(context.form(_expect(positional, 1, 'tau(A)')[0]))


def _op_star(context, positional, keywords):
    return hodge_star(context.form(_expect(positional, 1, 'star(A)')[0]))


def _op_wedge(context, positional, keywords):
    if len(positional) < 2:
        raise ScenarioError('Usage: wedge(A, B, ...)')
    return wedge(*(context.form(name) for name in positional))


def _op_power(context, positional, keywords):
    name, exponent = _expect(positional, 2, 'power(A, n)')
    return wedge_power(context.form(name), int(exponent))


def _op_evaluate(context, positional, keywords):
    name, = _expect(positional, 1, 'evaluate(A, x=value, ...)')
    return substitute(context.form(name), context.bindings(keywords), pullback=False)


def _op_restrict(context, positional, keywords):
    name, = _expect(positional, 1, 'restrict(A, x=value, ...)')
    return substitute(context.form(name), context.bindings(keywords), pullback=True)


def _op_localize(context, positional, keywords):
    name, = _expect(positional, 1, 'localize(A, x=value, ...)')
    point = {k: parse_scalar(v) for k, v in keywords.items()}
    return localize(context.form(name), context.profiles, point)


def _op_rechart(context, positional, keywords):
    name, = _expect(positional, 1, 'rechart(A)')
    if context.chart is None:
        raise ScenarioError('rechart needs a [chart] section')
    return context.form(name).rechart(context.chart)


def _op_region(context, positional, keywords):
    name, region = _expect(positional, 2, 'region(P, NAME)')
    try:
        return context.piecewise(name).region(region).form
    except KeyError:
        raise ScenarioError(f"'{name}' has no region '{region}'") from None


def _op_identity(context, positional, keywords):
    if not positional or positional[0] not in IDENTITIES:
        raise ScenarioError(f"Usage: identity(BUILDER, ...) with BUILDER one of {', '.join(IDENTITIES)}")
    return context.build(IDENTITIES[positional[0]], positional[1:], keywords)


def _op_defect(context, positional, keywords):
    return verify.contact_defect(context.form(_expect(positional, 1, 'defect(A)')[0]))


OPERATIONS = {
    'model': _op_model,
    'd': _op_d,
    'tau': _op_tau,
    'star': _op_star,
    'wedge': _op_wedge,
    'power': _op_power,
    'evaluate': _op_evaluate,
    'restrict': _op_restrict,
    'localize': _op_localize,
    'rechart': _op_rechart,
    'region': _op_region,
    'identity': _op_identity,
    'defect': _op_defect,
}


# -- checks ---------------------------------------------------------------------

def _scalar_value(context, name):
    value = context.value(name)
    if isinstance(value, DifferentialForm):
        if value.degree != 0:
            raise ScenarioError(f"'{name}' is not a scalar")
        return value.terms.get((), sp.Integer(0))
    if isinstance(value, str):
        return parse_scalar(value)
    return sp.sympify(value)


def _check_equal(context, positional, options):
    a, b = _expect(positional, 2, 'equal A B')
    return verify.forms_equal(context.form(a), context.form(b))


def _check_differs(context, positional, options):
    a, b = _expect(positional, 2, 'differs A B at=M factor=EXPR')
    if 'at' not in options or 'factor' not in options:
        raise ScenarioError('differs needs at= and factor=')
    return verify.differs_by_factor(context.form(a), context.form(b), _monomials(options['at']), parse_scalar(options['factor']))


def _check_defect_identity(context, positional, options):
    a, oracle = _expect(positional, 2, 'defect_identity A ORACLE')
    return verify.defect_identity(context.form(a), _scalar_value(context, oracle))


def _contact(mode):
    def run(context, positional, options):
        name, = _expect(positional, 1, f"{mode} A")
        value = context.value(name)
        realizations = context.profiles
        if isinstance(value, PiecewiseForm):
            domain, grid, tol = context.grid_options(value.chart, options)
            return verify.check_piecewise(value, grid, tol, domain, realizations, mode)
        eta = context.form(name)
        domain, grid, tol = context.grid_options(eta.chart, options)
        return verify.check_contact(eta, domain, grid, tol, mode, realizations)
    return run


def _check_singular(context, positional, options):
    name, = _expect(positional, 1, 'singular A expect=x:0,...')
    eta = context.form(name)
    domain, grid, tol = context.grid_options(eta.chart, options)
    radial = tuple(_names(options['radial'])) if 'radial' in options else None
    report = VerificationReport(check='singular')
    try:
        locus = verify.singular_locus(eta, domain, grid, tol, context.profiles, radial=radial)
    except ContactFormsError as e:
        return report.fail(str(e))
    report.singular_count = locus.count
    report.singular_samples = locus.points
    report.details['locus'] = locus.to_dict()
    if 'expect' in options:
        expected = _point(options['expect'])
        slack = float(options['slack']) if 'slack' in options else None
        report.passed = locus.matches(expected, slack)
        if not report.passed:
            report.error = f"Pinned coordinates {locus.pinned_names()} do not match {sorted(expected)}"
    else:
        report.passed = not locus.is_empty
    return report


def _points(context, chart, options):
    if 'point' not in options:
        raise ScenarioError('point= is required')
    return [context.full_point(chart, text) for text in options['point'].split(';')]


def _check_rank(context, positional, options):
    name, = _expect(positional, 1, 'rank A point=... expect=N')
    form = context.form(name)
    report = VerificationReport(check='rank', params={'expect': options.get('expect')})
    tangents = None
    if 'tangents' in options or 'rotation' in options:
        tangents = [{n: 1} for n in _names(options.get('tangents', ''))]
        if 'rotation' in options:
            x, y = _names(options['rotation'])
            tangents.append(verify.rotation_field(x, y))
    try:
        for point in _points(context, form.chart, options):
            if tangents is not None:
                rank = verify.slice_rank(form, point, tangents, context.profiles)
            else:
                rank = verify.rank_on_kernel(form, point, context.profiles)
            report.ranks.append({'point': point, 'rank': rank})
    except ContactFormsError as e:
        return report.fail(str(e))
    expected = int(options['expect']) if 'expect' in options else None
    report.passed = expected is None or all(r['rank'] == expected for r in report.ranks)
    return report


def _check_null(context, positional, options):
    name, = _expect(positional, 1, 'null A point=... span=...')
    form = context.form(name)
    two_form = form if form.degree == 2 else verify.tau(form)
    tol = float(options.get('tol', 1e-8))
    span = _names(options.get('span', ''))
    report = VerificationReport(check='null', params={'span': span, 'tol': tol})
    evaluator = verify.FormEvaluator(two_form, context.profiles)
    outside = [i for i, n in enumerate(two_form.chart.coordinates) if span and n not in span]
    try:
        for point in _points(context, two_form.chart, options):
            v = verify.null_direction(two_form, point, evaluator=evaluator)
            residual = float(sum(v[i] ** 2 for i in outside) ** 0.5)
            report.residuals.append(residual)
            report.details.setdefault('directions', []).append(
                {n: float(c) for n, c in zip(two_form.chart.coordinates, v) if abs(c) > tol})
    except ContactFormsError as e:
        return report.fail(str(e))
    report.max_residual = max(report.residuals)
    report.passed = report.max_residual < tol
    return report


def _check_accessibility(context, positional, options):
    name, = _expect(positional, 1, 'accessibility A path=radial disk=x,y base=...')
    form = context.form(name)
    path_kind = options.get('path', 'radial')
    samples = int(options.get('samples', 100))
    base = context.full_point(form.chart, options.get('base', ''))
    if path_kind == 'radial':
        x, y = _names(options.get('disk', 'x,y'))
        path = verify.RadialPath(x, y, base, float(options.get('angle', 0)),
                                 float(options.get('start', 0)), float(options.get('stop', 1)), samples)
    elif path_kind == 'line':
        direction = _point(options.get('direction', ''))
        path = verify.LinePath(base, direction, float(options.get('start', 0)), float(options.get('stop', 1)), samples)
    else:
        raise ScenarioError(f"Unknown path '{path_kind}' (expected radial or line)")
    span = _names(options['span']) if 'span' in options else None
    return verify.accessibility_check(form, path, float(options.get('tol', 1e-8)), span, context.profiles)


def _check_profile(context, positional, options):
    name, = _expect(positional, 1, 'profile NAME [partner=OTHER]')
    profile = context.profiles.profile(name)
    partner = context.profiles.profile(options['partner']) if 'partner' in options else None
    grid = int(options['grid']) if 'grid' in options else None
    return validate_profile(profile, grid, partner)


def _check_seams(context, positional, options):
    name, = _expect(positional, 1, 'seams P')
    return context.piecewise(name).check_seams()


def _check_boundaries(context, positional, options):
    name, = _expect(positional, 1, 'boundaries P')
    return context.piecewise(name).check_boundaries()


def _check_zero(context, positional, options):
    name, = _expect(positional, 1, 'zero A')
    value = context.value(name)
    if isinstance(value, DifferentialForm):
        return verify.zero_check(value)
    report = VerificationReport(check='zero')
    scalar = simplify(_scalar_value(context, name))
    report.details['value'] = format_scalar(scalar)
    report.passed = scalar == 0
    return report


def _check_threshold(context, positional, options):
    if not 1 <= len(positional) <= 2 or 'parameter' not in options:
        raise ScenarioError('Usage: threshold A [B] parameter=R lo=... hi=...')
    parameter = options['parameter']
    lo, hi = _number(options.get('lo', '0.1')), _number(options.get('hi', '100'))
    resolution = float(options['resolution']) if 'resolution' in options else None
    reports = []
    for name in positional:
        eta = context.form(name)
        domain, grid, tol = context.grid_options(eta.chart, options)
        reports.append(verify.contact_threshold(eta, parameter, lo, hi, domain, grid, tol, context.profiles, resolution=resolution))
    if len(reports) == 1:
        return reports[0]
    first, second = reports
    report = VerificationReport(check='threshold', params={'parameter': parameter})
    report.details = {'first': first.to_dict(), 'second': second.to_dict()}
    if not (first.passed and second.passed):
        return report.fail('Threshold search failed for one of the forms')
    a, b = first.thresholds[parameter], second.thresholds[parameter]
    slack = float(options.get('slack', (hi - lo) / 100))
    report.thresholds = {'first': a, 'second': b}
    report.passed = abs(a - b) <= slack
    return report


def _check_open_book(context, positional, options):
    name, = _expect(positional, 1, 'open_book BETA psi=NAME')
    beta = context.form(name)
    psi = context.profiles.profile(options.get('psi', 'psi'))
    radii = tuple(_number(r) for r in _names(options.get('radii', '5,10,20')))
    signs = tuple(int(s) for s in _names(options.get('l', '1,-1')))
    eps = _number(options.get('eps', '0.1'))
    u = options.get('u')
    domain, grid, tol = context.grid_options(beta.chart, options)
    return verify.check_open_book(beta, psi, radii, signs, eps, domain, grid, tol, u=u)


CHECKS = {
    'equal': _check_equal,
    'differs': _check_differs,
    'defect_identity': _check_defect_identity,
    'contact': _contact('contact'),
    'confoliation': _contact('confoliation'),
    'singular': _check_singular,
    'rank': _check_rank,
    'null': _check_null,
    'accessibility': _check_accessibility,
    'profile': _check_profile,
    'seams': _check_seams,
    'boundaries': _check_boundaries,
    'zero': _check_zero,
    'threshold': _check_threshold,
    'open_book': _check_open_book,
}


def run_scenario(path):
    """Load and run a scenario file; a file that cannot be parsed yields an error result."""
    try:
        scenario = Scenario.load(path)
    except ScenarioError as e:
        return ScenarioResult(Path(path).stem, error=str(e), timestamp=timezone.now().isoformat())
    return scenario.run()


def run_text(text, name=None):
    try:
        scenario = Scenario.parse(text, name)
    except ScenarioError as e:
        return ScenarioResult(name or 'scenario', error=str(e), timestamp=timezone.now().isoformat())
    return scenario.run()


SCENARIO_DIR = Path(__file__).resolve().parent / 'scenarios'


def shipped(name):
    """Path of a scenario shipped with the app, by name without extension."""
    path = SCENARIO_DIR / f"{name}.scenario"
    if not path.is_file():
        available = ', '.join(sorted(p.stem for p in SCENARIO_DIR.glob('*.scenario')))
        raise ScenarioError(f"No shipped scenario '{name}' (available: {available})")
    return path
