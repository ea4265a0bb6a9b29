"""
Single operations shared by the ``exterior`` management command and the API
views. Every function takes plain text inputs and returns JSON-ready data.
"""
from . import verify
from .exceptions import DomainError
from .expr import evaluate, format_scalar
from .exterior import Chart, exterior_derivative, format_form, hodge_star, parse_form, wedge


def form_payload(form):
    return {
        'chart': str(form.chart),
        'degree': form.degree,
        'form': format_form(form),
        'terms': {'^'.join(names) or '1': format_scalar(c) for names, c in form.items()},
    }


def _parse(chart, text):
    chart = chart if isinstance(chart, Chart) else Chart.parse(chart)
    return parse_form(text, chart)


def _assignment(item):
    name, sep, value = item.partition('=')
    if not sep or not name.strip():
        raise DomainError(f"Expected NAME=VALUE, got '{item}'")
    return name.strip(), value


def _number(item, text):
    try:
        return float(text)
    except ValueError:
        raise DomainError(f"Not a number in '{item}': '{text}'") from None


def parse_domain(items):
    """``["x=-1:1", "t=0"]`` -> {"x": (-1.0, 1.0), "t": 0.0}."""
    domain = {}
    for item in items or ():
        name, value = _assignment(item)
        if ':' in value:
            bounds = value.split(':')
            if len(bounds) != 2:
                raise DomainError(f"Expected NAME=LO:HI, got '{item}'")
            domain[name] = (_number(item, bounds[0]), _number(item, bounds[1]))
        else:
            domain[name] = _number(item, value)
    return domain


def parse_point(text):
    """``"x=0.5,y=0"`` -> {"x": 0.5, "y": 0.0}."""
    if not text:
        return None
    point = {}
    for item in text.split(','):
        name, value = _assignment(item)
        point[name] = _number(item, value)
    return point


def parse(chart, text):
    return form_payload(_parse(chart, text))


def derivative(chart, text):
    return form_payload(exterior_derivative(_parse(chart, text)))


def wedge_forms(chart, texts):
    return form_payload(wedge(*(_parse(chart, t) for t in texts)))


def star(chart, text):
    return form_payload(hodge_star(_parse(chart, text)))


def tau(chart, text):
    return form_payload(verify.tau(_parse(chart, text)))


def defect(chart, text, point=None):
    eta = _parse(chart, text)
    value = verify.contact_defect(eta)
    payload = {'chart': str(eta.chart), 'defect': format_scalar(value)}
    if point:
        payload['point'] = point
        payload['value'] = evaluate(value, point, chart=eta.chart)
    return payload


def check(chart, text, mode='contact', domain=None, grid=None, tol=None):
    return verify.check_contact(_parse(chart, text), domain, grid, tol, mode)
