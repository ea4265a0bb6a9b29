import random

import sympy as sp
from django.test import SimpleTestCase, override_settings

from contactforms.exceptions import (
    ChartMismatchError,
    CyclicBindingError,
    DegreeError,
    DimensionError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)
from contactforms.expr import coordinate
from contactforms.exterior import (
    Chart,
    DifferentialForm,
    Interval,
    VectorField,
    exterior_derivative,
    format_form,
    hodge_star,
    interior_product,
    parse_form,
    permutation_sign,
    pullback,
    substitute,
    top_coefficient,
    wedge,
    wedge_power,
)

XYZ = Chart(('x', 'y', 'z'))
x, y, z = coordinate('x'), coordinate('y'), coordinate('z')

TRIALS = 200


def random_coefficient(rng, chart):
    total = sp.Integer(0)
    for _ in range(rng.randint(1, 2)):
        a, b = rng.sample(chart.symbols, 2)
        total += rng.choice([-3, -2, -1, 1, 2, 3]) * a ** rng.randint(0, 2) * b ** rng.randint(0, 2)
    return total


def random_form(rng, chart, degree):
    terms = {}
    for _ in range(rng.randint(1, 3)):
        terms[tuple(sorted(rng.sample(range(chart.dim), degree)))] = random_coefficient(rng, chart)
    return DifferentialForm(chart, degree, terms)


def random_chart(rng):
    return Chart(tuple(f"u{i}" for i in range(rng.randint(3, 9))))


class ChartTests(SimpleTestCase):
    def test_parse_and_product(self):
        chart = Chart.product(Chart.parse('x, y'), Chart(('t',), (Interval(-1, 1),)), labels=['disk', 'line'])
        self.assertEqual(chart.coordinates, ('x', 'y', 't'))
        self.assertEqual(chart.factor('line'), ('t',))
        self.assertEqual(chart.domain('t'), Interval(-1, 1))

    def test_invalid_charts(self):
        with self.assertRaises(DimensionError):
            Chart(('x', 'x'))
        with self.assertRaises(ExpressionSyntaxError):
            Chart(('x', 'd'))
        with self.assertRaises(UnknownIdentifierError):
            XYZ.index('w')

    def test_permutation_sign(self):
        self.assertEqual(permutation_sign((0, 1, 2)), 1)
        self.assertEqual(permutation_sign((1, 0, 2)), -1)
        self.assertEqual(permutation_sign((2, 0, 1)), 1)
        self.assertEqual(permutation_sign((0, 0)), 0)


class ParseFormTests(SimpleTestCase):
    def test_coefficients(self):
        eta = parse_form('d[z]+x d[y]', XYZ)
        self.assertEqual(eta.degree, 1)
        self.assertEqual(eta.coefficient('y'), x)
        self.assertEqual(eta.coefficient('z'), 1)
        self.assertEqual(eta.coefficient('x'), 0)

    def test_coefficient_sign_follows_order(self):
        omega = parse_form('d[x]^d[y]', XYZ)
        self.assertEqual(omega.coefficient('x', 'y'), 1)
        self.assertEqual(omega.coefficient('y', 'x'), -1)

    def test_unicode_wedge_and_scalar_powers(self):
        self.assertEqual(parse_form('x^2 d[x]∧d[y]', XYZ), parse_form('x x d[x]^d[y]', XYZ))

    def test_errors(self):
        with self.assertRaises(DegreeError):
            parse_form('d[x] + x', XYZ)
        with self.assertRaises(DegreeError):
            parse_form('d[x] d[y]', XYZ)
        with self.assertRaises(UnknownIdentifierError):
            parse_form('d[w]', XYZ)
        with self.assertRaises(ExpressionSyntaxError):
            parse_form('d[x] / d[y]', XYZ)

    def test_caret_between_form_and_scalar(self):
        for text in ['d[x]^2', '(d[x]+d[y])^2', '2^d[x]', 'x^(d[y]^d[z])']:
            with self.assertRaises(ExpressionSyntaxError, msg=text):
                parse_form(text, XYZ)
        self.assertEqual(parse_form('x ∧ d[y]', XYZ), parse_form('x d[y]', XYZ))
        self.assertEqual(parse_form('(d[x]+d[y])^d[z]', XYZ), parse_form('d[x]^d[z] + d[y]^d[z]', XYZ))

    def test_format_round_trip(self):
        omega = parse_form('(x^2+1) d[x]^d[y] - y d[y]^d[z] + 3 d[x]^d[z]', XYZ)
        self.assertEqual(parse_form(format_form(omega), XYZ), omega)

    def test_format_of_zero_and_scalars(self):
        self.assertEqual(format_form(DifferentialForm.zero(XYZ, 2)), '0')
        self.assertEqual(format_form(DifferentialForm.scalar(XYZ, x + 1)), 'x + 1')


class AlgebraTests(SimpleTestCase):
    def test_wedge_anticommutes_on_one_forms(self):
        dx, dy = parse_form('d[x]', XYZ), parse_form('d[y]', XYZ)
        self.assertEqual(wedge(dx, dy), -wedge(dy, dx))
        self.assertTrue(wedge(dx, dx).is_zero)

    def test_derivative_of_scalar(self):
        self.assertEqual(exterior_derivative(parse_form('x^2 y', XYZ)), parse_form('2 x y d[x] + x^2 d[y]', XYZ))

    def test_derivative_of_contact_model(self):
        self.assertEqual(exterior_derivative(parse_form('d[z]+x d[y]', XYZ)), parse_form('d[x]^d[y]', XYZ))

    def test_wedge_power(self):
        chart = Chart(('x1', 'y1', 'x2', 'y2'))
        omega = exterior_derivative(parse_form('x1 d[y1] + x2 d[y2]', chart))
        self.assertEqual(top_coefficient(wedge_power(omega, 2)), 2)
        self.assertEqual(wedge_power(omega, 2), wedge(omega, omega))
        self.assertEqual(wedge_power(omega, 0), DifferentialForm.scalar(chart, 1))
        self.assertTrue(wedge_power(parse_form('d[x1] + d[y1]', chart), 2).is_zero)

    def test_wedge_overflow(self):
        a = parse_form('d[x]^d[y]', XYZ)
        b = parse_form('d[y]^d[z]', XYZ)
        with self.assertRaises(DegreeError):
            wedge(a, b)
        with override_settings(CONTACTFORMS={'WEDGE_OVERFLOW': 'zero'}):
            result = wedge(a, b)
        self.assertTrue(result.is_zero)
        self.assertEqual(result.degree, 4)

    def test_chart_mismatch(self):
        with self.assertRaises(ChartMismatchError):
            parse_form('d[x]', Chart(('x', 'y'))) + parse_form('d[x]', Chart(('x', 'z')))

    def test_hodge_star_in_three_dimensions(self):
        self.assertEqual(hodge_star(parse_form('d[x]', XYZ)), parse_form('d[y]^d[z]', XYZ))
        self.assertEqual(hodge_star(parse_form('d[y]', XYZ)), parse_form('d[z]^d[x]', XYZ))
        self.assertEqual(hodge_star(parse_form('1', XYZ)), parse_form('d[x]^d[y]^d[z]', XYZ))

    def test_interior_product(self):
        v = VectorField.coordinate_field(XYZ, 'x')
        self.assertEqual(interior_product(v, parse_form('d[x]^d[y]', XYZ)), parse_form('d[y]', XYZ))
        self.assertEqual(interior_product(v, parse_form('d[y]^d[x]', XYZ)), parse_form('-d[y]', XYZ))
        self.assertTrue(interior_product(v, parse_form('x', XYZ)).is_zero)

    def test_top_coefficient_needs_top_degree(self):
        with self.assertRaises(DegreeError):
            top_coefficient(parse_form('d[x]', XYZ))


class AlgebraPropertyTests(SimpleTestCase):
    """Identities of the exterior algebra on seeded random forms."""

    def test_d_squared_vanishes(self):
        rng = random.Random(11)
        for _ in range(TRIALS):
            chart = random_chart(rng)
            omega = random_form(rng, chart, rng.randint(0, chart.dim - 2))
            self.assertTrue(exterior_derivative(exterior_derivative(omega)).is_zero, omega)

    def test_leibniz_rule(self):
        rng = random.Random(12)
        for _ in range(TRIALS):
            chart = random_chart(rng)
            p = rng.randint(0, chart.dim - 1)
            q = rng.randint(0, chart.dim - 1 - p)
            a, b = random_form(rng, chart, p), random_form(rng, chart, q)
            expected = wedge(exterior_derivative(a), b) + (-1) ** p * wedge(a, exterior_derivative(b))
            self.assertEqual(exterior_derivative(wedge(a, b)), expected, (a, b))

    def test_graded_commutativity(self):
        rng = random.Random(13)
        for _ in range(TRIALS):
            chart = random_chart(rng)
            p = rng.randint(0, chart.dim)
            q = rng.randint(0, chart.dim - p)
            a, b = random_form(rng, chart, p), random_form(rng, chart, q)
            self.assertEqual(wedge(a, b), (-1) ** (p * q) * wedge(b, a), (a, b))

    def test_star_star(self):
        rng = random.Random(14)
        for _ in range(TRIALS):
            chart = random_chart(rng)
            n, k = chart.dim, rng.randint(0, chart.dim)
            omega = random_form(rng, chart, k)
            self.assertEqual(hodge_star(hodge_star(omega)), (-1) ** (k * (n - k)) * omega, omega)

    def test_interior_product_is_an_antiderivation(self):
        rng = random.Random(15)
        for _ in range(TRIALS):
            chart = random_chart(rng)
            p = rng.randint(1, chart.dim - 1)
            q = rng.randint(1, chart.dim - p)
            a, b = random_form(rng, chart, p), random_form(rng, chart, q)
            names = rng.sample(chart.coordinates, 2)
            v = VectorField(chart, {name: random_coefficient(rng, chart) for name in names})
            expected = wedge(interior_product(v, a), b) + (-1) ** p * wedge(a, interior_product(v, b))
            self.assertEqual(interior_product(v, wedge(a, b)), expected, (a, b))


class SubstitutionTests(SimpleTestCase):
    def test_constant_binding_restricts_to_a_slice(self):
        restricted = substitute(parse_form('d[z]+x d[y]', XYZ), {'z': 0})
        self.assertEqual(restricted.chart.coordinates, ('x', 'y'))
        self.assertEqual(restricted, parse_form('x d[y]', Chart(('x', 'y'))))

    def test_chain_rule_for_expression_bindings(self):
        restricted = substitute(parse_form('d[z]+x d[y]', XYZ), {'z': 'x y'})
        self.assertEqual(restricted, parse_form('y d[x] + 2 x d[y]', Chart(('x', 'y'))))

    def test_evaluation_mode_keeps_the_chart(self):
        evaluated = substitute(parse_form('d[z]+x d[y]', XYZ), {'x': 0}, pullback=False)
        self.assertEqual(evaluated, parse_form('d[z]', XYZ))

    def test_bindings_compose(self):
        evaluated = substitute(parse_form('x d[y]', XYZ), {'x': 'z+1', 'z': 2}, pullback=False)
        self.assertEqual(evaluated, parse_form('3 d[y]', XYZ))

    def test_cyclic_bindings(self):
        with self.assertRaises(CyclicBindingError):
            substitute(parse_form('x d[y]', XYZ), {'x': 'y', 'y': 'x'})

    def test_binding_outside_chart(self):
        with self.assertRaises(UnknownIdentifierError):
            substitute(parse_form('x d[y]', XYZ), {'w': 0})

    def test_pullback_keeps_chart(self):
        self.assertEqual(pullback(parse_form('x d[y]', XYZ), {'x': '2 x'}), parse_form('2 x d[y]', XYZ))
        self.assertEqual(pullback(parse_form('d[z]', XYZ), {'z': 'z + x y'}), parse_form('d[z] + y d[x] + x d[y]', XYZ))
