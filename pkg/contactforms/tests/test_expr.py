import numpy as np
import sympy as sp
from django.test import SimpleTestCase

from contactforms.exceptions import (
    DegreeError,
    DomainError,
    ExpressionSyntaxError,
    MissingRealizationError,
    UnknownIdentifierError,
)
from contactforms.expr import (
    Point,
    compile_scalar,
    coordinate,
    diff,
    evaluate,
    format_scalar,
    parse_scalar,
    profile_symbol,
    simplify,
)
from contactforms.exterior import Chart, Interval
from contactforms.profiles import ExpressionRealization, make_profile

x, y, t = coordinate('x'), coordinate('y'), coordinate('t')


class ParseScalarTests(SimpleTestCase):
    def test_result_is_expanded(self):
        self.assertEqual(parse_scalar('(x+1)^2'), x ** 2 + 2 * x + 1)

    def test_juxtaposition_multiplies(self):
        self.assertEqual(parse_scalar('2 x y'), 2 * x * y)
        self.assertEqual(parse_scalar('(x+1)(x-1)'), x ** 2 - 1)

    def test_division_by_rational_constant(self):
        self.assertEqual(parse_scalar('x/2'), x / 2)

    def test_exp_and_decimals(self):
        self.assertEqual(parse_scalar('exp(1)'), sp.E)
        self.assertEqual(parse_scalar('0.5 x'), x / 2)

    def test_simplify_is_idempotent(self):
        e = parse_scalar('(2-(x^2+y^2)^2)(1+x)')
        self.assertEqual(simplify(e), e)

    def test_format_round_trip(self):
        for text in ['2-(x^2+y^2)^2', "f'(t^2) + exp(-t) x", 'x/3 - 7']:
            e = parse_scalar(text)
            self.assertEqual(parse_scalar(format_scalar(e)), e, text)


class SyntaxErrorTests(SimpleTestCase):
    def test_malformed_text(self):
        for text in ['x +* y', '(x', '', 'x^', '   ']:
            with self.assertRaises(ExpressionSyntaxError, msg=text):
                parse_scalar(text)

    def test_division_only_by_nonzero_constants(self):
        for text in ['x/0', 'x/y']:
            with self.assertRaises(ExpressionSyntaxError, msg=text):
                parse_scalar(text)

    def test_negative_and_symbolic_exponents(self):
        for text in ['x^-1', 'x^y']:
            with self.assertRaises(ExpressionSyntaxError, msg=text):
                parse_scalar(text)

    def test_error_carries_position(self):
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse_scalar('x + y)')
        self.assertGreater(ctx.exception.position, 0)
        self.assertTrue(ctx.exception.pointer().endswith('^'))
        self.assertIn('position', str(ctx.exception))

    def test_reserved_names(self):
        with self.assertRaises(ExpressionSyntaxError):
            parse_scalar('d + 1')

    def test_differential_in_scalar(self):
        with self.assertRaises(DegreeError):
            parse_scalar('x d[y]')


class IdentifierTests(SimpleTestCase):
    def test_strict_mode_rejects_unknown_coordinates(self):
        chart = Chart(('x', 'y'))
        self.assertEqual(parse_scalar('x y', chart, strict=True), x * y)
        with self.assertRaises(UnknownIdentifierError) as ctx:
            parse_scalar('x w', chart, strict=True)
        self.assertEqual(ctx.exception.name, 'w')

    def test_lenient_mode_accepts_parameters(self):
        self.assertEqual(parse_scalar('R x'), coordinate('R') * x)

    def test_call_on_coordinate_is_product(self):
        self.assertEqual(parse_scalar('x(y+1)', Chart(('x', 'y'))), x * y + x)


class ProfileSymbolTests(SimpleTestCase):
    def test_primes_select_the_derivative(self):
        self.assertEqual(parse_scalar("f'(t)"), profile_symbol('f', 1)(t))
        self.assertEqual(format_scalar(profile_symbol('f', 2)(t)), "f''(t)")

    def test_chain_rule(self):
        e = parse_scalar('f(t^2)')
        self.assertEqual(diff(e, 't'), simplify(2 * t * profile_symbol('f', 1)(t ** 2)))

    def test_potential_derivative(self):
        e = parse_scalar('D[psi(x, y), x]')
        self.assertIsInstance(e, sp.Derivative)
        self.assertEqual(format_scalar(e), 'D[psi(x, y), x]')

    def test_primes_on_potentials_are_rejected(self):
        with self.assertRaises(ExpressionSyntaxError):
            parse_scalar("psi'(x, y)")


class EvaluateTests(SimpleTestCase):
    def test_exact_evaluation(self):
        self.assertEqual(evaluate(parse_scalar('x^2+y'), {'x': 2, 'y': 1}), 5.0)

    def test_profile_realization(self):
        f = make_profile('f')
        self.assertAlmostEqual(evaluate(parse_scalar('f(t)'), {'t': 0.0}, {'f': f}), 1.0)
        self.assertAlmostEqual(evaluate(parse_scalar("f'(t)"), {'t': 0.95}, {'f': f}), -np.exp(-0.95))

    def test_potential_realization(self):
        psi = ExpressionRealization('psi', ['x', 'y'], 'x*y')
        value = evaluate(parse_scalar('D[psi(x, y), x]'), {'x': 2.0, 'y': 3.0}, {'psi': psi})
        self.assertAlmostEqual(value, 3.0)

    def test_missing_realization(self):
        with self.assertRaises(MissingRealizationError) as ctx:
            evaluate(parse_scalar('g(t)'), {'t': 0.0})
        self.assertEqual(ctx.exception.name, 'g')

    def test_parameters(self):
        self.assertAlmostEqual(evaluate(parse_scalar('R x'), {'x': 2.0}, parameters={'R': 3}), 6.0)

    def test_compile_broadcasts(self):
        func = compile_scalar(parse_scalar('x*y'), ['x', 'y'])
        out = func(np.array([1.0, 2.0]), np.array([[1.0], [3.0]]))
        self.assertEqual(out.shape, (2, 2))
        self.assertEqual(out.tolist(), [[1.0, 2.0], [3.0, 6.0]])

    def test_compile_rejects_free_symbols(self):
        with self.assertRaises(UnknownIdentifierError):
            compile_scalar(parse_scalar('x + w'), ['x'])


class PointTests(SimpleTestCase):
    def test_domain_checks(self):
        chart = Chart(('x', 'y'), (Interval(-1, 1), Interval()))
        Point({'x': 0.5, 'y': 100.0}).check(chart)
        with self.assertRaises(DomainError):
            Point({'x': 2.0, 'y': 0.0}).check(chart)
        with self.assertRaises(DomainError):
            Point({'x': 0.0}).check(chart)
