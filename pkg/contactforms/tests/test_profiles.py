import math

import numpy as np
import sympy as sp
from django.test import SimpleTestCase

from contactforms.exceptions import DomainError, MissingRealizationError, ProfileInfeasibleError
from contactforms.expr import coordinate, parse_scalar
from contactforms.exterior import Chart, parse_form
from contactforms.profiles import (
    ProfileSet,
    derivative_bound_constant,
    localize,
    make_profile,
    validate_profile,
)

t = coordinate('t')


class MakeProfileTests(SimpleTestCase):
    def test_prescribed_segments(self):
        f = make_profile('f')
        self.assertEqual(f.local_model(), sp.exp(-t ** 2 / 2))
        self.assertEqual(f.local_model(1), sp.exp(-t))
        self.assertEqual(f.local_model(-0.95), sp.exp(t))
        self.assertEqual(make_profile('g').local_model(), -t)
        self.assertEqual(make_profile('k').local_model(1.05), sp.E)

    def test_exact_values(self):
        self.assertEqual(make_profile('f').exact_value(0), 1)
        self.assertEqual(make_profile('f').exact_value(0, 1), 0)
        self.assertEqual(make_profile('g').exact_value(0, 1), -1)
        self.assertEqual(make_profile('h1').exact_value(0), 2)
        self.assertIsNone(make_profile('f').exact_value(0.85))

    def test_realization_matches_segments(self):
        f = make_profile('f')
        values = f(np.array([-1.0, 0.0, 0.5, 1.0]))
        expected = [math.exp(-1), 1.0, math.exp(-0.125), math.exp(-1)]
        np.testing.assert_allclose(values, expected, rtol=1e-12)

    def test_blend_is_between_segments(self):
        g = make_profile('g')
        value = float(g(np.array([0.85]))[0])
        self.assertTrue(-1 < value < -0.8)

    def test_u_profile_domain(self):
        u = make_profile('u', R=5)
        self.assertEqual(u.domain[0], 0.0)
        self.assertAlmostEqual(u.domain[1], 2 * math.pi * 5)
        self.assertEqual(make_profile('u', interval=(-1, 0)).domain, (-1.0, 0.0))

    def test_infeasible_parameters(self):
        for kwargs in [{'eps': 0.95}, {'eps': 1.5}, {'eps': 0}, {'R': 0.5}, {'width': 0}]:
            with self.assertRaises(ProfileInfeasibleError, msg=kwargs):
                make_profile('f', **kwargs)
        with self.assertRaises(ProfileInfeasibleError):
            make_profile('g1', eps=0.3)
        with self.assertRaises(ProfileInfeasibleError):
            make_profile('u', interval=(0, 0.1))
        with self.assertRaises(ProfileInfeasibleError):
            make_profile('spline')

    def test_custom_name(self):
        self.assertEqual(make_profile('f', name='f2').symbol(), make_profile('f', name='f2').apply(t).func)


class DiskProfileTests(SimpleTestCase):
    def test_squared_radius(self):
        H1 = make_profile('h1').on_squared_radius()
        self.assertEqual(H1.name, 'H1')
        self.assertAlmostEqual(float(H1(np.array([0.25]))[0]), 2 - 0.5 ** 4)

    def test_radial_quotient(self):
        Q = make_profile('h2').radial_quotient()
        self.assertEqual(Q.name, 'H2Q')
        self.assertAlmostEqual(float(Q(np.array([0.25]))[0]), 1.0)
        self.assertAlmostEqual(float(Q(np.array([4.0]))[0]), 0.25)

    def test_profile_set_registers_cartesian_forms(self):
        profiles = ProfileSet()
        profiles.add(make_profile('h1'))
        profiles.add(make_profile('h2'))
        self.assertEqual(sorted(profiles), ['H1', 'H2', 'H2Q', 'h1', 'h2'])
        with self.assertRaises(MissingRealizationError):
            profiles.profile('f')


class ValidateProfileTests(SimpleTestCase):
    def test_default_profiles_pass(self):
        cases = [
            (make_profile('f'), make_profile('g')),
            (make_profile('g'), None),
            (make_profile('h1'), make_profile('h2')),
            (make_profile('h2'), None),
            (make_profile('u'), None),
            (make_profile('k'), None),
            (make_profile('g1'), None),
            (make_profile('g2'), None),
        ]
        for profile, partner in cases:
            report = validate_profile(profile, partner=partner)
            self.assertTrue(report.passed, (profile, report.violations))

    def test_pair_margin_is_reported(self):
        report = validate_profile(make_profile('f'), partner=make_profile('g'))
        self.assertGreater(report.thresholds['pair_margin'], 0)
        self.assertEqual(report.details["f'g - g'f"], 'ok')

    def test_derivative_bound(self):
        report = validate_profile(make_profile('u', R=10))
        self.assertLessEqual(report.thresholds['C'], derivative_bound_constant(0.1) + 1e-12)
        self.assertAlmostEqual(derivative_bound_constant(0.1), 1 / (math.pi - 0.1))

    def test_broken_profile_fails(self):
        broken = make_profile('g', expression='1-t^2')
        report = validate_profile(broken)
        self.assertFalse(report.passed)
        self.assertEqual(report.details['odd'], 'violated')
        self.assertEqual(report.details['nonincreasing'], 'violated')
        self.assertTrue(any(v['constraint'] == 'exact_values' for v in report.violations))

    def test_tiny_grid(self):
        report = validate_profile(make_profile('f'), grid=1)
        self.assertFalse(report.passed)
        self.assertIsNotNone(report.error)


class LocalizeTests(SimpleTestCase):
    def setUp(self):
        self.profiles = {'f': make_profile('f'), 'g': make_profile('g')}

    def test_scalar(self):
        local = localize(parse_scalar('f(t) + g(t)'), self.profiles, {'t': 0})
        self.assertEqual(local, sp.exp(-t ** 2 / 2) - t)

    def test_derivatives_and_end_segments(self):
        local = localize(parse_scalar("f'(t) g(t)"), self.profiles, {'t': 1})
        self.assertEqual(local, sp.exp(-t))

    def test_form(self):
        chart = Chart(('t', 'x', 'y', 'z'))
        eta = parse_form('f(t) (d[z] + x d[y]) + g(t) d[x]', chart)
        self.assertEqual(localize(eta, self.profiles, {'t': 0}), parse_form('exp(-t^2/2) (d[z] + x d[y]) - t d[x]', chart))

    def test_unevaluable_arguments_are_kept(self):
        e = parse_scalar('f(x)')
        self.assertEqual(localize(e, self.profiles, {'t': 0}), e)

    def test_outside_segments(self):
        with self.assertRaises(DomainError):
            localize(parse_scalar('f(t)'), self.profiles, {'t': 0.85})
