import sympy as sp
from django.test import SimpleTestCase

from contactforms import verify
from contactforms.constructions import (
    ContactModel,
    asymmetric_scale,
    binding_extension,
    binding_extension_identity,
    bundle_sum_form,
    concave_collar_forms,
    contactomorphism_pullback,
    derivative_identity,
    exact_bundle_form,
    exact_bundle_identity,
    exact_bundle_terms,
    fold_circle_form,
    fold_circle_identity,
    fold_seam_type,
    long_collar_bundle_form,
    open_book_form,
    open_book_identity,
    open_book_vanishing_term,
    product_fold_constant,
    product_fold_form,
    product_fold_identity,
)
from contactforms.exceptions import (
    CollarMismatchError,
    ConstructionError,
    DimensionError,
    MissingModelError,
    PartitionOfUnityError,
)
from contactforms.expr import coordinate
from contactforms.exterior import Chart, DifferentialForm, Interval, parse_form
from contactforms.profiles import ExpressionRealization, ProfileSet, make_profile

t = coordinate('t')


def standard_profiles(*kinds):
    profiles = ProfileSet()
    for kind in kinds:
        profiles.add(make_profile(kind))
    return profiles


class ContactModelTests(SimpleTestCase):
    def test_standard_model(self):
        model = ContactModel.standard()
        self.assertEqual(model.chart.coordinates, ('x', 'y', 'z'))
        self.assertEqual(model.form, parse_form('d[z] + x d[y]', model.chart))
        self.assertEqual(model.reeb, 'z')
        self.assertEqual(verify.contact_defect(model.form), 1)

    def test_tags_and_pairs(self):
        model = ContactModel.standard('1', pairs=2)
        self.assertEqual(model.chart.coordinates, ('x1_1', 'y1_1', 'x1_2', 'y1_2', 'z1'))
        self.assertEqual(model.half_dimension, 3)
        self.assertEqual(verify.contact_defect(model.form), 2)
        self.assertEqual(model.defect, 2)

    def test_partner_has_opposite_defect(self):
        for pairs in (0, 1, 2):
            model = ContactModel.standard(pairs=pairs)
            partner = model.partner()
            self.assertEqual(verify.contact_defect(partner.form), -model.defect)
            self.assertEqual(partner.defect, -model.defect)
            self.assertEqual(partner.partner().form, model.form)

    def test_missing_partner(self):
        model = ContactModel.standard()
        bare = ContactModel('bare', model.chart, model.form)
        with self.assertRaises(MissingModelError):
            bare.partner()

    def test_negative_pairs(self):
        with self.assertRaises(DimensionError):
            ContactModel.standard(pairs=-1)

    def test_contactomorphism_pullback(self):
        model = ContactModel.standard()
        pulled = contactomorphism_pullback(model, model.chart, {'z': 'z - x y', 'y': 'y'})
        self.assertEqual(pulled, parse_form('d[z] - y d[x]', model.chart))
        self.assertEqual(verify.contact_defect(pulled), 1)


class FoldCircleTests(SimpleTestCase):
    def test_defect_identity(self):
        for pairs in (1, 2):
            lam = ContactModel.standard(pairs=pairs)
            report = verify.defect_identity(fold_circle_form(lam), fold_circle_identity(lam))
            self.assertTrue(report.passed, report.details)

    def test_contact_on_grid(self):
        lam = ContactModel.standard()
        report = verify.check_contact(
            fold_circle_form(lam), {'x': 0, 'y': 0, 'z': 0}, 21,
            realizations=standard_profiles('f', 'g'),
        )
        self.assertTrue(report.passed)
        self.assertGreater(report.min_defect, 0)
        self.assertGreaterEqual(report.details['max_defect'], 2.0 - 1e-9)

    def test_chart_layout(self):
        alpha = fold_circle_form(ContactModel.standard())
        self.assertEqual(alpha.chart.coordinates, ('t', 'x', 'y', 'z', 'phi'))
        self.assertTrue(alpha.chart.domain('phi').periodic)


class OpenBookTests(SimpleTestCase):
    def setUp(self):
        self.page = Chart(('x1', 'y1'), (Interval(-1, 1), Interval(-1, 1)))
        self.beta = parse_form('x1 d[y1]', self.page)

    def test_defect_identity(self):
        for l in (1, -1, 'l'):
            report = verify.defect_identity(open_book_form(self.beta, l=l), open_book_identity(self.beta, l=l))
            self.assertTrue(report.passed, report.details)

    def test_vanishing_term(self):
        self.assertTrue(open_book_vanishing_term(self.beta).is_zero)

    def test_odd_page(self):
        with self.assertRaises(DimensionError):
            open_book_identity(parse_form('d[z]', Chart(('z',))))

    def test_phi_clash(self):
        with self.assertRaises(DimensionError):
            open_book_form(parse_form('d[phi]', Chart(('phi', 'w'))))


class DiskTests(SimpleTestCase):
    def setUp(self):
        self.nu = ContactModel.standard('1')
        self.lam = ContactModel.standard('2')

    def test_binding_extension_identity(self):
        report = verify.defect_identity(binding_extension(self.nu), binding_extension_identity(self.nu))
        self.assertTrue(report.passed, report.details)

    def test_product_fold_identity(self):
        report = verify.defect_identity(product_fold_form(self.nu, self.lam), product_fold_identity(self.nu, self.lam))
        self.assertTrue(report.passed, report.details)

    def test_product_fold_constant(self):
        self.assertEqual(product_fold_constant(self.nu, self.lam), 48)
        self.assertEqual(product_fold_constant(ContactModel.standard('1', pairs=0), ContactModel.standard('2', pairs=0)), 4)

    def test_product_fold_chart(self):
        eta = product_fold_form(self.nu, self.lam)
        self.assertEqual(eta.chart.coordinates, ('x1', 'y1', 'z1', 'x', 'y', 't', 'x2', 'y2', 'z2'))
        self.assertEqual(eta.chart.factor('N'), ('x2', 'y2', 'z2'))


class PiecewiseTests(SimpleTestCase):
    def test_asymmetric_scale_seams_glue(self):
        profiles = standard_profiles('f', 'g', 'k', 'h1', 'h2')
        eta = product_fold_form(ContactModel.standard('1'), ContactModel.standard('2'))
        scaled = asymmetric_scale(eta, profiles=profiles)
        self.assertEqual([r.name for r in scaled.regions], ['W1', 'middle', 'W2'])
        report = scaled.check_seams()
        self.assertTrue(report.passed, report.violations)

    def test_asymmetric_scale_needs_realizations(self):
        eta = product_fold_form(ContactModel.standard('1'), ContactModel.standard('2'))
        with self.assertRaises(ConstructionError):
            asymmetric_scale(eta)

    def test_concave_collars(self):
        alpha, lam = ContactModel.standard('a'), ContactModel.standard('b')
        profiles = standard_profiles('g1', 'g2')
        for variant in ('swap', 'four_part'):
            collar = concave_collar_forms(alpha, lam, variant, profiles=profiles)
            self.assertTrue(collar.check_seams().passed, variant)
            self.assertTrue(collar.check_boundaries().passed, variant)
            pinned = {name: 0 for name in ('xa', 'ya', 'za', 'xb', 'yb', 'zb')}
            report = verify.check_piecewise(collar, 11, domain=pinned)
            self.assertTrue(report.passed, (variant, report.details))

    def test_concave_collar_defect_is_positive_exponential(self):
        alpha, lam = ContactModel.standard('a'), ContactModel.standard('b')
        collar = concave_collar_forms(alpha, lam, 'four_part')
        self.assertEqual(verify.contact_defect(collar.region('four_part1').form), 6 * sp.exp(-2 * t))

    def test_concave_collar_variants(self):
        alpha, lam = ContactModel.standard('a'), ContactModel.standard('b')
        with self.assertRaises(ConstructionError):
            concave_collar_forms(alpha, lam, 'spiral')
        bare = ContactModel('bare', lam.chart, lam.form)
        with self.assertRaises(MissingModelError):
            concave_collar_forms(alpha, bare, 'four_part')

    def test_circle_collar(self):
        alpha, lam = ContactModel.standard('a'), ContactModel.standard('b')
        collar = concave_collar_forms(alpha, lam, 'circle')
        self.assertEqual(collar.chart.coordinates, ('t', 'xb', 'yb', 'zb', 'xa', 'ya', 'za'))
        self.assertTrue(collar.chart.domain('t').periodic)
        seams = collar.check_seams()
        self.assertTrue(seams.passed, seams.violations)
        self.assertEqual(list(seams.details.values()), ['convex_fold', 'concave_fold', 'convex_fold'])
        self.assertTrue(collar.check_boundaries().passed)
        first, last = collar.regions[0], collar.regions[-1]
        self.assertEqual(fold_seam_type(last.form, first.form, 't', 'zb', 1), 'concave_fold')

        # the factor in front of d[zb] agrees on both sides of every seam, the wrap 1 ~ 0 included
        factors = [region.form.coefficient('zb') for region in collar.regions]
        for seam, left, right in zip(collar.seams, factors, factors[1:]):
            self.assertEqual(left.subs(t, seam.position), right.subs(t, seam.position), seam)
        self.assertEqual(factors[-1].subs(t, 1), factors[0].subs(t, 0))

        expected = [sp.exp(2 * t), sp.exp(1 - 2 * t), sp.exp(2 * t - 1), sp.exp(2 - 2 * t)]
        for region, factor in zip(collar.regions, expected):
            self.assertEqual(sp.simplify(verify.contact_defect(region.form) - 6 * factor), 0, region.name)
        swept = {'xb': (-1, 1), 'ya': (-1, 1), 'yb': 0, 'zb': 0, 'xa': 0, 'za': 0}
        report = verify.check_piecewise(collar, 7, domain=swept)
        self.assertTrue(report.passed, report.details)

    def test_fold_seam_types(self):
        alpha, lam = ContactModel.standard('a'), ContactModel.standard('b')
        chart = Chart.product(Chart(('t',)), alpha.chart, lam.chart)
        up = alpha.on(chart).scale(sp.exp(t)) + lam.on(chart)
        down = alpha.on(chart).scale(sp.exp(-t)) + lam.on(chart)
        self.assertEqual(fold_seam_type(up, down, 't', 'za'), 'convex_fold')
        self.assertEqual(fold_seam_type(down, up, 't', 'za'), 'concave_fold')
        self.assertEqual(fold_seam_type(up, up, 't', 'za'), 'smooth')
        with self.assertRaises(CollarMismatchError):
            fold_seam_type(up, up.scale(t + 2), 't', 'za')

    def test_derivative_identity(self):
        eta = parse_form('f(t) d[z] + x d[y]', Chart(('t', 'x', 'y', 'z')))
        self.assertTrue(derivative_identity(eta).is_zero)


class BundleTests(SimpleTestCase):
    def setUp(self):
        base = Chart(('z',), (Interval(-1, 0),))
        self.mu = ContactModel('collar', base, DifferentialForm.differential(base, 'z'),
                               -DifferentialForm.differential(base, 'z'), 'z')
        fiber = Chart(('x', 'y'), (Interval(-1, 1), Interval(-1, 1)))
        self.beta = parse_form('x d[y]', fiber)

    def test_exact_bundle_identity(self):
        eta = exact_bundle_form(self.mu, self.beta, 'z')
        self.assertTrue(verify.defect_identity(eta, exact_bundle_identity(self.mu, self.beta, 'z')).passed)
        self.assertEqual(sorted(exact_bundle_terms(self.mu, self.beta, 'z')), ['C1', 'C3', 'C4'])

    def test_exact_bundle_with_larger_base(self):
        mu = ContactModel.standard('b')
        beta = parse_form('x d[y]', Chart(('x', 'y')))
        eta = exact_bundle_form(mu, beta, 'xb')
        self.assertTrue(verify.defect_identity(eta, exact_bundle_identity(mu, beta, 'xb')).passed)

    def test_exact_bundle_validation(self):
        with self.assertRaises(DimensionError):
            exact_bundle_form(self.mu, self.beta, 'w')
        with self.assertRaises(DimensionError):
            exact_bundle_form(self.mu, parse_form('d[w]', Chart(('w',))), 'z')

    def test_bundle_sum(self):
        chart = Chart(('x', 'y', 'z'))
        dz = parse_form('d[z]', chart)
        beta = parse_form('x d[y] - y d[x]', chart)
        theta = bundle_sum_form(beta, [('x^2', dz), ('1-x^2', dz)])
        self.assertEqual(verify.contact_defect(theta), 2 * coordinate('K'))

    def test_bundle_sum_weights(self):
        chart = Chart(('x', 'y', 'z'))
        dz = parse_form('d[z]', chart)
        with self.assertRaises(PartitionOfUnityError):
            bundle_sum_form(dz, [('x', dz), ('1', dz)])
        with self.assertRaises(PartitionOfUnityError):
            bundle_sum_form(dz, [])

    def realizations(self, *psi):
        profiles = ProfileSet()
        profiles.add(ExpressionRealization('u', ['v'], 'v^2'))
        profiles.add(ExpressionRealization('psi', *psi))
        return profiles

    def test_threshold_of_the_exact_bundle(self):
        # defect R + u'(z) x y, most negative at z = -1, x = y = 1
        eta = exact_bundle_form(self.mu, self.beta, 'z')
        report = verify.contact_threshold(eta, 'R', 0, 4, grid=5, realizations=self.realizations(['x', 'y'], 'x*y'))
        self.assertTrue(report.passed, report.error)
        self.assertGreater(report.thresholds['R'], 2)
        self.assertLessEqual(report.thresholds['R'], 2.004)

    def long_collar(self, length):
        boundary = Chart(('w',), (Interval(-1, 1),))
        edge = ContactModel('edge', boundary, DifferentialForm.differential(boundary, 'w'),
                            -DifferentialForm.differential(boundary, 'w'), 'w')
        return long_collar_bundle_form(ContactModel.standard('b'), edge, 'xb', length=length)

    def test_long_collar_factors_out(self):
        for length in (0, 2):
            eta = self.long_collar(length)
            self.assertEqual(eta.chart.coordinates, ('xb', 'yb', 'zb', 's', 'w'))
            self.assertEqual(eta.chart.domain('s'), Interval(-1, float(length)))
            self.assertTrue(verify.defect_identity(eta, verify.collar_factor_identity(eta)).passed)
        # a potential that depends on s breaks the factorization
        eta = self.long_collar(0)
        s = coordinate('s')
        skewed = eta + DifferentialForm.differential(eta.chart, 'yb').scale(s * coordinate('zb'))
        self.assertFalse(verify.defect_identity(skewed, verify.collar_factor_identity(skewed)).passed)

    def test_threshold_does_not_depend_on_collar_length(self):
        # defect 2 R e^s (R + u'(xb) w): the collar only rescales it
        realizations = self.realizations(['yb', 'zb', 'w'], 'yb*w')
        thresholds = []
        for length in (0, 2):
            report = verify.contact_threshold(self.long_collar(length), 'R', 0, 4, grid=5, realizations=realizations)
            self.assertTrue(report.passed, report.error)
            thresholds.append(report.thresholds['R'])
        self.assertGreater(thresholds[0], 2)
        self.assertLessEqual(thresholds[0], 2.004)
        self.assertAlmostEqual(thresholds[0], thresholds[1], delta=0.004)
