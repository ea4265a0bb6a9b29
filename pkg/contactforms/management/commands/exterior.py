import json

from django.core.management.base import BaseCommand, CommandError

from contactforms import operations
from contactforms.exceptions import ContactFormsError, ExpressionSyntaxError


class Command(BaseCommand):
    help = 'Single exterior-calculus operations on a form given in the text grammar'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='operation', required=True)
        for name, help_text in [
            ('parse', 'Parse and print a form in canonical order'),
            ('d', 'Exterior derivative'),
            ('star', 'Hodge star'),
            ('defect', 'Contact defect, optionally evaluated at --point'),
            ('tau', 'The 2-form *(eta ^ (d eta)^(k-1))'),
            ('check', 'Contact or confoliation check on a grid'),
        ]:
            sub = subparsers.add_parser(name, help=help_text)
            self._common(sub)
            sub.add_argument('--form', required=True, help='Form text, e.g. "d[z]+x d[y]"')
            if name == 'defect':
                sub.add_argument('--point', help='Evaluation point, e.g. x=0,y=1,z=0')
            if name == 'check':
                sub.add_argument('--mode', choices=['contact', 'confoliation'], default='contact')
                sub.add_argument('--grid', type=int, help='Points per coordinate (default DEFAULT_GRID)')
                sub.add_argument('--tol', type=float, help='Tolerance (default CONTACTFORMS_DEFAULT_TOL)')
                sub.add_argument('--domain', action='append', help='NAME=LO:HI or NAME=VALUE, repeatable')
        sub = subparsers.add_parser('wedge', help='Wedge product of two or more forms')
        self._common(sub)
        sub.add_argument('--forms', nargs='+', required=True)

    def _common(self, sub):
        sub.add_argument('--chart', required=True, help='Comma-separated coordinates, e.g. x,y,z')
        sub.add_argument('--json', action='store_true', help='Print JSON instead of text')

    def handle(self, *args, **options):
        operation = options['operation']
        chart = options['chart']
        try:
            if operation == 'wedge':
                result = operations.wedge_forms(chart, options['forms'])
            elif operation == 'defect':
                result = operations.defect(chart, options['form'], operations.parse_point(options.get('point')))
            elif operation == 'check':
                report = operations.check(
                    chart, options['form'], options['mode'],
                    operations.parse_domain(options.get('domain')), options.get('grid'), options.get('tol'),
                )
                return self._report(report, options['json'])
            else:
                result = getattr(operations, {'d': 'derivative'}.get(operation, operation))(chart, options['form'])
        except ExpressionSyntaxError as e:
            raise CommandError(f"{e}\n{e.pointer()}", returncode=2)
        except ContactFormsError as e:
            raise CommandError(str(e), returncode=2)

        if options['json']:
            self.stdout.write(json.dumps(result, indent=2, sort_keys=True))
        elif 'form' in result:
            self.stdout.write(result['form'])
        else:
            self.stdout.write(result['defect'])
            if 'value' in result:
                self.stdout.write(f"at {result['point']}: {result['value']}")

    def _report(self, report, as_json):
        if as_json:
            self.stdout.write(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        else:
            style = self.style.SUCCESS if report.passed else self.style.ERROR
            self.stdout.write(style(str(report)))
            if report.label:
                self.stdout.write(f"  {report.label}")
            if report.min_defect is not None:
                self.stdout.write(f"  min defect {report.min_defect:.6g} at {report.witness}")
        if not report.passed:
            raise CommandError('Check failed', returncode=1)
