import json
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from contactforms import conf
from contactforms.exceptions import ScenarioError
from contactforms.models import ScenarioRun
from contactforms.scenario import Scenario, shipped


class Command(BaseCommand):
    help = 'Run a scenario file (or a shipped scenario by name) and write its JSON report'

    def add_arguments(self, parser):
        parser.add_argument('path', help='Scenario file, or the name of a shipped scenario such as appendix_b')
        parser.add_argument('--output', help='Report file (default: REPORT_DIR/<name>.json)')
        parser.add_argument('--save', action='store_true', help='Store the run in the database')
        parser.add_argument('--timings', action='store_true', help='Include elapsed seconds per check')

    def handle(self, *args, **options):
        path = Path(options['path'])
        try:
            scenario = Scenario.load(path if path.suffix else shipped(options['path']))
        except ScenarioError as e:
            raise CommandError(str(e), returncode=2)

        result = scenario.run()
        for report in result.reports:
            style = self.style.SUCCESS if report.passed else self.style.ERROR
            self.stdout.write(style(str(report)))

        output = Path(options['output']) if options['output'] else Path(conf.get('REPORT_DIR')) / f"{result.name}.json"
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(json.dumps(result.to_dict(options['timings']), indent=2, sort_keys=True, ensure_ascii=False) + '\n', encoding='utf-8')
        self.stdout.write(f"Report written to {output}")

        if options['save']:
            run = ScenarioRun.record(scenario, result)
            self.stdout.write(f"✓ Saved as run {run.id}")

        if result.exit_code == 2:
            raise CommandError(result.error, returncode=2)
        if result.exit_code == 1:
            failed = sum(1 for r in result.reports if not r.passed)
            raise CommandError(f"{failed} of {len(result.reports)} checks failed", returncode=1)
        self.stdout.write(self.style.SUCCESS(f"✓ {result.name}: all {len(result.reports)} checks passed"))
