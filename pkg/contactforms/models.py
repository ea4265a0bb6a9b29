from django.db import models


class ScenarioRun(models.Model):
    """A stored execution of a scenario file and its JSON report."""
    STATUS_CHOICES = [
        ('pass', 'Pass'),
        ('fail', 'Fail'),
        ('error', 'Error'),
    ]

    name = models.CharField(max_length=100, help_text="Scenario name (e.g., 'appendix_b', 'fold_circle')")
    source = models.TextField(blank=True, help_text="Scenario text as it was run")
    status = models.CharField(max_length=10, choices=STATUS_CHOICES, db_index=True)
    exit_code = models.IntegerField(default=0)
    report = models.JSONField(default=dict)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.name} ({self.status})"

    @classmethod
    def record(cls, scenario, result):
        """Persist a ScenarioResult together with the scenario text."""
        return cls.objects.create(
            name=result.name,
            source=scenario.source if scenario is not None else '',
            status=result.status,
            exit_code=result.exit_code,
            report=result.to_dict(),
        )

    @property
    def check_count(self):
        return len(self.report.get('reports', []))

    @property
    def failed_checks(self):
        return [r['check'] for r in self.report.get('reports', []) if r.get('status') != 'pass']
