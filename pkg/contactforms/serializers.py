from rest_framework import serializers

from .models import ScenarioRun


class VerificationReportSerializer(serializers.Serializer):
    """Stable JSON schema of a single check result"""
    check = serializers.CharField()
    status = serializers.CharField()
    passed = serializers.BooleanField()
    params = serializers.DictField(required=False)
    label = serializers.CharField(allow_blank=True, required=False)
    min_defect = serializers.FloatField(allow_null=True, required=False)
    witness = serializers.DictField(allow_null=True, required=False)
    singular_samples = serializers.ListField(required=False)
    singular_count = serializers.IntegerField(required=False)
    residuals = serializers.ListField(child=serializers.FloatField(), required=False)
    max_residual = serializers.FloatField(allow_null=True, required=False)
    ranks = serializers.ListField(required=False)
    thresholds = serializers.DictField(required=False)
    violations = serializers.ListField(required=False)
    details = serializers.DictField(required=False)
    error = serializers.CharField(allow_null=True, required=False)


class SingularLocusSerializer(serializers.Serializer):
    """Sampled zero set of a contact defect"""
    points = serializers.ListField()
    count = serializers.IntegerField()
    extents = serializers.DictField()
    pinned = serializers.DictField()
    steps = serializers.DictField()
    grid = serializers.JSONField()
    tol = serializers.FloatField()


class ScenarioRunSerializer(serializers.ModelSerializer):
    """Serializer for ScenarioRun model with a per-check summary"""
    summary = serializers.SerializerMethodField()

    class Meta:
        model = ScenarioRun
        fields = ['id', 'name', 'status', 'exit_code', 'summary', 'report', 'source', 'created_at']
        read_only_fields = fields

    def get_summary(self, obj):
        return {
            'checks': obj.check_count,
            'failed': obj.failed_checks,
        }


class ScenarioRunListSerializer(ScenarioRunSerializer):
    class Meta(ScenarioRunSerializer.Meta):
        fields = ['id', 'name', 'status', 'exit_code', 'summary', 'created_at']
        read_only_fields = fields


class FormRequestSerializer(serializers.Serializer):
    """A form in the text grammar on a comma-separated chart"""
    chart = serializers.CharField()
    form = serializers.CharField()


class WedgeRequestSerializer(serializers.Serializer):
    chart = serializers.CharField()
    forms = serializers.ListField(child=serializers.CharField(), min_length=2)


class DefectRequestSerializer(FormRequestSerializer):
    point = serializers.DictField(child=serializers.FloatField(), required=False)


class CheckRequestSerializer(FormRequestSerializer):
    mode = serializers.ChoiceField(choices=['contact', 'confoliation'], default='contact')
    domain = serializers.DictField(required=False)
    grid = serializers.IntegerField(min_value=2, required=False)
    tol = serializers.FloatField(min_value=0, required=False)

    def validate_domain(self, value):
        """Values are a number (pinned coordinate) or a [lo, hi] pair."""
        domain = {}
        for name, bounds in value.items():
            if isinstance(bounds, (int, float)):
                domain[name] = float(bounds)
            elif isinstance(bounds, (list, tuple)) and len(bounds) == 2:
                domain[name] = (float(bounds[0]), float(bounds[1]))
            else:
                raise serializers.ValidationError(f"Domain of '{name}' must be a number or [lo, hi].")
        return domain


class ScenarioRequestSerializer(serializers.Serializer):
    """Scenario text, or the name of a shipped scenario"""
    source = serializers.CharField(required=False, allow_blank=False)
    name = serializers.CharField(required=False)
    save = serializers.BooleanField(default=False)

    def validate(self, data):
        if not data.get('source') and not data.get('name'):
            raise serializers.ValidationError('Must include "source" or "name".')
        return data
