from django.contrib import admin

from .models import ScenarioRun


@admin.register(ScenarioRun)
class ScenarioRunAdmin(admin.ModelAdmin):
    list_display = ['name', 'status', 'exit_code', 'created_at']
    list_filter = ['status']
    search_fields = ['name']
    readonly_fields = ['created_at']
