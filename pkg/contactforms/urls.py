from django.urls import path
from .views import (
    ParseView, DerivativeView, WedgeView, StarView, DefectView, TauView, CheckView,
    ScenarioRunView, ScenarioRunListView, ScenarioRunDetailView,
)

urlpatterns = [
    # Single operations
    path('parse/', ParseView.as_view(), name='parse'),
    path('d/', DerivativeView.as_view(), name='derivative'),
    path('wedge/', WedgeView.as_view(), name='wedge'),
    path('star/', StarView.as_view(), name='star'),
    path('defect/', DefectView.as_view(), name='defect'),
    path('tau/', TauView.as_view(), name='tau'),
    path('check/', CheckView.as_view(), name='check'),

    # Scenarios
    path('scenarios/run/', ScenarioRunView.as_view(), name='scenario-run'),
    path('scenarios/runs/', ScenarioRunListView.as_view(), name='scenario-run-list'),
    path('scenarios/runs/<int:pk>/', ScenarioRunDetailView.as_view(), name='scenario-run-detail'),
]
