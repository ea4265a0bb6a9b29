import logging

from rest_framework import status
from rest_framework.permissions import AllowAny
from rest_framework.response import Response
from rest_framework.views import APIView

from . import operations
from .exceptions import ContactFormsError, ExpressionSyntaxError, ScenarioError
from .models import ScenarioRun
from .scenario import Scenario, shipped
from .serializers import (
    CheckRequestSerializer,
    DefectRequestSerializer,
    FormRequestSerializer,
    ScenarioRequestSerializer,
    ScenarioRunListSerializer,
    ScenarioRunSerializer,
    VerificationReportSerializer,
    WedgeRequestSerializer,
)

logger = logging.getLogger(__name__)


def error_response(error):
    """400 for engine input errors, with the caret position for syntax errors."""
    payload = {'error': str(error)}
    if isinstance(error, ExpressionSyntaxError):
        payload['position'] = error.position
    return Response(payload, status=status.HTTP_400_BAD_REQUEST)


class FormOperationView(APIView):
    """
    Base for single-form operations.

    Subclasses set ``operation`` to a function of (chart, form text).
    """
    permission_classes = [AllowAny]
    serializer_class = FormRequestSerializer
    operation = None

    def run(self, data):
        return type(self).operation(data['chart'], data['form'])

    def post(self, request):
        serializer = self.serializer_class(data=request.data)
        if not serializer.is_valid():
            return Response({'error': serializer.errors}, status=status.HTTP_400_BAD_REQUEST)
        try:
            return Response(self.run(serializer.validated_data), status=status.HTTP_200_OK)
        except ContactFormsError as e:
            return error_response(e)
        except Exception as e:
            logger.exception('Operation %s failed', type(self).__name__)
            return Response({
                'error': f'Operation failed: {str(e)}'
            }, status=status.HTTP_500_INTERNAL_SERVER_ERROR)


class ParseView(FormOperationView):
    """
    Parse a form and echo it in canonical form.

    POST /api/parse/
    Request body: {"chart": "x,y,z", "form": "d[z]+x d[y]"}
    Response: {"chart": "x,y,z", "degree": 1, "form": "string", "terms": {"y": "x", "z": "1"}}
    """
    operation = operations.parse


class DerivativeView(FormOperationView):
    """
    Exterior derivative.

    POST /api/d/
    Request body: {"chart": "x,y,z", "form": "string"}
    """
    operation = operations.derivative


class StarView(FormOperationView):
    """
    Hodge star with the identity metric and the chart orientation.

    POST /api/star/
    """
    operation = operations.star


class TauView(FormOperationView):
    """
    The 2-form *(eta ^ (d eta)^{k-1}).

    POST /api/tau/
    """
    operation = operations.tau


class WedgeView(FormOperationView):
    """
    Wedge product of two or more forms.

    POST /api/wedge/
    Request body: {"chart": "x,y,z", "forms": ["d[x]", "d[y]"]}
    """
    serializer_class = WedgeRequestSerializer

    def run(self, data):
        return operations.wedge_forms(data['chart'], data['forms'])


class DefectView(FormOperationView):
    """
    Symbolic contact defect, optionally evaluated at a point.

    POST /api/defect/
    Request body: {"chart": "x,y,z", "form": "d[z]+x d[y]", "point": {"x": 0, "y": 0, "z": 0}}
    Response: {"chart": "x,y,z", "defect": "1", "value": 1.0}
    """
    serializer_class = DefectRequestSerializer

    def run(self, data):
        return operations.defect(data['chart'], data['form'], data.get('point'))


class CheckView(FormOperationView):
    """
    Contact or confoliation check on a grid.

    POST /api/check/
    Request body: {"chart": "x,y,z", "form": "string", "mode": "contact", "domain": {"x": [-1, 1]}, "grid": 11}
    Response: VerificationReport
    """
    serializer_class = CheckRequestSerializer

    def run(self, data):
        report = operations.check(
            data['chart'], data['form'], data['mode'], data.get('domain'), data.get('grid'), data.get('tol'),
        )
        return VerificationReportSerializer(report.to_dict()).data


class ScenarioRunView(APIView):
    """
    Run a scenario and optionally store the result.

    POST /api/scenarios/run/
    Request body: {"source": "scenario text"} or {"name": "appendix_b"}, plus optional "save": bool
    Response: {"schema": 1, "scenario": "string", "status": "pass", "exit_code": 0, "reports": [...], "run_id": int}
    """
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = ScenarioRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response({'error': serializer.errors}, status=status.HTTP_400_BAD_REQUEST)
        data = serializer.validated_data
        try:
            if data.get('source'):
                scenario = Scenario.parse(data['source'], data.get('name'))
            else:
                scenario = Scenario.load(shipped(data['name']))
        except ScenarioError as e:
            return error_response(e)

        result = scenario.run()
        payload = result.to_dict()
        if data['save']:
            payload['run_id'] = ScenarioRun.record(scenario, result).id
        if result.exit_code == 2:
            return Response(payload, status=status.HTTP_400_BAD_REQUEST)
        return Response(payload, status=status.HTTP_200_OK)


class ScenarioRunListView(APIView):
    """
    Stored scenario runs, newest first.

    GET /api/scenarios/runs/
    Response: {"runs": [{"id": int, "name": "string", "status": "pass", "exit_code": 0, "summary": {...}, "created_at": "datetime"}]}
    """
    permission_classes = [AllowAny]

    def get(self, request):
        runs = ScenarioRun.objects.all()
        name = request.query_params.get('name')
        if name:
            runs = runs.filter(name=name)
        serializer = ScenarioRunListSerializer(runs, many=True)
        return Response({'runs': serializer.data}, status=status.HTTP_200_OK)


class ScenarioRunDetailView(APIView):
    """
    One stored run with its full report.

    GET /api/scenarios/runs/<id>/
    """
    permission_classes = [AllowAny]

    def get(self, request, pk):
        try:
            run = ScenarioRun.objects.get(pk=pk)
        except ScenarioRun.DoesNotExist:
            return Response({
                'error': 'Scenario run not found'
            }, status=status.HTTP_404_NOT_FOUND)
        return Response(ScenarioRunSerializer(run).data, status=status.HTTP_200_OK)
