import json
from fractions import Fraction

import pytest

from app.config import config
from app.constants import EXIT_INPUT_ERROR, EXIT_VERIFICATION_FAILURE
from app.exceptions import (
    ConfigurationError,
    DegeneratePointSet,
    InputError,
    ProblemFileError,
    ValidationError,
    VerificationFailure,
)
from app.middleware.error_handler import handle_errors
from app.models import Report
from app.utils.decorators import log_execution, memoize, retry
from app.utils.formatting import format_duration, format_float, format_rational
from app.utils.logger import capture_warnings, logger
from app.utils.parsers import parse_problem_text, read_problem_file
from app.utils.responses import HumanRenderer, MachineRenderer, get_renderer

MINIMAL = """format = 1
coordinates = x
order = 2
lagrangian = (1/2)*(x''^2 - x'^2)
"""


def test_format_rational():
    assert format_rational(Fraction(3)) == "3"
    assert format_rational(Fraction(-3, 4)) == "-3/4"


def test_format_float():
    assert format_float(1.23456e-9) == "1.23e-09"
    assert format_float(float("nan")) == "nan"
    assert format_float(float("inf")) == "inf"


def test_format_duration():
    assert format_duration(0.25) == "250ms"
    assert format_duration(2.414) == "2.41s"
    assert format_duration(65) == "[01:05]"


class TestProblemParser:
    def test_minimal(self):
        problem = parse_problem_text(MINIMAL)
        assert problem.coordinates == ['x']
        assert problem.order == 2
        assert problem.numeric is None
        assert problem.transform is None
        assert problem.ansatz.frequencies is None

    def test_all_sections(self):
        content = MINIMAL + """
[parameters]
m = 3/2

[ansatz]
zeta_degree = 1
inverse_coords = yes
frequencies = 1/2, 1

[numeric]
initial = 1, 0, -1, 0
initial = 0, 1, 0, -1
t_end = 5
step = 1/100
tol_abs = 1e-6

[transform]
t_of = t
x_of.x = x

[expected]
I1 = x' + x'''
"""
        problem = parse_problem_text(content)
        assert problem.parameters == {'m': Fraction(3, 2)}
        assert problem.ansatz.zeta_degree == 1
        assert problem.ansatz.inverse_coords is True
        assert problem.ansatz.frequencies == [Fraction(1, 2), Fraction(1)]
        assert problem.numeric.initial_states == [[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]]
        assert problem.numeric.step == pytest.approx(0.01)
        assert problem.numeric.tol_rel is None
        assert problem.transform.x_of == {'x': 'x'}
        assert problem.expected[0].name == 'I1'
        assert problem.line_of('numeric.t_end') == 17

    def test_frequencies_none(self):
        problem = parse_problem_text(MINIMAL + "[ansatz]\nfrequencies = none\n")
        assert problem.ansatz.frequencies == []

    @pytest.mark.parametrize("content,line", [
        ("coordinates = x\nformat = 1\n", 1),
        ("format = 2\ncoordinates = x\norder = 2\nlagrangian = x\n", 1),
        (MINIMAL + "[bogus]\n", 5),
        (MINIMAL + "order = 3\n", 5),
        (MINIMAL + "[ansatz]\nzeta_degree = two\n", 6),
        (MINIMAL + "[ansatz]\ncolour = red\n", 6),
        (MINIMAL + "no equals sign\n", 5),
        (MINIMAL + "[transform]\nx_of.x = x\n", None),
    ])
    def test_malformed(self, content, line):
        with pytest.raises(ProblemFileError) as excinfo:
            parse_problem_text(content)
        assert excinfo.value.line == line
        assert excinfo.value.exit_code == EXIT_INPUT_ERROR

    def test_missing_key(self):
        with pytest.raises(ProblemFileError):
            parse_problem_text("format = 1\ncoordinates = x\norder = 2\n")

    def test_field_validation(self):
        with pytest.raises(ValidationError):
            parse_problem_text(MINIMAL.replace("order = 2", "order = 0"))
        with pytest.raises(ValidationError):
            parse_problem_text(MINIMAL + "[numeric]\ninitial = 1, 0, -1, 0\nstep = 0\n")

    def test_transform_must_cover_coordinates(self):
        with pytest.raises(ValidationError):
            parse_problem_text(MINIMAL + "[transform]\nt_of = t\nx_of.y = x\n")

    def test_read_missing_file(self, tmp_path):
        path = str(tmp_path / "absent.problem")
        with pytest.raises(ProblemFileError) as excinfo:
            read_problem_file(path)
        assert excinfo.value.path == path

    def test_read_sets_path(self, problem_file):
        path = problem_file(MINIMAL + "[bogus]\n")
        with pytest.raises(ProblemFileError) as excinfo:
            read_problem_file(path)
        assert excinfo.value.details['path'] == path


def sample_report(**overrides):
    values = dict(command='solve', problem='case.problem', seed=0, coordinates=['x'], sign_convention=1)
    values.update(overrides)
    return Report(**values)


class TestRenderers:
    def test_machine_is_json(self):
        report = sample_report(el_equations=["D(x,2) + D(x,4)"])
        document = json.loads(MachineRenderer().render(report.to_dict()))
        assert document['verdict'] == 'pass'
        assert document['el_equations'] == ["D(x,2) + D(x,4)"]
        assert 'timings' not in document

    def test_human_lists_failures(self):
        report = sample_report(span_matches=[{
            'name': 'I9', 'expr': 'x^2', 'contained': False,
            'coefficients': [], 'constant': '0', 'basis': [],
        }])
        text = HumanRenderer().render(report.to_dict())
        assert "I9: NOT in span" in text
        assert "verdict: FAIL" in text
        assert "expected integral I9 not in span" in text

    def test_human_marks_numeric_outcome(self):
        report = sample_report(charges=[
            {'name': 'I1', 'expr': 'D(x,1)', 'offshell': True, 'numeric': False},
            {'name': 'I2', 'expr': 'D(x,2)', 'offshell': True},
        ])
        text = HumanRenderer().render(report.to_dict())
        assert "I1 = D(x,1)    [off-shell ok, numeric EXCEEDS]" in text
        assert "I2 = D(x,2)    [off-shell ok]" in text

    def test_human_drift_and_timings(self):
        report = sample_report(
            drift=[{'name': 'I1', 'state': 0, 'max_abs': 1.5e-9, 'max_rel': 1.5e-9,
                    'initial_value': 1.0, 'within_tolerance': True}],
            timings={'load_problem': 0.01},
        )
        text = HumanRenderer().render(report.to_dict(include_timings=True))
        assert "I1 (state 0): abs 1.50e-09" in text
        assert "load_problem: 10ms" in text

    def test_get_renderer(self):
        assert isinstance(get_renderer('machine'), MachineRenderer)
        with pytest.raises(ValidationError):
            get_renderer('xml')


class TestErrorHandler:
    def test_passes_exit_code_through(self):
        assert handle_errors(lambda: 1)() == 1

    def test_input_error(self, capsys):
        @handle_errors
        def command():
            raise InputError("bad input")

        assert command() == EXIT_INPUT_ERROR
        assert "error: bad input" in capsys.readouterr().err

    def test_verification_failure(self, mocker):
        mock_logger = mocker.patch('app.middleware.error_handler.logger')

        @handle_errors
        def command():
            raise VerificationFailure("residual", details={'residual': 'x'})

        assert command() == EXIT_VERIFICATION_FAILURE
        assert mock_logger.error.call_count == 2

    def test_unexpected_exception(self):
        @handle_errors
        def command():
            raise RuntimeError("boom")

        assert command() == EXIT_VERIFICATION_FAILURE


class TestDecorators:
    def test_retry_then_succeed(self, mocker):
        func = mocker.Mock(side_effect=[DegeneratePointSet(3), 'ok'])
        func.__name__ = 'decide'
        assert retry(max_attempts=3, exceptions=(DegeneratePointSet,))(func)() == 'ok'
        assert func.call_count == 2

    def test_retry_gives_up(self, mocker):
        func = mocker.Mock(side_effect=DegeneratePointSet(3))
        func.__name__ = 'decide'
        with pytest.raises(DegeneratePointSet):
            retry(max_attempts=2, exceptions=(DegeneratePointSet,))(func)()
        assert func.call_count == 2

    def test_log_execution_records_timing(self):
        class Stage:
            timings = {}

            @log_execution
            def run(self):
                return 42

        stage = Stage()
        assert stage.run() == 42
        assert 'run' in stage.timings

    def test_memoize(self, mocker):
        inner = mocker.Mock(return_value=7)
        inner.__name__ = 'inner'
        cached = memoize(inner)
        assert cached(1) == cached(1) == 7
        assert inner.call_count == 1
        cached.cache_clear()
        cached(1)
        assert inner.call_count == 2


def test_capture_warnings():
    with capture_warnings() as messages:
        logger.info("not collected")
        logger.warning("collected")
    logger.warning("after the block")
    assert messages == ["collected"]


class TestConfig:
    def test_override_ignores_none(self):
        seed = config.seed
        config.override(seed=None, tol_abs=1e-5)
        assert config.seed == seed
        assert config.tol_abs == 1e-5

    def test_override_validates(self):
        with pytest.raises(ConfigurationError):
            config.override(max_order=99)
