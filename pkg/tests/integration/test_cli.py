import json

import pytest

from app.constants import (
    EXIT_ASSERTION_FAILED,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    WARNING_ZERO_HORIZON,
)
from app.controllers import SolveController
from app.utils.parsers import read_problem_file
from tests.conftest import fixture_path

SHORT_SPINNING = """format = 1
coordinates = x
order = 2
lagrangian = (1/2)*(x''^2 - x'^2)

[numeric]
initial = 1, 0, -1, 0
t_end = {t_end}
step = 0.01

[expected]
I1 = x''^2 - 2*x'*x''' - x'^2
{extra}
"""


def run_machine(app, capsys, *argv):
    code = app([*argv, '--format', 'machine'])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


@pytest.mark.parametrize("name,generators", [
    ("spinning_particle", 5),
    ("spinning_particle_2d", 6),
    ("hd_oscillator", 5),
    ("quartic_example", 7),
    ("cs_particle", 8),
    ("cs_particle_m2_l3", 8),
    ("triple_dot", 9),
])
def test_solve_fixtures(app, capsys, name, generators):
    code, report = run_machine(app, capsys, 'solve', fixture_path(name))
    assert code == EXIT_OK
    assert report['verdict'] == 'pass'
    assert report['problem'] == f'{name}.problem'
    assert report['sign_convention'] == 1
    assert len(report['generators']) == generators
    assert len(report['charges']) == generators
    assert all(c['offshell'] for c in report['charges'])
    assert all(c['numeric'] for c in report['charges'])
    assert report['span_matches']
    assert all(m['contained'] for m in report['span_matches'])
    assert all(d['within_tolerance'] for d in report['drift'])


@pytest.mark.parametrize("name", [
    "spinning_particle",
    "spinning_particle_2d",
    "hd_oscillator",
    "quartic_example",
    "cs_particle",
    "cs_particle_m2_l3",
    "triple_dot",
])
def test_fixtures_use_default_horizon_and_tolerances(name):
    numeric = read_problem_file(fixture_path(name)).numeric
    assert numeric.t_end == 10
    assert numeric.step == pytest.approx(1e-3)
    assert numeric.tol_abs is None
    assert numeric.tol_rel is None


@pytest.mark.parametrize("name", [
    "hd_oscillator",
    "quartic_example",
    "cs_particle",
    "cs_particle_m2_l3",
])
def test_transform_fixtures(app, capsys, name):
    code, report = run_machine(app, capsys, 'transform', fixture_path(name))
    assert code == EXIT_OK
    checks = report['transform']['checks']
    assert checks['cyclic']
    assert checks['gauge_lift']
    assert checks['noncyclic_criterion']
    assert checks['momentum_shift']
    assert checks['integral_recovered']


def test_transform_reports_primed_quantities(app, capsys):
    _, report = run_machine(app, capsys, 'transform', fixture_path('quartic_example'))
    transform = report['transform']
    assert transform['cyclic_coordinate'] == 'x'
    assert transform['generator'] == {'zeta': 'x^(-2)', 'eta': ['-(3/2)*t*x^(-5/2)']}
    assert transform['integral_match']['contained'] is True


def test_missing_transform_block(app, capsys):
    code = app(['transform', fixture_path('spinning_particle')])
    assert code == EXIT_INPUT_ERROR
    assert "no [transform] block" in capsys.readouterr().err


def test_missing_numeric_block(app, problem_file, capsys):
    path = problem_file("format = 1\ncoordinates = x\norder = 2\nlagrangian = (1/2)*x''^2\n")
    assert app(['verify', path]) == EXIT_INPUT_ERROR


def test_missing_file(app, tmp_path):
    assert app(['solve', str(tmp_path / 'absent.problem')]) == EXIT_INPUT_ERROR


def test_bad_expression_reports_line(app, problem_file, capsys):
    path = problem_file("format = 1\ncoordinates = x\norder = 2\nlagrangian = x'' + z\n")
    assert app(['solve', path]) == EXIT_INPUT_ERROR
    assert "lagrangian" in capsys.readouterr().err


def test_unknown_command(app):
    with pytest.raises(SystemExit) as excinfo:
        app(['integrate', fixture_path('spinning_particle')])
    assert excinfo.value.code == 2


def test_wrong_integral_fails_verdict(app, problem_file, capsys):
    path = problem_file(
        "format = 1\ncoordinates = x\norder = 2\nlagrangian = (1/2)*(x''^2 - x'^2)\n"
        "[ansatz]\nfrequencies = auto\n[expected]\nI1 = x' + x'''\nbogus = x^2\n"
    )
    code, report = run_machine(app, capsys, 'solve', path)
    assert code == EXIT_ASSERTION_FAILED
    assert report['verdict'] == 'fail'
    assert report['failures'] == ["expected integral bogus not in span"]


def test_charges_keep_numeric_outcome():
    controller = SolveController()
    report = controller.run(fixture_path('spinning_particle'))
    assert controller.charges
    assert all(q.checked_offshell and q.checked_numeric for q in controller.charges)
    assert [c['numeric'] for c in report.charges] == [True] * len(controller.charges)


def test_solve_is_deterministic(app, capsys):
    first = app(['solve', fixture_path('spinning_particle'), '--format', 'machine', '--seed', '7'])
    out_first = capsys.readouterr().out
    second = app(['solve', fixture_path('spinning_particle'), '--format', 'machine', '--seed', '7'])
    out_second = capsys.readouterr().out
    assert first == second == EXIT_OK
    assert out_first == out_second


def test_verify_zero_horizon(app, problem_file, capsys):
    path = problem_file(SHORT_SPINNING.format(t_end=0, extra=''))
    code, report = run_machine(app, capsys, 'verify', path)
    assert code == EXIT_OK
    assert WARNING_ZERO_HORIZON in report['warnings']
    assert report['drift'][0]['max_abs'] == 0.0


def test_verify_drift(app, problem_file, capsys):
    path = problem_file(SHORT_SPINNING.format(t_end=1, extra='I5 = x\' + x\'\'\''))
    code, report = run_machine(app, capsys, 'verify', path)
    assert code == EXIT_OK
    assert [d['name'] for d in report['drift']] == ['I1', 'I5']
    assert report['generators'] == []


def test_tolerance_flags_override_file(app, problem_file, capsys):
    path = problem_file(SHORT_SPINNING.format(t_end=1, extra=''))
    code, report = run_machine(app, capsys, 'verify', path, '--tol-abs', '1e-30', '--tol-rel', '1e-30')
    assert code == EXIT_ASSERTION_FAILED
    assert report['failures'] == ["drift of I1 exceeds tolerance (state 1)"]


def test_verify_without_expected_warns(app, problem_file, capsys):
    text = SHORT_SPINNING.format(t_end=1, extra='').split('[expected]')[0]
    code, report = run_machine(app, capsys, 'verify', problem_file(text))
    assert code == EXIT_OK
    assert "no [expected] integrals to verify" in report['warnings']


def test_output_file_and_timings(app, tmp_path, problem_file, capsys):
    target = tmp_path / 'report.txt'
    path = problem_file(SHORT_SPINNING.format(t_end=1, extra=''))
    code = app(['verify', path, '--output', str(target), '--timings'])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ''
    text = target.read_text()
    assert "verdict: PASS" in text
    assert "measure_drift:" in text
