"""
Controller for numeric-only checks: integrate the equations of motion and
measure the drift of the expected integrals, without solving for symmetries.
"""
from app.constants import ERROR_MISSING_NUMERIC
from app.controllers.problem_controller import ProblemController
from app.exceptions import InputError
from app.models import Report
from app.utils.logger import capture_warnings, logger


class VerifyController(ProblemController):
    command = 'verify'

    def run(self, path: str) -> Report:
        with capture_warnings() as warnings:
            self.load_problem(path)
            if self.problem.numeric is None:
                raise InputError(ERROR_MISSING_NUMERIC, details={'path': path})
            report = self.new_report()
            named = [(item.name, self.expr(item.text, item.name, item.line)) for item in self.problem.expected]
            if not named:
                logger.warning("no [expected] integrals to verify")
            self.measure_drift(report, named)
        report.warnings = list(warnings)
        report.timings = dict(self.timings)
        return report
