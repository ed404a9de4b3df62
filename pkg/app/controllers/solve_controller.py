"""
Controller for the symmetry pipeline: EL -> ansatz -> nullspace -> charges -> checks.
"""
from fractions import Fraction
from typing import List

from app.controllers.problem_controller import ProblemController
from app.exceptions import VerificationFailure
from app.models import Report
from app.services.calculus_service import euler_lagrange_all
from app.services.conserved_service import (
    ConservedQuantity,
    charges_are_linear,
    noether_charge,
    sign_convention,
    span_contains,
    verify_offshell,
)
from app.services.symmetry_service import SymmetryGenerator, find_symmetries
from app.utils.decorators import log_execution
from app.utils.logger import capture_warnings, logger


class SolveController(ProblemController):
    command = 'solve'

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.generators: List[SymmetryGenerator] = []
        self.charges: List[ConservedQuantity] = []

    def run(self, path: str) -> Report:
        with capture_warnings() as warnings:
            self.load_problem(path)
            report = self.new_report()
            report.sign_convention = sign_convention()
            report.el_equations = self.show_all(self.derive_equations())
            self.solve_symmetries(report)
            self.build_charges(report)
            self.match_expected(report)
            if self.problem.numeric is not None:
                self.check_numeric(report)
        report.warnings = list(warnings)
        report.timings = dict(self.timings)
        logger.info(f"Solve finished: verdict {'pass' if report.passed else 'fail'}")
        return report

    @log_execution
    def derive_equations(self):
        return euler_lagrange_all(self.spec)

    @log_execution
    def solve_symmetries(self, report: Report) -> None:
        ansatz, system, self.generators = find_symmetries(self.spec, self.problem.ansatz)
        logger.info(
            f"Determining system: {len(system.rows)} equations in {system.unknown_count} unknowns, "
            f"{len(self.generators)} generators"
        )
        for number, g in enumerate(self.generators, start=1):
            report.generators.append({
                'name': f'G{number}',
                'zeta': self.spec.show(g.zeta),
                'eta': self.show_all(g.eta),
                'gauge': self.spec.show(g.gauge),
            })

    @log_execution
    def build_charges(self, report: Report) -> None:
        """
        Raises:
            VerificationFailure: a charge fails the off-shell Noether identity
        """
        for number, g in enumerate(self.generators, start=1):
            charge = noether_charge(self.spec, g)
            if not verify_offshell(self.spec, charge):
                raise VerificationFailure(
                    f"charge I{number} fails the off-shell Noether identity",
                    details={'charge': self.spec.show(charge.expr)}
                )
            self.charges.append(charge)
            report.charges.append({
                'name': f'I{number}',
                'expr': self.spec.show(charge.expr),
                'offshell': charge.checked_offshell,
            })
        weights = [Fraction(number) for number in range(1, len(self.generators) + 1)]
        if len(self.generators) > 1 and not charges_are_linear(self.spec, self.generators, weights):
            raise VerificationFailure("charges are not linear in the generator")

    def check_numeric(self, report: Report) -> None:
        """Drift of every charge; the outcome is kept on the charge and in the report."""
        named = [(c['name'], q.expr) for c, q in zip(report.charges, self.charges)]
        passed = self.measure_drift(report, named)
        for entry, charge in zip(report.charges, self.charges):
            charge.checked_numeric = passed[entry['name']]
            entry['numeric'] = charge.checked_numeric

    @log_execution
    def match_expected(self, report: Report) -> None:
        basis = [c['name'] for c in report.charges]
        for item in self.problem.expected:
            candidate = self.expr(item.text, item.name, item.line)
            match = span_contains(self.charges, candidate, self.rng)
            report.span_matches.append({
                'name': item.name,
                'expr': self.spec.show(candidate),
                **match.to_dict(),
                'basis': basis if match.contained else [],
            })
            logger.info(f"[{'OK' if match.contained else 'FAIL'}] expected {item.name} in span")
