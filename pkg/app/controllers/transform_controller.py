"""
Controller for the point-transformation pipeline.

L -> L' under the map, gauge lift G' = -dF/dx'_k, L~' = L' + D'F, then the
momentum of the now cyclic x'_k and the recovered integral.
"""
from app.constants import ERROR_MISSING_TRANSFORM
from app.controllers.problem_controller import ProblemController
from app.exceptions import InputError
from app.models import Report
from app.services.conserved_service import span_contains
from app.services.cyclic_service import (
    PointTransformation,
    equivalent_lagrangian,
    gauge_lift_check,
    is_cyclic,
    noncyclic_criterion,
    ostrogradsky_momentum,
    substitute_forward,
    transform_lagrangian,
    transformation_generator,
)
from app.utils.decorators import log_execution
from app.utils.logger import capture_warnings, logger


class TransformController(ProblemController):
    command = 'transform'

    def run(self, path: str) -> Report:
        with capture_warnings() as warnings:
            self.load_problem(path)
            if self.problem.transform is None:
                raise InputError(ERROR_MISSING_TRANSFORM, details={'path': path})
            report = self.new_report()
            self.build_transformation()
            self.transform(report)
            self.recover_integral(report)
        report.warnings = list(warnings)
        report.timings = dict(self.timings)
        return report

    @log_execution
    def build_transformation(self) -> PointTransformation:
        block = self.problem.transform
        x_of = tuple(self.expr(block.x_of[name], f'transform.x_of.{name}') for name in self.problem.coordinates)
        self.transformation = PointTransformation(self.expr(block.t_of, 'transform.t_of'), x_of)
        self.gauge = self.expr(block.gauge, 'transform.gauge')
        self.F = self.expr(block.F, 'transform.F')
        self.k = block.cyclic_index
        return self.transformation

    @log_execution
    def transform(self, report: Report) -> None:
        show = self.spec.show
        tr, k = self.transformation, self.k
        primed = transform_lagrangian(self.spec, tr)
        gauge_primed = substitute_forward(tr, self.gauge)
        tilde = equivalent_lagrangian(primed, self.F)
        self.momentum = ostrogradsky_momentum(tilde, k)
        zeta, eta = transformation_generator(tr, k)

        checks = {
            'gauge_lift': gauge_lift_check(self.gauge, self.F, tr, k),
            'noncyclic_criterion': noncyclic_criterion(primed, gauge_primed, k),
            'cyclic': is_cyclic(tilde, k),
            'momentum_shift': ostrogradsky_momentum(primed, k) - gauge_primed == self.momentum,
        }
        report.transform = {
            'cyclic_coordinate': self.problem.coordinates[k],
            'lagrangian_primed': show(primed.lagrangian),
            'gauge_primed': show(gauge_primed),
            'lagrangian_equivalent': show(tilde.lagrangian),
            'momentum': show(self.momentum),
            'generator': {'zeta': show(zeta), 'eta': self.show_all(eta)},
            'checks': checks,
        }
        for name, ok in checks.items():
            logger.info(f"[{'OK' if ok else 'FAIL'}] transform check {name}")

    @log_execution
    def recover_integral(self, report: Report) -> None:
        """Express the stated integral in primed variables and match it against the momentum."""
        text = self.problem.transform.integral
        if text is None:
            return
        integral = substitute_forward(self.transformation, self.expr(text, 'transform.integral'))
        match = span_contains([self.momentum], integral, self.rng)
        report.transform['integral_primed'] = self.spec.show(integral)
        report.transform['integral_match'] = match.to_dict()
        report.transform['checks']['integral_recovered'] = match.contained
