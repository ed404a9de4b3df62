"""
Shared plumbing for the pipeline controllers.
"""
import os
import random
from typing import Dict, List, Optional

from app.config import config
from app.exceptions import ExpressionError, ProblemFileError, ValidationError
from app.models import ProblemFile, Report
from app.services.calculus_service import LagrangianSpec
from app.services.expression import Expr
from app.services.expression_parser import parse
from app.services.numeric_service import drift, integrate, reduce_to_first_order
from app.utils.decorators import log_execution
from app.utils.logger import logger
from app.utils.parsers import read_problem_file
from app.validators import validate_initial_state


class ProblemController:
    """
    Loads a problem file and turns its expression fields into Expr values.

    Subclasses implement ``run(path)`` as a sequence of stage methods
    decorated with ``log_execution``; stage timings end up in ``timings``.
    """

    command = 'problem'

    def __init__(self, seed: Optional[int] = None, tol_abs: Optional[float] = None, tol_rel: Optional[float] = None):
        self.seed = config.seed if seed is None else seed
        self.tol_abs_override = tol_abs
        self.tol_rel_override = tol_rel
        self.rng = random.Random(self.seed)
        self.timings: Dict[str, float] = {}
        self.problem: Optional[ProblemFile] = None
        self.spec: Optional[LagrangianSpec] = None

    @log_execution
    def load_problem(self, path: str) -> LagrangianSpec:
        self.problem = read_problem_file(path)
        lagrangian = self.expr(self.problem.lagrangian, 'lagrangian')
        self.spec = LagrangianSpec(
            len(self.problem.coordinates),
            self.problem.order,
            lagrangian,
            tuple(self.problem.coordinates),
        )
        logger.info(f"[OK] Loaded {path}: L = {self.spec.show(lagrangian)}")
        return self.spec

    def expr(self, text: str, key: str, line: Optional[int] = None) -> Expr:
        """
        Parse an expression field of the problem file.

        Raises:
            ProblemFileError: the text does not parse, with the field's line
        """
        try:
            return parse(text, self.problem.coordinates, self.problem.parameters)
        except ExpressionError as e:
            where = line if line is not None else self.problem.line_of(key)
            raise ProblemFileError(f"{key}: {e.message}", line=where, path=self.problem.path) from e

    def tolerances(self):
        """CLI flag, then problem file, then environment."""
        numeric = self.problem.numeric
        tol_abs = self.tol_abs_override or (numeric.tol_abs if numeric else None) or config.tol_abs
        tol_rel = self.tol_rel_override or (numeric.tol_rel if numeric else None) or config.tol_rel
        return tol_abs, tol_rel

    def new_report(self) -> Report:
        return Report(
            command=self.command,
            problem=os.path.basename(self.problem.path),
            seed=self.seed,
            coordinates=list(self.problem.coordinates),
        )

    def show_all(self, expressions: List[Expr]) -> List[str]:
        return [self.spec.show(e) for e in expressions]

    @log_execution
    def measure_drift(self, report: Report, named: List[tuple]) -> Dict[str, bool]:
        """
        Integrate every initial state and record the drift of each (name, Expr).

        Returns:
            name -> whether the drift stayed within tolerance on every state
        """
        numeric = self.problem.numeric
        system = reduce_to_first_order(self.spec)
        tol_abs, tol_rel = self.tolerances()
        passed = {name: True for name, _ in named}
        for number, initial in enumerate(numeric.initial_states, start=1):
            is_valid, error_msg = validate_initial_state(initial, system.dim)
            if not is_valid:
                raise ValidationError('initial', error_msg)
            trajectory = integrate(system, initial, numeric.t_end, numeric.step)
            for name, e in named:
                result = drift(trajectory, e, system)
                within = result.within(tol_abs, tol_rel)
                passed[name] = passed[name] and within
                report.drift.append({
                    'name': name,
                    'state': number,
                    **result.to_dict(),
                    'within_tolerance': within,
                })
                logger.info(
                    f"[{'OK' if within else 'FAIL'}] {name} drift {result.max_abs:.3e} (state {number})"
                )
        return passed
