"""
Numerical witness for conservation laws.

The EL equations are solved for the highest derivative of each coordinate,
giving an explicit first-order system that is integrated with fixed-step
classical RK4. Charges are evaluated along the trajectory and their drift
from the initial value is measured.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.constants import (
    LEADING_DET_THRESHOLD,
    WARNING_HORIZON_ROUNDED,
    WARNING_SHORT_HORIZON,
    WARNING_ZERO_HORIZON,
)
from app.exceptions import (
    DegenerateLeadingCoefficient,
    NonMonomialPowerError,
    NotReducibleError,
    UnboundJetVarError,
    ValidationError,
)
from app.interfaces import Stepper
from app.services.calculus_service import LagrangianSpec, euler_lagrange_all, partial
from app.services.expression import ZERO, Expr, JetVar, TransKind, format_expr
from app.services.linsolve_service import RationalMatrix, rank, solve
from app.utils.logger import logger

_FUNCTIONS = {TransKind.SIN: np.sin, TransKind.COS: np.cos, TransKind.EXP: np.exp}


def _exponent(p: Fraction):
    return p.numerator if p.denominator == 1 else float(p)


class CompiledExpr:
    """
    Expr evaluated with numpy against a state layout.

    Works on a single state vector (scalar t) or on a stack of states
    (array of t, one row per sample).
    """

    def __init__(self, e: Expr, index: Dict[JetVar, int], coords: Optional[Sequence[str]] = None):
        self.source = e
        self.terms = []
        for m, c in e.items():
            jets = []
            for var, p in m.jet_powers:
                if var not in index:
                    raise UnboundJetVarError(_jet_name(var, coords))
                jets.append((index[var], _exponent(p)))
            trans = []
            for f in m.trans:
                weights = []
                for coord, w in f.weights:
                    var = JetVar(coord, 0)
                    if var not in index:
                        raise UnboundJetVarError(_jet_name(var, coords))
                    weights.append((index[var], float(w)))
                trans.append((_FUNCTIONS[f.kind], float(f.frequency), weights))
            self.terms.append((float(c), _exponent(m.t_power) if m.t_power else 0, jets, trans))

    def __call__(self, t, y):
        total = 0.0
        for coeff, t_power, jets, trans in self.terms:
            value = coeff
            if t_power:
                value = value * np.power(t, t_power)
            for idx, p in jets:
                value = value * np.power(y[..., idx], p)
            for func, w, weights in trans:
                argument = w * t
                for idx, weight in weights:
                    argument = argument + weight * y[..., idx]
                value = value * func(argument)
            total = total + value
        return total


def _jet_name(var: JetVar, coords: Optional[Sequence[str]]) -> str:
    name = coords[var.coord] if coords and var.coord < len(coords) else f"x{var.coord}"
    return name + "'" * var.order


@dataclass
class FirstOrderSystem:
    """
    d(state)/dt for state = (x_i, x_i', ..., x_i^(h_i - 1)) per coordinate.

    The highest derivatives solve A v = -R; ``solved`` holds them as exact
    expressions when A is constant or a single 1x1 term, otherwise A and R
    are evaluated and solved numerically on every call.
    """

    spec: LagrangianSpec
    state_layout: List[JetVar]
    highest: List[JetVar]
    leading: List[List[Expr]]
    remainder: List[Expr]
    solved: Optional[List[Expr]] = None
    _compiled: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        index = self.layout_index
        coords = self.spec.coords
        if self.solved is not None:
            self._compiled['solved'] = [CompiledExpr(e, index, coords) for e in self.solved]
        self._compiled['leading'] = [[CompiledExpr(e, index, coords) for e in row] for row in self.leading]
        self._compiled['remainder'] = [CompiledExpr(e, index, coords) for e in self.remainder]
        successor = []
        for var in self.state_layout:
            nxt = JetVar(var.coord, var.order + 1)
            if nxt in index:
                successor.append(('state', index[nxt]))
            else:
                successor.append(('highest', self.highest.index(nxt)))
        self._successor = successor

    @property
    def dim(self) -> int:
        return len(self.state_layout)

    @property
    def layout_index(self) -> Dict[JetVar, int]:
        return {v: i for i, v in enumerate(self.state_layout)}

    @property
    def rhs(self) -> List[Optional[Expr]]:
        """Symbolic right-hand side per state entry; None where it is only known numerically."""
        out = []
        for kind, idx in self._successor:
            if kind == 'state':
                var = self.state_layout[idx]
                out.append(Expr.jet(var.coord, var.order))
            else:
                out.append(self.solved[idx] if self.solved is not None else None)
        return out

    def leading_matrix(self, t: float, y: np.ndarray) -> np.ndarray:
        return np.array([[float(c(t, y)) for c in row] for row in self._compiled['leading']])

    def highest_values(self, t, y: np.ndarray) -> np.ndarray:
        """Values of the highest derivatives; y may be one state or a stack of states."""
        if self.solved is not None:
            values = [np.broadcast_to(c(t, y), np.shape(y)[:-1]) for c in self._compiled['solved']]
            return np.stack(values, axis=-1) if values else np.zeros(np.shape(y)[:-1] + (0,))
        if y.ndim == 2:
            return np.array([self.highest_values(tk, yk) for tk, yk in zip(np.broadcast_to(t, y.shape[:1]), y)])
        A = np.array([[float(c(t, y)) for c in row] for row in self._compiled['leading']])
        R = np.array([float(c(t, y)) for c in self._compiled['remainder']])
        try:
            return np.linalg.solve(A, -R)
        except np.linalg.LinAlgError:
            return np.full(len(self.highest), np.nan)

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        highest = self.highest_values(t, y)
        out = np.empty(self.dim)
        for position, (kind, idx) in enumerate(self._successor):
            out[position] = y[idx] if kind == 'state' else highest[idx]
        return out

    def check_initial_state(self, initial: Sequence[float]) -> None:
        """
        Raises:
            DegenerateLeadingCoefficient: |det A| below threshold at the initial state
        """
        if all(a.is_constant() for row in self.leading for a in row):
            return
        y0 = np.asarray(initial, dtype=float)
        determinant = float(np.linalg.det(self.leading_matrix(0.0, y0)))
        if not np.isfinite(determinant) or abs(determinant) < LEADING_DET_THRESHOLD:
            raise DegenerateLeadingCoefficient(abs(determinant))


def reduce_to_first_order(spec: LagrangianSpec) -> FirstOrderSystem:
    """
    Solve the EL equations for their highest derivatives.

    Raises:
        NotReducibleError: an equation is not linear in the highest derivatives
        DegenerateLeadingCoefficient: the constant leading matrix is singular
    """
    equations = euler_lagrange_all(spec)
    n = spec.n_coords
    orders = [max(e.max_order(i) for e in equations) for i in range(n)]
    if any(h < 1 for h in orders):
        raise NotReducibleError(message="equations of motion do not involve every coordinate's derivatives")
    highest = [JetVar(i, h) for i, h in enumerate(orders)]

    leading = [[partial(e, v) for v in highest] for e in equations]
    remainder = []
    for e, row in zip(equations, leading):
        r = e
        for v, a in zip(highest, row):
            if any(u in highest for u in a.jet_vars()):
                raise NotReducibleError(message=f"equation {format_expr(e, list(spec.coords))} is nonlinear in its highest derivatives")
            r = r - a * Expr.jet(v.coord, v.order)
        if any(u in highest for u in r.jet_vars()):
            raise NotReducibleError(message=f"equation {format_expr(e, list(spec.coords))} is nonlinear in its highest derivatives")
        remainder.append(r)

    layout = [JetVar(i, k) for i in range(n) for k in range(orders[i])]
    solved = _solve_symbolically(leading, remainder)
    system = FirstOrderSystem(spec, layout, highest, leading, remainder, solved)
    logger.info(f"Reduced to first order: dimension {system.dim}, {'exact' if solved is not None else 'numeric'} leading solve")
    return system


def _solve_symbolically(leading: List[List[Expr]], remainder: List[Expr]) -> Optional[List[Expr]]:
    n = len(leading)
    if all(a.is_constant() for row in leading for a in row):
        A = RationalMatrix(n, n, [[a.constant_value() for a in row] for row in leading])
        if rank(A) < n:
            raise DegenerateLeadingCoefficient(0.0)
        inverse_columns = [solve(A, [Fraction(int(i == j)) for i in range(n)]) for j in range(n)]
        solved = []
        for i in range(n):
            value = ZERO
            for j in range(n):
                value = value - remainder[j].scaled(inverse_columns[j][i])
            solved.append(value)
        return solved
    if n == 1 and leading[0][0].is_monomial():
        try:
            return [-(remainder[0] * leading[0][0] ** -1)]
        except NonMonomialPowerError:
            return None
    return None


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    step: float
    completed: bool = True
    message: Optional[str] = None


class RungeKutta4(Stepper):
    """Classical RK4 written as a Butcher tableau."""

    A = np.array([
        [0, 0, 0, 0],
        [0.5, 0, 0, 0],
        [0, 0.5, 0, 0],
        [0, 0, 1, 0]
    ])
    b = np.array([1 / 6, 1 / 3, 1 / 3, 1 / 6])
    c = np.array([0, 0.5, 0.5, 1.0])

    def step(self, f, t, y, h):
        k = np.zeros((4, y.shape[0]))
        for s in range(4):
            stage = y + h * (self.A[s, :s] @ k[:s]) if s else y
            k[s] = f(t + self.c[s] * h, stage)
        return y + h * (self.b @ k)

    def get_name(self) -> str:
        return 'rk4'


def integrate(
    system: FirstOrderSystem,
    initial: Sequence[float],
    t_end: float,
    step: float,
    stepper: Optional[Stepper] = None,
) -> Trajectory:
    """
    Fixed-step integration on [0, t_end] with round(t_end / step) steps.
    A t_end that is not a multiple of step is reached only approximately
    and logs a warning.

    A non-finite state stops the run; the partial trajectory is returned
    with ``completed = False``.
    """
    if step <= 0:
        raise ValidationError('step', f'step must be positive, got {step}')
    y = np.asarray(initial, dtype=float)
    if y.shape != (system.dim,):
        raise ValidationError('initial', f'expected {system.dim} values, got {y.size}')
    system.check_initial_state(y)
    stepper = stepper or RungeKutta4()

    n_steps = int(round(t_end / step))
    if t_end == 0:
        logger.warning(WARNING_ZERO_HORIZON)
    elif n_steps == 0:
        logger.warning(WARNING_SHORT_HORIZON.format(t_end=t_end, step=step))
    elif abs(n_steps * step - t_end) > 1e-9 * max(1.0, t_end):
        logger.warning(WARNING_HORIZON_ROUNDED.format(t_end=t_end, step=step, reached=n_steps * step))
    logger.debug(f"Integrating {system.dim}-dim system with {stepper.get_name()}: {n_steps} steps of {step:g}")
    times = [0.0]
    states = [y.copy()]
    completed, message = True, None
    with np.errstate(all='ignore'):
        for n in range(n_steps):
            t = n * step
            y = stepper.step(system.derivative, t, y, step)
            if not np.all(np.isfinite(y)):
                completed = False
                message = f"non-finite state at t = {t + step:.6g}"
                logger.warning(f"Integration stopped: {message}")
                break
            times.append((n + 1) * step)
            states.append(y.copy())
    return Trajectory(np.array(times), np.array(states), step, completed, message)


@dataclass
class DriftReport:
    max_abs: float
    max_rel: float
    initial_value: float
    finite: bool = True

    def within(self, tol_abs: float, tol_rel: float) -> bool:
        """Both bounds must hold; max_rel equals max_abs while |I(0)| <= 1."""
        return self.finite and self.max_abs <= tol_abs and self.max_rel <= tol_rel

    def to_dict(self) -> dict:
        return {
            'max_abs': float(f"{self.max_abs:.3e}"),
            'max_rel': float(f"{self.max_rel:.3e}"),
            'initial_value': float(f"{self.initial_value:.12g}"),
        }


def evaluate_along(system: FirstOrderSystem, traj: Trajectory, e: Expr) -> np.ndarray:
    """Values of e at every sample; highest derivatives come from the solved right-hand side."""
    index = system.layout_index
    columns = traj.states
    needs_highest = any(v in system.highest for v in e.jet_vars())
    if needs_highest:
        extra = system.highest_values(traj.times, traj.states)
        for j, v in enumerate(system.highest):
            index[v] = traj.states.shape[1] + j
        columns = np.concatenate([traj.states, np.reshape(extra, (len(traj.times), -1))], axis=1)
    compiled = CompiledExpr(e, index, system.spec.coords)
    with np.errstate(all='ignore'):
        values = compiled(traj.times, columns)
    return np.broadcast_to(np.asarray(values, dtype=float), traj.times.shape)


def drift(traj: Trajectory, e: Expr, system: FirstOrderSystem) -> DriftReport:
    """
    max |I(t) - I(0)| over the trajectory, and that over max(1, |I(0)|).

    Raises:
        UnboundJetVarError: e needs a derivative the system does not provide
    """
    values = evaluate_along(system, traj, e)
    initial = float(values[0])
    if not np.all(np.isfinite(values)):
        return DriftReport(float('inf'), float('inf'), initial, finite=False)
    max_abs = float(np.max(np.abs(values - initial)))
    return DriftReport(max_abs, max_abs / max(1.0, abs(initial)), initial)
