"""
Jet-space calculus: partial derivatives, the total time derivative and
the higher-order Euler-Lagrange operator.

All jet variables are independent symbols. The total derivative

    D e = de/dt + sum_i sum_k x_i^(k+1) * de/dx_i^(k)

raises each jet order by at most one and refuses to go past the
configured order cap.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from app.config import config
from app.exceptions import OrderCapExceeded, ValidationError
from app.services.expression import (
    Expr,
    JetVar,
    Monomial,
    TransFactor,
    TransKind,
    format_expr,
)
from app.utils.decorators import memoize

TIME = 'TIME'

Variable = Union[JetVar, str]


@dataclass(frozen=True)
class LagrangianSpec:
    """
    A Lagrangian L(t, x, x', ..., x^(N)) over ``n_coords`` coordinates.

    Raises:
        ValidationError: order < 1, or L uses a derivative above ``order``
            or an undeclared coordinate
    """

    n_coords: int
    order: int
    lagrangian: Expr
    coords: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n_coords < 1:
            raise ValidationError('coordinates', 'at least one coordinate is required')
        if self.order < 1:
            raise ValidationError('order', f'order must be >= 1, got {self.order}')
        for var in self.lagrangian.jet_vars():
            if var.coord >= self.n_coords:
                raise ValidationError('lagrangian', f'coordinate index {var.coord} is not declared')
            if var.order > self.order:
                raise ValidationError(
                    'lagrangian',
                    f'uses derivative order {var.order} above declared order {self.order}'
                )
        if not self.coords:
            object.__setattr__(self, 'coords', tuple(f'x{i}' for i in range(self.n_coords)))

    @property
    def L(self) -> Expr:
        return self.lagrangian

    def with_lagrangian(self, lagrangian: Expr) -> 'LagrangianSpec':
        return LagrangianSpec(self.n_coords, self.order, lagrangian, self.coords)

    def show(self, e: Expr) -> str:
        return format_expr(e, list(self.coords))


def _rate(factor: TransFactor, v: Variable) -> Fraction:
    if v == TIME:
        return factor.frequency
    if v.order != 0:
        return Fraction(0)
    return dict(factor.weights).get(v.coord, Fraction(0))


def _partial_monomial(m: Monomial, c: Fraction, v: Variable) -> List[Tuple[Fraction, Monomial]]:
    out = []
    if v == TIME:
        if m.t_power != 0:
            out.append((c * m.t_power, m._replace(t_power=m.t_power - 1)))
    else:
        for index, (var, p) in enumerate(m.jet_powers):
            if var != v:
                continue
            rest = m.jet_powers[:index] + m.jet_powers[index + 1:]
            if p != 1:
                rest = m.jet_powers[:index] + ((var, p - 1),) + m.jet_powers[index + 1:]
            out.append((c * p, m._replace(jet_powers=rest)))

    for index, factor in enumerate(m.trans):
        rate = _rate(factor, v)
        if rate == 0:
            continue
        if factor.kind is TransKind.EXP:
            out.append((c * rate, m))
            continue
        if factor.kind is TransKind.SIN:
            swapped, sign = TransFactor(TransKind.COS, factor.frequency, factor.weights), 1
        else:
            swapped, sign = TransFactor(TransKind.SIN, factor.frequency, factor.weights), -1
        trans = m.trans[:index] + (swapped,) + m.trans[index + 1:]
        out.append((c * rate * sign, m._replace(trans=trans)))
    return out


def partial(e: Expr, v: Variable) -> Expr:
    """
    Exact partial derivative with respect to a jet variable or TIME.

    TIME differentiates explicit powers of t and the t-part of sin/cos/exp
    arguments; coordinate arguments respond to order-0 jet variables.
    """
    terms = []
    for m, c in e.items():
        terms.extend(_partial_monomial(m, c, v))
    return Expr.from_terms(terms)


def total_derivative(e: Expr, max_order: Optional[int] = None) -> Expr:
    """
    D_t e = de/dt + sum over jet variables of x^(k+1) * de/dx^(k).

    Raises:
        OrderCapExceeded: a jet variable would pass the order cap
    """
    cap = config.max_order if max_order is None else max_order
    result = partial(e, TIME)
    for var in e.jet_vars():
        if var.order + 1 > cap:
            raise OrderCapExceeded(var.order + 1, cap)
        result = result + Expr.jet(var.coord, var.order + 1) * partial(e, var)
    return result


def total_derivative_n(e: Expr, times: int, max_order: Optional[int] = None) -> Expr:
    for _ in range(times):
        e = total_derivative(e, max_order)
    return e


def euler_lagrange(spec: LagrangianSpec, i: int) -> Expr:
    """
    E_i(L) = sum_k (-1)^k D^k dL/dx_i^(k), k = 0..N.

    Raises:
        ValidationError: i is not a declared coordinate
        OrderCapExceeded: 2N exceeds the order cap
    """
    return _euler_lagrange(spec, i, config.max_order)


@memoize
def _euler_lagrange(spec: LagrangianSpec, i: int, max_order: int) -> Expr:
    if not 0 <= i < spec.n_coords:
        raise ValidationError('coordinate', f'index {i} outside 0..{spec.n_coords - 1}')
    result = Expr()
    for k in range(spec.order + 1):
        term = total_derivative_n(partial(spec.lagrangian, JetVar(i, k)), k, max_order)
        result = result + (term if k % 2 == 0 else -term)
    return result


euler_lagrange.cache_clear = _euler_lagrange.cache_clear


def euler_lagrange_all(spec: LagrangianSpec) -> List[Expr]:
    return [euler_lagrange(spec, i) for i in range(spec.n_coords)]
