"""
Point transformations of second-order Lagrangians and cyclic coordinates.

A transformation is given in the forward direction, x_i = X_i(x', t'),
t = T(x', t'), with both maps written in the primed variables (the primed
frame reuses the coordinate names and indices). Unprimed quantities are
re-expressed in the primed frame by substituting X, its prolongations
and T; no inversion of the map is attempted.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from app.exceptions import (
    InvalidTransformationError,
    NonInvertibleTimeFactor,
    NonMonomialPowerError,
    SubstitutionDomainError,
    ValidationError,
)
from app.services.calculus_service import (
    LagrangianSpec,
    partial,
    total_derivative,
)
from app.services.expression import Expr, JetVar, format_expr
from app.utils.logger import logger


@dataclass(frozen=True)
class PointTransformation:
    """x_i = x_of[i](x', t'), t = t_of(x', t')."""

    t_of: Expr
    x_of: Tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, 'x_of', tuple(self.x_of))
        for e in (self.t_of,) + self.x_of:
            if e.max_order() > 0:
                raise InvalidTransformationError(
                    f"point transformations may not depend on derivatives: {format_expr(e)}"
                )

    @classmethod
    def identity(cls, n_coords: int) -> 'PointTransformation':
        return cls(Expr.time(), tuple(Expr.jet(i) for i in range(n_coords)))

    def time_factor(self) -> Expr:
        """dt/dt' as a single term."""
        factor = total_derivative(self.t_of)
        if not factor.is_monomial():
            raise NonInvertibleTimeFactor(format_expr(factor))
        return factor

    def inverse_time_factor(self) -> Expr:
        factor = self.time_factor()
        try:
            return factor ** -1
        except NonMonomialPowerError as e:
            raise NonInvertibleTimeFactor(format_expr(factor)) from e


def prolongation_map(tr: PointTransformation, max_order: int) -> Dict[JetVar, Expr]:
    """x_i^(k) in primed variables: X^(k+1) = D'(X^(k)) * dt'/dt."""
    inverse = tr.inverse_time_factor() if max_order > 0 else None
    mapping: Dict[JetVar, Expr] = {}
    for i, x in enumerate(tr.x_of):
        current = x
        mapping[JetVar(i, 0)] = current
        for k in range(1, max_order + 1):
            current = total_derivative(current) * inverse
            mapping[JetVar(i, k)] = current
    return mapping


def substitute_forward(tr: PointTransformation, e: Expr) -> Expr:
    """
    Re-express an unprimed expression in primed variables.

    Raises:
        SubstitutionDomainError: a fractional power lands on a sum, or a
            sin/cos/exp argument stops being linear
    """
    mapping = prolongation_map(tr, max(e.max_order(), 0))
    try:
        return e.substitute(mapping, time=tr.t_of)
    except NonMonomialPowerError as err:
        raise SubstitutionDomainError(
            f"cannot re-express {format_expr(e)} in primed variables: {err.message}"
        ) from err


def _require_second_order(spec: LagrangianSpec):
    if spec.order > 2:
        raise InvalidTransformationError(f"point transformations need order <= 2, got {spec.order}")


def transform_lagrangian(spec: LagrangianSpec, tr: PointTransformation) -> LagrangianSpec:
    """
    L'(x', x'', x'''; t') = L(x, x', x''; t) * dt/dt'.

    Raises:
        NonInvertibleTimeFactor: dt/dt' is not a single invertible term
        InvalidTransformationError: order above 2 or wrong map count
    """
    _require_second_order(spec)
    if len(tr.x_of) != spec.n_coords:
        raise InvalidTransformationError(f"expected {spec.n_coords} coordinate maps, got {len(tr.x_of)}")
    primed = substitute_forward(tr, spec.lagrangian) * tr.time_factor()
    logger.info(f"Transformed Lagrangian: {format_expr(primed, list(spec.coords))}")
    return LagrangianSpec(spec.n_coords, 2, primed, spec.coords)


def is_cyclic(spec: LagrangianSpec, k: int) -> bool:
    return partial(spec.lagrangian, JetVar(k, 0)).is_zero()


def ostrogradsky_momentum(spec: LagrangianSpec, k: int) -> Expr:
    """p_k = dL/dx_k' - D(dL/dx_k'')."""
    _require_second_order(spec)
    return partial(spec.lagrangian, JetVar(k, 1)) - total_derivative(partial(spec.lagrangian, JetVar(k, 2)))


def gauge_lift_check(gauge: Expr, F: Expr, tr: PointTransformation, k: int) -> bool:
    """True when -dF/dx'_k equals G re-expressed in primed variables."""
    if F.max_order() > 1:
        raise ValidationError('F', 'F may depend on coordinates and first derivatives only')
    return -partial(F, JetVar(k, 0)) == substitute_forward(tr, gauge)


def equivalent_lagrangian(spec_primed: LagrangianSpec, F: Expr) -> LagrangianSpec:
    """L~' = L' + D'F."""
    if F.max_order() > 1:
        raise ValidationError('F', 'F may depend on coordinates and first derivatives only')
    return spec_primed.with_lagrangian(spec_primed.lagrangian + total_derivative(F))


def noncyclic_criterion(spec_primed: LagrangianSpec, gauge_primed: Expr, k: int) -> bool:
    """dL'/dx'_k == D'G' (x'_k becomes cyclic after adding D'F with G' = -dF/dx'_k)."""
    return partial(spec_primed.lagrangian, JetVar(k, 0)) == total_derivative(gauge_primed)


def lift_gauge(gauge_primed: Expr, k: int) -> Optional[Expr]:
    """
    Naive F with -dF/dx'_k = G', integrating term by term in x'_k.

    Returns:
        F, or None when a term has no elementary antiderivative in this class
    """
    var = JetVar(k, 0)
    terms = []
    for m, c in gauge_primed.items():
        if any(coord == k for f in m.trans for coord, _ in f.weights):
            logger.warning("lift_gauge: coordinate-dependent transcendental term, giving up")
            return None
        powers = dict(m.jet_powers)
        p = powers.get(var, Fraction(0))
        if p == -1:
            logger.warning("lift_gauge: logarithmic antiderivative required, giving up")
            return None
        powers[var] = p + 1
        jets = tuple(sorted((v, e) for v, e in powers.items() if e != 0))
        terms.append((-c / (p + 1), m._replace(jet_powers=jets)))
    return Expr.from_terms(terms)


def transformation_generator(tr: PointTransformation, k: int) -> Tuple[Expr, List[Expr]]:
    """(zeta, eta) = (dT/dx'_k, dX_i/dx'_k): the shift of x'_k seen in the original frame."""
    var = JetVar(k, 0)
    return partial(tr.t_of, var), [partial(x, var) for x in tr.x_of]
