"""
Noether charges of symmetry generators and their verification.

For a generator with characteristics Q_i the charge is

    I = zeta L - sum_i sum_{k=1..N} sum_{j=1..k} (-1)^j D^(k-j) Q_i * D^(j-1) dL/dx_i^(k) - G

and satisfies D I + sigma * sum_i Q_i E_i(L) = 0 off shell, sigma being a
global sign fixed once on the free particle.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Dict, List, Optional, Sequence, Union

from app.config import config
from app.constants import (
    SAMPLE_MAX_DENOMINATOR,
    SAMPLE_NUMERATOR_RANGE,
    SPAN_EXTRA_POINTS,
    SPAN_MAX_ATTEMPTS,
)
from app.exceptions import DegeneratePointSet, VerificationFailure
from app.services.calculus_service import (
    LagrangianSpec,
    euler_lagrange,
    partial,
    total_derivative,
)
from app.services.expression import ONE, UNIT, ZERO, Expr, JetVar, monomial_order
from app.services.linsolve_service import RationalMatrix, rank, solve
from app.services.symmetry_service import SymmetryGenerator
from app.utils.decorators import memoize, retry
from app.utils.logger import logger


@dataclass
class ConservedQuantity:
    expr: Expr
    generator: Optional[SymmetryGenerator] = None
    checked_offshell: bool = False
    checked_numeric: bool = False


@dataclass
class SpanMatch:
    """Result of a span test: candidate = sum(coefficients[j] * I_j) + constant."""

    contained: bool
    coefficients: List[Fraction] = field(default_factory=list)
    constant: Fraction = Fraction(0)

    def to_dict(self) -> dict:
        return {
            'contained': self.contained,
            'coefficients': [str(c) for c in self.coefficients],
            'constant': str(self.constant),
        }


def general_charge(spec: LagrangianSpec, g: SymmetryGenerator) -> Expr:
    """Charge from the double sum, valid for every order N."""
    result = g.zeta * spec.lagrangian - g.gauge
    for i, q in enumerate(g.characteristics):
        if q.is_zero():
            continue
        q_derivatives = [q]
        for _ in range(spec.order - 1):
            q_derivatives.append(total_derivative(q_derivatives[-1]))
        for k in range(1, spec.order + 1):
            weight = partial(spec.lagrangian, JetVar(i, k))
            if weight.is_zero():
                continue
            weight_derivatives = [weight]
            for _ in range(k - 1):
                weight_derivatives.append(total_derivative(weight_derivatives[-1]))
            for j in range(1, k + 1):
                term = q_derivatives[k - j] * weight_derivatives[j - 1]
                result = result + term if j % 2 == 1 else result - term
    return result


def second_order_bracket(spec: LagrangianSpec, g: SymmetryGenerator) -> Expr:
    """zeta L + sum_i (Q dL/dx' + DQ dL/dx'' - Q D(dL/dx'')) - G, for N = 2."""
    result = g.zeta * spec.lagrangian - g.gauge
    for i, q in enumerate(g.characteristics):
        p1 = partial(spec.lagrangian, JetVar(i, 1))
        p2 = partial(spec.lagrangian, JetVar(i, 2))
        result = result + q * p1 + total_derivative(q) * p2 - q * total_derivative(p2)
    return result


def noether_charge(spec: LagrangianSpec, g: SymmetryGenerator) -> ConservedQuantity:
    """
    Build the charge of a generator.

    Raises:
        VerificationFailure: at N = 2 the bracket and the general formula disagree
    """
    charge = general_charge(spec, g)
    if spec.order == 2:
        bracket = second_order_bracket(spec, g)
        if bracket != charge:
            raise VerificationFailure(
                "second-order bracket disagrees with the general charge formula",
                details={'bracket': spec.show(bracket), 'general': spec.show(charge)}
            )
    return ConservedQuantity(expr=charge, generator=g)


def noether_residual(spec: LagrangianSpec, charge: Expr, characteristics: Sequence[Expr], sigma: int) -> Expr:
    result = total_derivative(charge)
    for i, q in enumerate(characteristics):
        if not q.is_zero():
            result = result + (q * euler_lagrange(spec, i)).scaled(sigma)
    return result


@memoize
def sign_convention() -> int:
    """
    Sign sigma with D I + sigma * sum Q E = 0.

    Fixed on the free particle L = x'^2/2 with the translation eta = 1.
    """
    free = LagrangianSpec(1, 1, Expr.jet(0, 1) ** 2 * Fraction(1, 2), ('x',))
    translation = SymmetryGenerator(ZERO, [ONE], ZERO)
    charge = noether_charge(free, translation)
    for sigma in (1, -1):
        if noether_residual(free, charge.expr, translation.characteristics, sigma).is_zero():
            logger.info(f"Sign convention fixed: sigma = {sigma:+d}")
            return sigma
    raise VerificationFailure("free-particle momentum fixes no sign convention")


def verify_offshell(spec: LagrangianSpec, q: ConservedQuantity, characteristics: Optional[Sequence[Expr]] = None) -> bool:
    """
    Check D I + sigma * sum Q_i E_i(L) == 0 identically; records the result on q.

    Without a generator, ``characteristics`` (default all zero) supply Q.
    """
    if characteristics is None:
        characteristics = q.generator.characteristics if q.generator else [ZERO] * spec.n_coords
    q.checked_offshell = noether_residual(spec, q.expr, characteristics, sign_convention()).is_zero()
    return q.checked_offshell


def charges_are_linear(spec: LagrangianSpec, generators: Sequence[SymmetryGenerator], weights: Sequence[Fraction]) -> bool:
    """The charge of a weighted sum of generators equals the weighted sum of their charges."""
    combined = reduce(lambda a, b: a + b, (g.scaled(w) for g, w in zip(generators, weights)))
    expected = ZERO
    for g, w in zip(generators, weights):
        expected = expected + general_charge(spec, g).scaled(w)
    return general_charge(spec, combined) == expected


# Span membership

def _as_expr(item: Union[Expr, ConservedQuantity]) -> Expr:
    return item.expr if isinstance(item, ConservedQuantity) else item


def _sampling_plan(expressions: Sequence[Expr]):
    """Split jet variables into sampled ones (with root degree) and ones held symbolic."""
    held = set()
    roots: Dict[JetVar, int] = {}
    for e in expressions:
        for m, _ in e.items():
            for factor in m.trans:
                held.update(JetVar(c, 0) for c, _ in factor.weights)
            for var, p in m.jet_powers:
                roots[var] = lcm(roots.get(var, 1), p.denominator)
    sampled = {v: q for v, q in roots.items() if v not in held}
    return dict(sorted(sampled.items())), held


def _sample_value(rng: random.Random, root: int) -> Fraction:
    denominator = rng.randint(1, SAMPLE_MAX_DENOMINATOR)
    bound = SAMPLE_NUMERATOR_RANGE * denominator
    if root > 1:
        return Fraction(rng.randint(1, bound), denominator) ** root
    numerator = 0
    while numerator == 0:
        numerator = rng.randint(-bound, bound)
    return Fraction(numerator, denominator)


@retry(max_attempts=SPAN_MAX_ATTEMPTS, exceptions=(DegeneratePointSet,))
def _decide_span(charges: List[Expr], candidate: Expr, rng: random.Random) -> SpanMatch:
    n = len(charges)
    sampled, _ = _sampling_plan(charges + [candidate])
    points = n + SPAN_EXTRA_POINTS

    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for _ in range(points):
        values = {v: _sample_value(rng, root) for v, root in sampled.items()}
        at_point = [c.substitute(values) for c in charges]
        target = candidate.substitute(values)
        monomials = set(target.monomials())
        for e in at_point:
            monomials.update(e.monomials())
        monomials.add(UNIT)
        for m in sorted(monomials, key=monomial_order):
            constant_column = Fraction(1) if m == UNIT else Fraction(0)
            rows.append([e.coefficient(m) for e in at_point] + [constant_column])
            rhs.append(target.coefficient(m))

    system = RationalMatrix(len(rows), n + 1, rows)
    solution = solve(system, rhs)
    if solution is None:
        return SpanMatch(contained=False)

    coefficients, constant = solution[:n], solution[n]
    residual = candidate
    for a, e in zip(coefficients, charges):
        residual = residual - e.scaled(a)
    if residual.is_constant():
        return SpanMatch(contained=True, coefficients=coefficients, constant=residual.constant_value())
    if rank(system) < n + 1:
        raise DegeneratePointSet(points)
    return SpanMatch(contained=False)


def span_contains(
    charges: Sequence[Union[Expr, ConservedQuantity]],
    candidate: Expr,
    rng: Optional[random.Random] = None,
) -> SpanMatch:
    """
    Decide whether candidate = sum(a_j I_j) + const with rational a_j.

    Jet variables are replaced by seeded random rationals (t stays
    symbolic); the coefficient equations of all points are solved exactly
    and the answer is confirmed structurally on the full expressions.

    Raises:
        DegeneratePointSet: every point set left the answer undecided
    """
    rng = rng or random.Random(config.seed)
    charges = [_as_expr(c) for c in charges]
    if candidate.is_constant():
        return SpanMatch(True, [Fraction(0)] * len(charges), candidate.constant_value())
    return _decide_span(charges, candidate, rng)
