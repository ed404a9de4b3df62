"""
Variational symmetries by finite ansatz.

A generator (zeta, eta_i, G) is a variational symmetry of L when

    sum_i sum_k dL/dx_i^(k) * (D^k(eta_i - x_i' zeta) + x_i^(k+1) zeta)
        + dL/dt * zeta + L * D zeta - D G

vanishes identically in the jet variables. The expression is linear in
(zeta, eta, G), so with each of them written as an unknown combination
of basis functions, collecting the coefficient of every monomial gives
a homogeneous linear system whose nullspace is the symmetry algebra
inside the ansatz.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from app.exceptions import SymmetryError, ValidationError, VerificationFailure
from app.models import AnsatzConfig
from app.services.calculus_service import (
    TIME,
    LagrangianSpec,
    euler_lagrange_all,
    partial,
    total_derivative,
)
from app.services.expression import (
    ONE,
    ZERO,
    Expr,
    JetVar,
    Monomial,
    TransKind,
    monomial_order,
)
from app.services.linsolve_service import RationalMatrix, nullspace
from app.utils.logger import logger

ZETA = 'zeta'
ETA = 'eta'
GAUGE = 'gauge'


@dataclass
class SymmetryGenerator:
    """Concrete (zeta, eta, G) with characteristics Q_i = eta_i - x_i' zeta."""

    zeta: Expr
    eta: List[Expr]
    gauge: Expr
    characteristics: List[Expr] = field(default_factory=list)

    def __post_init__(self):
        if not self.characteristics:
            self.characteristics = [
                e - Expr.jet(i, 1) * self.zeta for i, e in enumerate(self.eta)
            ]

    def is_null(self) -> bool:
        return self.zeta.is_zero() and self.gauge.is_zero() and all(e.is_zero() for e in self.eta)

    def scaled(self, factor: Fraction) -> 'SymmetryGenerator':
        return SymmetryGenerator(self.zeta.scaled(factor), [e.scaled(factor) for e in self.eta], self.gauge.scaled(factor))

    def __add__(self, other: 'SymmetryGenerator') -> 'SymmetryGenerator':
        return SymmetryGenerator(
            self.zeta + other.zeta,
            [a + b for a, b in zip(self.eta, other.eta)],
            self.gauge + other.gauge,
        )


@dataclass
class AnsatzSlot:
    """One unknown coefficient: which function it feeds and its basis element."""

    role: str
    coord: Optional[int]
    basis: Expr


@dataclass
class GeneratorAnsatz:
    spec: LagrangianSpec
    zeta_basis: List[Expr]
    eta_basis: List[List[Expr]]
    gauge_basis: List[Expr]
    frequencies: List[Fraction] = field(default_factory=list)

    @property
    def slots(self) -> List[AnsatzSlot]:
        slots = [AnsatzSlot(ZETA, None, b) for b in self.zeta_basis]
        for i, basis in enumerate(self.eta_basis):
            slots.extend(AnsatzSlot(ETA, i, b) for b in basis)
        slots.extend(AnsatzSlot(GAUGE, None, b) for b in self.gauge_basis)
        return slots

    @property
    def unknown_count(self) -> int:
        return len(self.zeta_basis) + sum(len(b) for b in self.eta_basis) + len(self.gauge_basis)

    def instantiate(self, vector: Sequence[Fraction]) -> SymmetryGenerator:
        if len(vector) != self.unknown_count:
            raise SymmetryError(f"vector has {len(vector)} entries, ansatz has {self.unknown_count} unknowns")
        zeta, gauge = ZERO, ZERO
        eta = [ZERO] * self.spec.n_coords
        for slot, value in zip(self.slots, vector):
            if value == 0:
                continue
            piece = slot.basis.scaled(value)
            if slot.role == ZETA:
                zeta = zeta + piece
            elif slot.role == ETA:
                eta[slot.coord] = eta[slot.coord] + piece
            else:
                gauge = gauge + piece
        return SymmetryGenerator(zeta, eta, gauge)


@dataclass
class DeterminingSystem:
    """Homogeneous system, one row per monomial of the expanded identity."""

    unknown_count: int
    rows: List[List[Fraction]]
    monomials: List[Monomial]

    @property
    def matrix(self) -> RationalMatrix:
        return RationalMatrix(len(self.rows), self.unknown_count, self.rows)


def determining_identity(spec: LagrangianSpec, zeta: Expr, eta: Sequence[Expr], gauge: Expr) -> Expr:
    """
    The invariance condition of the action minus D G, as one canonical Expr.

    Zero exactly when (zeta, eta, gauge) is a variational symmetry.
    """
    if len(eta) != spec.n_coords:
        raise SymmetryError(f"eta has {len(eta)} components, expected {spec.n_coords}")
    L = spec.lagrangian
    result = L * total_derivative(zeta) - total_derivative(gauge)
    if not zeta.is_zero():
        result = result + partial(L, TIME) * zeta
    for i in range(spec.n_coords):
        q = eta[i] - Expr.jet(i, 1) * zeta
        for k in range(spec.order + 1):
            if k:
                q = total_derivative(q)
            weight = partial(L, JetVar(i, k))
            if weight.is_zero():
                continue
            result = result + weight * (q + Expr.jet(i, k + 1) * zeta)
    return result


def determining_identity_second_order(spec: LagrangianSpec, zeta: Expr, eta: Sequence[Expr], gauge: Expr) -> Expr:
    """The same identity for N = 2 written with the explicit first and second prolongations."""
    if spec.order != 2:
        raise SymmetryError("explicit prolongation form needs a second-order Lagrangian")
    L = spec.lagrangian
    d_zeta = total_derivative(zeta)
    dd_zeta = total_derivative(d_zeta)
    result = partial(L, TIME) * zeta + L * d_zeta - total_derivative(gauge)
    for i in range(spec.n_coords):
        x1, x2 = Expr.jet(i, 1), Expr.jet(i, 2)
        d_eta = total_derivative(eta[i])
        first = d_eta - x1 * d_zeta
        second = total_derivative(d_eta) - 2 * x2 * d_zeta - x1 * dd_zeta
        result = result + partial(L, JetVar(i, 0)) * eta[i]
        result = result + partial(L, JetVar(i, 1)) * first
        result = result + partial(L, JetVar(i, 2)) * second
    return result


# Basis construction

def _monomials(variables: Sequence[Expr], degree: int) -> List[Expr]:
    """All products of the variables with total degree <= degree, constant first."""
    out = [ONE]
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(range(len(variables)), d):
            product = ONE
            for index in combo:
                product = product * variables[index]
            out.append(product)
    return out


def _trans_factors(frequencies: Sequence[Fraction]) -> List[Expr]:
    factors = [ONE]
    for w in frequencies:
        factors.extend([
            Expr.trans(TransKind.SIN, w),
            Expr.trans(TransKind.COS, w),
            Expr.trans(TransKind.EXP, w),
            Expr.trans(TransKind.EXP, -w),
        ])
    return factors


def _dedupe(basis: Sequence[Expr]) -> List[Expr]:
    seen = set()
    out = []
    for b in basis:
        if b not in seen and not b.is_zero():
            seen.add(b)
            out.append(b)
    return out


def _with_inverses(monomials: List[Expr], n_coords: int) -> List[Expr]:
    inverses = [Expr.jet(j) ** -1 for j in range(n_coords)]
    return monomials + [m * inv for m in monomials for inv in inverses]


def characteristic_frequencies(spec: LagrangianSpec) -> List[Fraction]:
    """
    Rational |Re| and |Im| parts of the characteristic roots of the EL system.

    Only applies when every EL expression is a constant-coefficient linear
    combination of jet variables; otherwise no frequencies are returned.
    Irrational roots are skipped with a warning.
    """
    r = sympy.Symbol('r')
    rows = []
    for expression in euler_lagrange_all(spec):
        row = [sympy.Integer(0)] * spec.n_coords
        for m, c in expression.items():
            if m.t_power != 0 or m.trans or len(m.jet_powers) != 1 or m.jet_powers[0][1] != 1:
                logger.info("EL system is not linear with constant coefficients; no automatic frequencies")
                return []
            var = m.jet_powers[0][0]
            row[var.coord] += sympy.Rational(c.numerator, c.denominator) * r ** var.order
        rows.append(row)

    determinant = sympy.expand(sympy.Matrix(rows).det())
    if determinant == 0:
        logger.warning("Characteristic determinant vanishes identically; no automatic frequencies")
        return []

    found = set()
    for root in sympy.Poly(determinant, r).all_roots():
        for part in (sympy.re(root), sympy.im(root)):
            part = sympy.Abs(part)
            if part == 0:
                continue
            if part.is_Rational:
                found.add(Fraction(int(part.p), int(part.q)))
            else:
                logger.warning(f"Skipping irrational characteristic frequency {part}")
    frequencies = sorted(found)
    logger.info(f"Detected frequencies: {[str(f) for f in frequencies]}")
    return frequencies


def build_ansatz(spec: LagrangianSpec, config: AnsatzConfig) -> GeneratorAnsatz:
    """
    Enumerate basis functions for zeta, eta_i and G.

    zeta: t^p (times coordinate monomials when zeta_depends_on_x)
    eta_i: t^p * coordinate monomial (degree <= eta_x_degree) * trans factor
    G: t^p * jet monomial of order <= N-1 (degree <= gauge_degree) * trans factor,
       never the bare constant

    Raises:
        ValidationError: the ansatz has no unknowns
    """
    frequencies = characteristic_frequencies(spec) if config.frequencies is None else list(config.frequencies)
    trans = _trans_factors(frequencies)
    coords = [Expr.jet(j) for j in range(spec.n_coords)]

    coord_monomials = _monomials(coords, config.eta_x_degree)
    if config.inverse_coords:
        coord_monomials = _dedupe(_with_inverses(coord_monomials, spec.n_coords))

    zeta_factors = coord_monomials if config.zeta_depends_on_x else [ONE]
    zeta_basis = _dedupe([Expr.time(p) * m for p in range(config.zeta_degree + 1) for m in zeta_factors])

    eta_single = _dedupe([
        Expr.time(p) * m * tau
        for p in range(config.eta_t_degree + 1)
        for m in coord_monomials
        for tau in trans
    ])

    jets = [Expr.jet(j, k) for j in range(spec.n_coords) for k in range(spec.order)]
    jet_monomials = _monomials(jets, config.gauge_degree)
    if config.inverse_coords:
        jet_monomials = _dedupe(_with_inverses(jet_monomials, spec.n_coords))
    gauge_basis = [
        b for b in _dedupe([
            Expr.time(p) * m * tau
            for p in range(config.gauge_t_degree + 1)
            for m in jet_monomials
            for tau in trans
        ])
        if b != ONE
    ]

    ansatz = GeneratorAnsatz(
        spec=spec,
        zeta_basis=zeta_basis,
        eta_basis=[list(eta_single) for _ in range(spec.n_coords)],
        gauge_basis=gauge_basis,
        frequencies=frequencies,
    )
    if ansatz.unknown_count == 0:
        raise ValidationError('ansatz', 'ansatz has no unknowns')
    logger.info(
        f"Ansatz: {len(zeta_basis)} zeta, {len(eta_single)}x{spec.n_coords} eta, "
        f"{len(gauge_basis)} gauge unknowns"
    )
    return ansatz


def _column(spec: LagrangianSpec, slot: AnsatzSlot) -> Expr:
    zeros = [ZERO] * spec.n_coords
    if slot.role == ZETA:
        return determining_identity(spec, slot.basis, zeros, ZERO)
    if slot.role == ETA:
        zeros[slot.coord] = slot.basis
        return determining_identity(spec, ZERO, zeros, ZERO)
    return -total_derivative(slot.basis)


def assemble_system(spec: LagrangianSpec, ansatz: GeneratorAnsatz) -> DeterminingSystem:
    """
    Collect the coefficient of every monomial of the expanded identity.

    Column j is the identity evaluated on basis element j alone.
    """
    columns = [_column(spec, slot) for slot in ansatz.slots]
    monomials = set()
    for column in columns:
        monomials.update(column.monomials())
    ordered = sorted(monomials, key=monomial_order)
    rows = [[column.coefficient(m) for column in columns] for m in ordered]
    logger.info(f"Determining system: {len(rows)} equations, {len(columns)} unknowns")
    return DeterminingSystem(unknown_count=len(columns), rows=rows, monomials=ordered)


def extract_generators(ansatz: GeneratorAnsatz, vectors: Sequence[Sequence[Fraction]]) -> List[SymmetryGenerator]:
    """
    Instantiate nullspace vectors and re-verify each one.

    Raises:
        SymmetryError: a vector is identically zero
        VerificationFailure: a generator does not satisfy the identity
    """
    spec = ansatz.spec
    generators = []
    for index, vector in enumerate(vectors):
        if all(v == 0 for v in vector):
            raise SymmetryError(f"vector {index} is zero and cannot be part of a basis")
        generator = ansatz.instantiate(vector)
        residual = determining_identity(spec, generator.zeta, generator.eta, generator.gauge)
        if not residual.is_zero():
            raise VerificationFailure(
                f"generator {index} does not satisfy the determining identity",
                details={'residual': spec.show(residual)}
            )
        if spec.order == 2:
            explicit = determining_identity_second_order(spec, generator.zeta, generator.eta, generator.gauge)
            if not explicit.is_zero():
                raise VerificationFailure(
                    f"generator {index} fails the explicit second-order prolongation check",
                    details={'residual': spec.show(explicit)}
                )
        generators.append(generator)
    logger.info(f"[OK] {len(generators)} generators verified")
    return generators


def find_symmetries(spec: LagrangianSpec, config: AnsatzConfig) -> Tuple[GeneratorAnsatz, DeterminingSystem, List[SymmetryGenerator]]:
    ansatz = build_ansatz(spec, config)
    system = assemble_system(spec, ansatz)
    vectors = nullspace(system.matrix)
    return ansatz, system, extract_generators(ansatz, vectors)
