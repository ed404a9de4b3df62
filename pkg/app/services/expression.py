"""
Canonical symbolic expressions over time and jet variables.

An Expr is a finite sum of terms, each term being

    coeff * t^p * prod(x_i^(k) ^ e) * [sin|cos](arg) * exp(arg)

with rational coefficient and exponents. Trigonometric and exponential
arguments are linear forms w*t + sum(c_j * x_j) over order-0 coordinates.
Products of sin/cos pairs are rewritten product-to-sum and exponentials
merge by adding arguments, so every canonical term carries at most one
trigonometric and one exponential factor. Structural equality of two
canonical Exprs is mathematical equality within this class.
"""

import math
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple, Union

from sympy import integer_nthroot

from app.exceptions import (
    DomainError,
    NonMonomialPowerError,
    NonRationalExponentError,
    SubstitutionDomainError,
    UnboundJetVarError,
)

Rational = Fraction


class JetVar(NamedTuple):
    """Coordinate index plus derivative order: x_coord^(order)."""

    coord: int
    order: int = 0

    def raised(self, steps: int = 1) -> 'JetVar':
        return JetVar(self.coord, self.order + steps)


class TransKind(str, Enum):
    SIN = 'sin'
    COS = 'cos'
    EXP = 'exp'


_KIND_RANK = {TransKind.SIN: 0, TransKind.COS: 1, TransKind.EXP: 2}

Weights = Tuple[Tuple[int, Fraction], ...]


class TransFactor(NamedTuple):
    """sin/cos/exp of the linear form frequency*t + sum(weight * x_coord)."""

    kind: TransKind
    frequency: Fraction
    weights: Weights = ()

    @property
    def is_trig(self) -> bool:
        return self.kind is not TransKind.EXP


class Monomial(NamedTuple):
    t_power: Fraction
    jet_powers: Tuple[Tuple[JetVar, Fraction], ...]
    trans: Tuple[TransFactor, ...]

    @property
    def degree(self) -> Fraction:
        return sum((p for _, p in self.jet_powers), Fraction(0))


UNIT = Monomial(Fraction(0), (), ())

Scalar = Union[int, Fraction]


def monomial_order(m: Monomial) -> tuple:
    """Total order on monomials: jet degree descending, then coordinates, t power, trans."""
    return (
        -m.degree,
        tuple((v.coord, v.order, -p) for v, p in m.jet_powers),
        m.t_power,
        tuple((_KIND_RANK[f.kind], f.frequency, f.weights) for f in m.trans),
    )


def to_rational(value) -> Fraction:
    """Coerce int/Fraction exponents; anything else is not a rational literal."""
    if isinstance(value, bool):
        raise NonRationalExponentError(str(value))
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    raise NonRationalExponentError(str(value))


def rational_power(value: Fraction, exponent: Fraction) -> Fraction:
    """
    Exact value**exponent for rationals.

    Raises:
        DomainError: zero to a negative power, even root of a negative
        NonMonomialPowerError: the root is irrational
    """
    if value == 0:
        if exponent < 0:
            raise DomainError("Division by zero: 0 raised to a negative power")
        return Fraction(0) if exponent > 0 else Fraction(1)
    if exponent.denominator == 1:
        return value ** exponent.numerator

    q = exponent.denominator
    sign = 1
    if value < 0:
        if q % 2 == 0:
            raise DomainError(f"Even root of negative value {value}")
        sign = -1
    num_root, num_exact = integer_nthroot(abs(value.numerator), q)
    den_root, den_exact = integer_nthroot(value.denominator, q)
    if not (num_exact and den_exact):
        raise NonMonomialPowerError(exponent, f"{value} has no rational root")
    return (sign * Fraction(int(num_root), int(den_root))) ** exponent.numerator


# Trigonometric / exponential argument algebra

def _combine_weights(first: Weights, second: Weights, sign: int) -> Weights:
    merged: Dict[int, Fraction] = dict(first)
    for coord, weight in second:
        merged[coord] = merged.get(coord, Fraction(0)) + sign * weight
    return tuple(sorted((c, w) for c, w in merged.items() if w != 0))


def _negated(weights: Weights) -> Weights:
    return tuple((c, -w) for c, w in weights)


def _leading_negative(frequency: Fraction, weights: Weights) -> bool:
    if frequency != 0:
        return frequency < 0
    return bool(weights) and weights[0][1] < 0


def normalize_trans(kind: TransKind, frequency: Fraction, weights: Weights) -> Tuple[Fraction, Optional[TransFactor]]:
    """
    Canonical (sign, factor) for kind(frequency*t + weights.x).

    A zero argument collapses the factor: sin -> 0, cos/exp -> 1.
    """
    if frequency == 0 and not weights:
        return (Fraction(0), None) if kind is TransKind.SIN else (Fraction(1), None)
    if kind is not TransKind.EXP and _leading_negative(frequency, weights):
        frequency, weights = -frequency, _negated(weights)
        sign = Fraction(-1) if kind is TransKind.SIN else Fraction(1)
        return sign, TransFactor(kind, frequency, weights)
    return Fraction(1), TransFactor(kind, frequency, weights)


def _shifted(a: TransFactor, b: TransFactor, sign: int, kind: TransKind) -> Tuple[Fraction, Optional[TransFactor]]:
    return normalize_trans(kind, a.frequency + sign * b.frequency, _combine_weights(a.weights, b.weights, sign))


def _product_to_sum(a: TransFactor, b: TransFactor) -> List[Tuple[Fraction, Optional[TransFactor]]]:
    half = Fraction(1, 2)
    if a.kind is TransKind.SIN and b.kind is TransKind.SIN:
        parts = [(half, _shifted(a, b, -1, TransKind.COS)), (-half, _shifted(a, b, 1, TransKind.COS))]
    elif a.kind is TransKind.COS and b.kind is TransKind.COS:
        parts = [(half, _shifted(a, b, -1, TransKind.COS)), (half, _shifted(a, b, 1, TransKind.COS))]
    elif a.kind is TransKind.SIN:
        parts = [(half, _shifted(a, b, 1, TransKind.SIN)), (half, _shifted(a, b, -1, TransKind.SIN))]
    else:
        parts = [(half, _shifted(a, b, 1, TransKind.SIN)), (-half, _shifted(a, b, -1, TransKind.SIN))]
    return [(c * s, f) for c, (s, f) in parts if s != 0]


def _split_trans(trans: Tuple[TransFactor, ...]) -> Tuple[Optional[TransFactor], Optional[TransFactor]]:
    trig = exp = None
    for factor in trans:
        if factor.is_trig:
            trig = factor
        else:
            exp = factor
    return trig, exp


def _pack(trig: Optional[TransFactor], exp: Optional[TransFactor]) -> Tuple[TransFactor, ...]:
    return tuple(f for f in (trig, exp) if f is not None)


def _multiply_trans(a: Tuple[TransFactor, ...], b: Tuple[TransFactor, ...]) -> List[Tuple[Fraction, Tuple[TransFactor, ...]]]:
    if not a:
        return [(Fraction(1), b)]
    if not b:
        return [(Fraction(1), a)]
    trig_a, exp_a = _split_trans(a)
    trig_b, exp_b = _split_trans(b)

    exp = exp_a or exp_b
    if exp_a and exp_b:
        _, exp = normalize_trans(
            TransKind.EXP,
            exp_a.frequency + exp_b.frequency,
            _combine_weights(exp_a.weights, exp_b.weights, 1),
        )

    if trig_a and trig_b:
        return [(c, _pack(trig, exp)) for c, trig in _product_to_sum(trig_a, trig_b)]
    return [(Fraction(1), _pack(trig_a or trig_b, exp))]


def _merge_powers(a, b):
    if not a:
        return b
    if not b:
        return a
    merged: Dict[JetVar, Fraction] = dict(a)
    for var, power in b:
        merged[var] = merged.get(var, Fraction(0)) + power
    return tuple(sorted((v, p) for v, p in merged.items() if p != 0))


def multiply_monomials(a: Monomial, b: Monomial) -> List[Tuple[Fraction, Monomial]]:
    t_power = a.t_power + b.t_power
    jets = _merge_powers(a.jet_powers, b.jet_powers)
    return [(c, Monomial(t_power, jets, trans)) for c, trans in _multiply_trans(a.trans, b.trans)]


class Expr:
    """Immutable canonical expression; see module docstring."""

    __slots__ = ('_terms', '_hash')

    def __init__(self, terms: Optional[Mapping[Monomial, Fraction]] = None):
        self._terms: Dict[Monomial, Fraction] = {
            m: Fraction(c) for m, c in (terms or {}).items() if c != 0
        }
        self._hash = None

    # Constructors

    @classmethod
    def constant(cls, value: Scalar) -> 'Expr':
        return cls({UNIT: Fraction(value)})

    @classmethod
    def time(cls, power: Scalar = 1) -> 'Expr':
        return cls({Monomial(Fraction(power), (), ()): Fraction(1)})

    @classmethod
    def jet(cls, coord: int, order: int = 0) -> 'Expr':
        return cls({Monomial(Fraction(0), ((JetVar(coord, order), Fraction(1)),), ()): Fraction(1)})

    @classmethod
    def trans(cls, kind: TransKind, frequency: Scalar, weights: Iterable[Tuple[int, Scalar]] = ()) -> 'Expr':
        weights = tuple(sorted((c, Fraction(w)) for c, w in weights if w != 0))
        sign, factor = normalize_trans(TransKind(kind), Fraction(frequency), weights)
        if sign == 0:
            return ZERO
        return cls({Monomial(Fraction(0), (), () if factor is None else (factor,)): sign})

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[Fraction, Monomial]]) -> 'Expr':
        """Sum (coeff, monomial) pairs, merging duplicates."""
        acc: Dict[Monomial, Fraction] = {}
        for coeff, monomial in terms:
            acc[monomial] = acc.get(monomial, Fraction(0)) + coeff
        return cls(acc)

    # Inspection

    def items(self) -> Iterator[Tuple[Monomial, Fraction]]:
        """(monomial, coeff) pairs in canonical order."""
        for m in sorted(self._terms, key=monomial_order):
            yield m, self._terms[m]

    def coefficient(self, monomial: Monomial) -> Fraction:
        return self._terms.get(monomial, Fraction(0))

    def monomials(self) -> List[Monomial]:
        return sorted(self._terms, key=monomial_order)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m == UNIT for m in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get(UNIT, Fraction(0))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def jet_vars(self) -> List[JetVar]:
        found = set()
        for m in self._terms:
            found.update(v for v, _ in m.jet_powers)
            for factor in m.trans:
                found.update(JetVar(c, 0) for c, _ in factor.weights)
        return sorted(found)

    def max_order(self, coord: Optional[int] = None) -> int:
        """Highest derivative order present (optionally for one coordinate); -1 if none."""
        orders = [v.order for v in self.jet_vars() if coord is None or v.coord == coord]
        return max(orders, default=-1)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    # Arithmetic

    def __add__(self, other) -> 'Expr':
        other = _as_expr(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, Fraction(0)) + c
        return Expr(acc)

    __radd__ = __add__

    def __neg__(self) -> 'Expr':
        return Expr({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> 'Expr':
        other = _as_expr(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> 'Expr':
        other = _as_expr(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> 'Expr':
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scaled(other)
        other = _as_expr(other)
        if other is NotImplemented:
            return NotImplemented
        acc: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                for c, m in multiply_monomials(m1, m2):
                    acc[m] = acc.get(m, Fraction(0)) + c * c1 * c2
        return Expr(acc)

    __rmul__ = __mul__

    def scaled(self, factor: Scalar) -> 'Expr':
        factor = Fraction(factor)
        if factor == 0:
            return ZERO
        return Expr({m: c * factor for m, c in self._terms.items()})

    def __truediv__(self, other) -> 'Expr':
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise DomainError("Division by zero")
            return self.scaled(Fraction(1) / Fraction(other))
        other = _as_expr(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other ** -1

    def __pow__(self, exponent) -> 'Expr':
        exponent = to_rational(exponent)
        if exponent == 0:
            return ONE
        positive_integer = exponent.denominator == 1 and exponent > 0
        if positive_integer and (len(self._terms) > 1 or self._has_trig()):
            return self._integer_power(exponent.numerator)
        if not self._terms:
            if exponent > 0:
                return ZERO
            raise DomainError("Division by zero: 0 raised to a negative power")
        if len(self._terms) != 1:
            raise NonMonomialPowerError(exponent)
        (m, c), = self._terms.items()
        if any(f.is_trig for f in m.trans):
            raise NonMonomialPowerError(exponent, "trigonometric factor has no such power")
        return Expr({
            Monomial(
                m.t_power * exponent,
                tuple((v, p * exponent) for v, p in m.jet_powers),
                tuple(
                    TransFactor(f.kind, f.frequency * exponent, tuple((k, w * exponent) for k, w in f.weights))
                    for f in m.trans
                ),
            ): rational_power(c, exponent)
        })

    def _has_trig(self) -> bool:
        return any(f.is_trig for m in self._terms for f in m.trans)

    def _integer_power(self, n: int) -> 'Expr':
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # Equality

    def __eq__(self, other) -> bool:
        other = _as_expr(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Expr('{format_expr(self)}')"

    def __str__(self) -> str:
        return format_expr(self)

    # Substitution and evaluation

    def substitute(
        self,
        jets: Optional[Mapping[JetVar, Union['Expr', Scalar]]] = None,
        time: Optional[Union['Expr', Scalar]] = None,
    ) -> 'Expr':
        """
        Replace jet variables and/or t by expressions (or rationals).

        Variables missing from ``jets`` stay as they are; ``time=None`` keeps t.

        Raises:
            SubstitutionDomainError: a sin/cos/exp argument stops being a linear form
            NonMonomialPowerError: a fractional power lands on a sum
        """
        jets = {v: _as_expr(e) for v, e in (jets or {}).items()}
        time_expr = _as_expr(time) if time is not None else None
        result: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            piece = Expr({Monomial(Fraction(0), (), ()): c})
            kept_jets = []
            for var, power in m.jet_powers:
                if var in jets:
                    piece = piece * jets[var] ** power
                else:
                    kept_jets.append((var, power))
            if time_expr is not None and m.t_power != 0:
                piece = piece * time_expr ** m.t_power
                t_power = Fraction(0)
            else:
                t_power = m.t_power
            for factor in m.trans:
                piece = piece * _substitute_trans(factor, jets, time_expr)
            piece = piece * Expr({Monomial(t_power, tuple(kept_jets), ()): Fraction(1)})
            for pm, pc in piece._terms.items():
                result[pm] = result.get(pm, Fraction(0)) + pc
        return Expr(result)

    def eval_numeric(self, t: float, jet: Mapping[JetVar, float]) -> float:
        return eval_numeric(self, t, jet)


def _as_expr(value):
    if isinstance(value, Expr):
        return value
    if isinstance(value, bool):
        return NotImplemented
    if isinstance(value, (int, Fraction)):
        return Expr.constant(value)
    return NotImplemented


def _substitute_trans(factor: TransFactor, jets: Mapping[JetVar, Expr], time_expr: Optional[Expr]) -> Expr:
    touched = time_expr is not None and factor.frequency != 0
    touched = touched or any(JetVar(c, 0) in jets for c, _ in factor.weights)
    if not touched:
        return Expr({Monomial(Fraction(0), (), (factor,)): Fraction(1)})

    argument = (time_expr if time_expr is not None else Expr.time()).scaled(factor.frequency)
    for coord, weight in factor.weights:
        argument = argument + jets.get(JetVar(coord, 0), Expr.jet(coord)).scaled(weight)
    frequency, weights = linear_form(argument, factor.kind.value)
    return Expr.trans(factor.kind, frequency, weights)


def linear_form(argument: Expr, function: str) -> Tuple[Fraction, Weights]:
    """
    Split w*t + sum(c_j x_j) into (w, ((j, c_j), ...)).

    Raises:
        SubstitutionDomainError: the argument is not such a linear form
    """
    frequency = Fraction(0)
    weights: Dict[int, Fraction] = {}
    for m, c in argument.items():
        if m.trans:
            raise SubstitutionDomainError(f"nested transcendental argument in {function}")
        if m.t_power == 1 and not m.jet_powers:
            frequency += c
        elif m.t_power == 0 and len(m.jet_powers) == 1 and m.jet_powers[0][1] == 1 and m.jet_powers[0][0].order == 0:
            coord = m.jet_powers[0][0].coord
            weights[coord] = weights.get(coord, Fraction(0)) + c
        else:
            raise SubstitutionDomainError(
                f"argument of {function} is not linear in t and coordinates: {format_expr(argument)}"
            )
    return frequency, tuple(sorted((k, w) for k, w in weights.items() if w != 0))


ZERO = Expr()
ONE = Expr.constant(1)
T = Expr.time()


# Module-level arithmetic API

def add(a: Expr, b: Expr) -> Expr:
    return a + b


def mul(a: Expr, b: Expr) -> Expr:
    return a * b


def power(a: Expr, exponent: Scalar) -> Expr:
    return a ** exponent


def neg(a: Expr) -> Expr:
    return -a


def _real_power(base: float, exponent: Fraction, label: str) -> float:
    if exponent.denominator == 1:
        if base == 0 and exponent < 0:
            raise DomainError(f"Division by zero: {label} = 0 to power {exponent}")
        return base ** exponent.numerator
    if base < 0 or (base == 0 and exponent < 0):
        raise DomainError(f"{label} = {base} to fractional power {exponent}")
    return base ** float(exponent)


def eval_numeric(e: Expr, t: float, jet: Mapping[JetVar, float]) -> float:
    """
    IEEE double evaluation at time t and jet values.

    Raises:
        UnboundJetVarError: a jet variable of e has no value
        DomainError: negative base to a fractional power, zero to a negative power
    """
    total = 0.0
    for m, c in e.items():
        value = float(c)
        if m.t_power != 0:
            value *= _real_power(t, m.t_power, 't')
        for var, p in m.jet_powers:
            if var not in jet:
                raise UnboundJetVarError(f"x{var.coord}^({var.order})")
            value *= _real_power(jet[var], p, f"x{var.coord}^({var.order})")
        for factor in m.trans:
            argument = float(factor.frequency) * t
            for coord, weight in factor.weights:
                var = JetVar(coord, 0)
                if var not in jet:
                    raise UnboundJetVarError(f"x{coord}")
                argument += float(weight) * jet[var]
            if factor.kind is TransKind.SIN:
                value *= math.sin(argument)
            elif factor.kind is TransKind.COS:
                value *= math.cos(argument)
            else:
                value *= math.exp(argument)
        total += value
    return total


# Printer

def _format_rational(r: Fraction) -> str:
    if r.denominator == 1:
        return str(r.numerator)
    return f"({r.numerator}/{r.denominator})"


def _format_exponent(p: Fraction) -> str:
    if p == 1:
        return ""
    if p.denominator == 1 and p > 0:
        return f"^{p.numerator}"
    if p.denominator == 1:
        return f"^({p.numerator})"
    return f"^({p.numerator}/{p.denominator})"


def _coord_name(coord: int, coords: Optional[List[str]]) -> str:
    if coords and coord < len(coords):
        return coords[coord]
    return f"x{coord}"


def _format_jet(var: JetVar, coords) -> str:
    name = _coord_name(var.coord, coords)
    return name if var.order == 0 else f"D({name},{var.order})"


def _format_linear(frequency: Fraction, weights: Weights, coords) -> str:
    pieces = []
    if frequency != 0:
        pieces.append((frequency, 't'))
    for coord, weight in weights:
        pieces.append((weight, _coord_name(coord, coords)))
    out = []
    for index, (c, symbol) in enumerate(pieces):
        magnitude = abs(c)
        body = symbol if magnitude == 1 else f"{_format_rational(magnitude)}*{symbol}"
        if index == 0:
            out.append(f"-{body}" if c < 0 else body)
        else:
            out.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(out)


def _format_monomial(m: Monomial, coords) -> List[str]:
    factors = []
    if m.t_power != 0:
        factors.append(f"t{_format_exponent(m.t_power)}")
    for var, p in m.jet_powers:
        factors.append(f"{_format_jet(var, coords)}{_format_exponent(p)}")
    for f in m.trans:
        factors.append(f"{f.kind.value}({_format_linear(f.frequency, f.weights, coords)})")
    return factors


def format_expr(e: Expr, coords: Optional[List[str]] = None) -> str:
    """
    Canonical text in D-notation; re-parses to the same Expr.

    Examples:
        x' + x''' prints as "D(x,1) + D(x,3)"
    """
    if e.is_zero():
        return "0"
    parts = []
    for index, (m, c) in enumerate(e.items()):
        factors = _format_monomial(m, coords)
        magnitude = abs(c)
        if magnitude != 1 or not factors:
            factors.insert(0, _format_rational(magnitude))
        body = "*".join(factors)
        if index == 0:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(parts)
