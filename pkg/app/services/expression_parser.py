"""
Recursive-descent parser for the problem-file expression language.

Grammar:
    expr     := ['+'|'-'] term (('+'|'-') term)*
    term     := unary (('*'|'/') unary)*
    unary    := '-' unary | factor
    factor   := base ('^' exponent)?
    exponent := int ['/' int] | '(' ['-'|'+'] int ['/' int] ')'
    base     := int | 't' | ident "'"{0..6} | 'D(' ident ',' int ')'
              | ('sin'|'cos'|'exp') '(' expr ')' | '(' expr ')'

Division is sugar for multiplication by a monomial to the power -1.
Parameters are replaced by their rational values while parsing.
"""

from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

from app.config import config
from app.constants import MAX_PRIMES
from app.exceptions import (
    ExpressionSyntaxError,
    NonlinearTransArgumentError,
    NonRationalExponentError,
    OrderCapExceeded,
    SubstitutionDomainError,
    UnknownIdentifierError,
)
from app.services.expression import Expr, TransKind, format_expr, linear_form

FUNCTIONS = {'sin': TransKind.SIN, 'cos': TransKind.COS, 'exp': TransKind.EXP}


class ExpressionParser:
    """
    Parse one expression string against declared coordinates and parameters.

    A fresh parser is built per text; ``parse()`` may only be called once.
    """

    def __init__(
        self,
        text: str,
        coords: Sequence[str],
        params: Optional[Mapping[str, Fraction]] = None,
        max_order: Optional[int] = None,
    ):
        self.text = text
        self.pos = 0
        self.length = len(text)
        self.coords: Dict[str, int] = {name: index for index, name in enumerate(coords)}
        self.params = dict(params or {})
        self.max_order = config.max_order if max_order is None else max_order

    def skip_whitespace(self):
        while self.pos < self.length and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_whitespace()
        return self.text[self.pos] if self.pos < self.length else ''

    def match(self, terminal: str) -> bool:
        self.skip_whitespace()
        if self.text.startswith(terminal, self.pos):
            self.pos += len(terminal)
            return True
        return False

    def expect(self, terminal: str):
        if not self.match(terminal):
            raise self.error(f"'{terminal}'")

    def error(self, expected: str) -> ExpressionSyntaxError:
        return ExpressionSyntaxError(self.text, self.pos, expected)

    def parse(self) -> Expr:
        self.pos = 0
        if not self.text.strip():
            raise self.error("expression")
        result = self.parse_expr()
        self.skip_whitespace()
        if self.pos < self.length:
            raise self.error("operator or end of input")
        return result

    def parse_expr(self) -> Expr:
        negate = False
        if self.match('-'):
            negate = True
        else:
            self.match('+')
        result = self.parse_term()
        if negate:
            result = -result
        while True:
            if self.match('+'):
                result = result + self.parse_term()
            elif self.match('-'):
                result = result - self.parse_term()
            else:
                return result

    def parse_term(self) -> Expr:
        result = self.parse_unary()
        while True:
            if self.match('*'):
                result = result * self.parse_unary()
            elif self.match('/'):
                result = result / self.parse_unary()
            else:
                return result

    def parse_unary(self) -> Expr:
        if self.match('-'):
            return -self.parse_unary()
        return self.parse_factor()

    def parse_factor(self) -> Expr:
        base = self.parse_base()
        if self.match('^'):
            return base ** self.parse_exponent()
        return base

    def parse_exponent(self) -> Fraction:
        start = self.pos
        if self.match('('):
            sign = -1 if self.match('-') else 1
            if sign == 1:
                self.match('+')
            value = self._rational_literal(start)
            if not self.match(')'):
                raise NonRationalExponentError(self._rest(start))
            return sign * value
        return self._rational_literal(start)

    def _rational_literal(self, start: int) -> Fraction:
        numerator = self.parse_integer()
        if numerator is None:
            raise NonRationalExponentError(self._rest(start))
        denominator = 1
        if self.match('/'):
            denominator = self.parse_integer()
            if not denominator:
                raise NonRationalExponentError(self._rest(start))
        return Fraction(numerator, denominator)

    def _rest(self, start: int) -> str:
        return self.text[start:].strip()

    def parse_integer(self) -> Optional[int]:
        self.skip_whitespace()
        begin = self.pos
        while self.pos < self.length and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == begin:
            return None
        return int(self.text[begin:self.pos])

    def parse_identifier(self) -> Optional[str]:
        self.skip_whitespace()
        begin = self.pos
        if self.pos < self.length and (self.text[self.pos].isalpha() or self.text[self.pos] == '_'):
            self.pos += 1
            while self.pos < self.length and (self.text[self.pos].isalnum() or self.text[self.pos] == '_'):
                self.pos += 1
        return self.text[begin:self.pos] or None

    def parse_base(self) -> Expr:
        char = self.peek()
        if char.isdigit():
            return Expr.constant(self.parse_integer())
        if self.match('('):
            inner = self.parse_expr()
            self.expect(')')
            return inner

        begin = self.pos
        name = self.parse_identifier()
        if name is None:
            raise self.error("number, identifier or '('")

        if name in FUNCTIONS and self.peek() == '(':
            return self.parse_function(name)
        if name == 'D' and self.peek() == '(':
            return self.parse_d_notation()

        primes = 0
        while self.pos < self.length and self.text[self.pos] == "'":
            primes += 1
            self.pos += 1

        if name in self.coords:
            if primes > MAX_PRIMES:
                raise ExpressionSyntaxError(self.text, begin, f"at most {MAX_PRIMES} primes (use D({name},k))")
            return self._jet(name, primes)
        if primes:
            raise ExpressionSyntaxError(self.text, begin, "a coordinate before primes")
        if name == 't':
            return Expr.time()
        if name in self.params:
            return Expr.constant(self.params[name])
        raise UnknownIdentifierError(name)

    def _jet(self, name: str, order: int) -> Expr:
        if order > self.max_order:
            raise OrderCapExceeded(order, self.max_order)
        return Expr.jet(self.coords[name], order)

    def parse_d_notation(self) -> Expr:
        self.expect('(')
        name = self.parse_identifier()
        if name is None or name not in self.coords:
            if name is None:
                raise self.error("coordinate name")
            raise UnknownIdentifierError(name)
        self.expect(',')
        order = self.parse_integer()
        if order is None:
            raise self.error("derivative order")
        self.expect(')')
        return self._jet(name, order)

    def parse_function(self, name: str) -> Expr:
        self.expect('(')
        start = self.pos
        argument = self.parse_expr()
        end = self.pos
        self.expect(')')
        try:
            frequency, weights = linear_form(argument, name)
        except SubstitutionDomainError:
            raise NonlinearTransArgumentError(name, self.text[start:end].strip())
        return Expr.trans(FUNCTIONS[name], frequency, weights)


def parse(
    text: str,
    coords: Sequence[str],
    params: Optional[Mapping[str, Fraction]] = None,
    max_order: Optional[int] = None,
) -> Expr:
    """
    Parse expression text into a canonical Expr.

    Args:
        text: Expression source, e.g. "(1/2)*(x''^2 - x'^2)"
        coords: Declared coordinate names, index = position
        params: Parameter values substituted at parse time
        max_order: Jet-order cap (defaults to the configured cap)

    Raises:
        ExpressionSyntaxError, UnknownIdentifierError, NonRationalExponentError,
        NonlinearTransArgumentError, NonMonomialPowerError, OrderCapExceeded
    """
    return ExpressionParser(text, coords, params, max_order).parse()


def parse_rational(text: str) -> Fraction:
    """Parse a constant rational expression such as '-3/2' (used for parameters)."""
    value = ExpressionParser(text, [], {}).parse()
    if not value.is_constant():
        raise ExpressionSyntaxError(text, 0, "a rational constant")
    return value.constant_value()


def print_expr(e: Expr, coords: Optional[List[str]] = None) -> str:
    """Canonical printed form; ``parse(print_expr(e, coords), coords) == e``."""
    return format_expr(e, coords)
