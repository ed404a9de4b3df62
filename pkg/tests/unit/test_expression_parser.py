import random
from fractions import Fraction

import pytest

from app.exceptions import (
    ExpressionSyntaxError,
    NonlinearTransArgumentError,
    NonRationalExponentError,
    OrderCapExceeded,
    UnknownIdentifierError,
)
from app.services.expression import Expr, TransKind
from app.services.expression_parser import parse, parse_rational, print_expr
from tests.conftest import build_random_expr

COORDS = ['x', 'y']


class TestParse:
    @pytest.mark.parametrize("text,expected", [
        ("x''", Expr.jet(0, 2)),
        ("D(y,4)", Expr.jet(1, 4)),
        ("t^2", Expr.time(2)),
        ("-x + 2*y", Expr.jet(1) * 2 - Expr.jet(0)),
        ("(1/2)*x'^2", Expr.jet(0, 1) ** 2 * Fraction(1, 2)),
        ("x^(-3/2)", Expr.jet(0) ** Fraction(-3, 2)),
        ("x'/x", Expr.jet(0, 1) * Expr.jet(0) ** -1),
        ("exp(-t)", Expr.trans(TransKind.EXP, -1)),
        ("sin(x)", Expr.trans(TransKind.SIN, 0, [(0, 1)])),
    ])
    def test_valid(self, text, expected):
        assert parse(text, COORDS) == expected

    def test_parameters_are_substituted(self):
        e = parse("sin(m/lambda*t)", COORDS, {'m': Fraction(1), 'lambda': Fraction(2)})
        assert e == Expr.trans(TransKind.SIN, Fraction(1, 2))

    def test_syntax_error_has_position(self):
        with pytest.raises(ExpressionSyntaxError) as excinfo:
            parse("x + * y", COORDS)
        assert excinfo.value.position >= 2

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError):
            parse("z + x", COORDS)

    def test_non_rational_exponent(self):
        with pytest.raises(NonRationalExponentError):
            parse("x^y", COORDS)

    def test_nonlinear_argument(self):
        with pytest.raises(NonlinearTransArgumentError):
            parse("sin(t^2)", COORDS)

    def test_order_cap(self):
        with pytest.raises(OrderCapExceeded):
            parse("D(x,9)", COORDS, max_order=8)

    def test_trailing_garbage(self):
        with pytest.raises(ExpressionSyntaxError):
            parse("x y", COORDS)

    @pytest.mark.parametrize("text,value", [
        ("3", Fraction(3)),
        ("-3/4", Fraction(-3, 4)),
        ("(1/2)*4", Fraction(2)),
    ])
    def test_parse_rational(self, text, value):
        assert parse_rational(text) == value

    def test_parse_rational_rejects_symbols(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_rational("t")


class TestRoundTrip:
    @pytest.mark.parametrize("seed", range(120))
    def test_print_then_parse(self, seed):
        rng = random.Random(1000 + seed)
        e = build_random_expr(rng, terms=4)
        assert parse(print_expr(e, COORDS), COORDS) == e
