import random
from fractions import Fraction

import pytest
import sympy

from app.services.linsolve_service import (
    RationalMatrix,
    echelon_form,
    nullspace,
    rank,
    rref,
    solve,
)


def random_matrix(rng: random.Random, rows: int, cols: int, target_rank: int) -> RationalMatrix:
    """rows x cols product of random factors, so the rank is at most target_rank."""
    left = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(target_rank)] for _ in range(rows)]
    right = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(cols)] for _ in range(target_rank)]
    entries = [
        [sum((left[i][k] * right[k][j] for k in range(target_rank)), Fraction(0)) for j in range(cols)]
        for i in range(rows)
    ]
    return RationalMatrix.from_rows(entries, cols)


def sympy_rank(m: RationalMatrix) -> int:
    if m.rows == 0:
        return 0
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in m.entries]).rank()


class TestRationalMatrix:
    def test_from_rows_checks_width(self):
        with pytest.raises(ValueError):
            RationalMatrix.from_rows([[1, 2], [3]])

    def test_empty_keeps_columns(self):
        m = RationalMatrix.from_rows([], cols=3)
        assert (m.rows, m.cols) == (0, 3)
        assert len(nullspace(m)) == 3

    def test_identity(self):
        assert nullspace(RationalMatrix.identity(4)) == []


class TestElimination:
    def test_echelon_rows_are_primitive_integers(self):
        m = RationalMatrix.from_rows([[Fraction(1, 2), 1], [Fraction(3, 2), 4]])
        rows, pivots = echelon_form(m)
        assert pivots == [0, 1]
        assert all(isinstance(v, int) for row in rows for v in row)

    def test_rref_is_independent_of_row_order(self):
        rows = [[1, 2, 3, 4], [2, 4, 7, 8], [0, 0, 1, 0]]
        forward, _ = rref(RationalMatrix.from_rows(rows))
        backward, _ = rref(RationalMatrix.from_rows(list(reversed(rows))))
        assert forward == backward

    def test_known_nullspace(self):
        m = RationalMatrix.from_rows([[1, 1, 0], [0, 0, 1]])
        assert nullspace(m) == [[Fraction(-1), Fraction(1), Fraction(0)]]

    @pytest.mark.parametrize("seed", range(100))
    def test_nullspace_against_sympy(self, seed):
        rng = random.Random(seed)
        rows, cols = rng.randint(1, 7), rng.randint(1, 7)
        m = random_matrix(rng, rows, cols, rng.randint(0, min(rows, cols)))
        basis = nullspace(m)
        assert rank(m) == sympy_rank(m)
        assert len(basis) == cols - rank(m)
        for v in basis:
            assert all(entry == 0 for entry in m.multiply(v))
        if basis:
            assert sympy_rank(RationalMatrix.from_rows(basis)) == len(basis)


class TestSolve:
    def test_consistent(self):
        m = RationalMatrix.from_rows([[2, 1], [1, 3]])
        assert solve(m, [Fraction(3), Fraction(4)]) == [Fraction(1), Fraction(1)]

    def test_inconsistent(self):
        m = RationalMatrix.from_rows([[1, 1], [2, 2]])
        assert solve(m, [Fraction(1), Fraction(3)]) is None

    def test_free_variables_are_zero(self):
        m = RationalMatrix.from_rows([[1, 1, 0]])
        assert solve(m, [Fraction(5)]) == [Fraction(5), Fraction(0), Fraction(0)]

    def test_rhs_length(self):
        with pytest.raises(ValueError):
            solve(RationalMatrix.identity(2), [Fraction(1)])
