"""
Exact linear algebra over the rationals.

Forward elimination is fraction-free: rows are scaled to integers,
combined as a*row - b*pivot_row and divided by their content (gcd of
entries), so intermediate values stay small and exact. The reduced row
echelon form is then produced in Fractions; it is unique, hence the
nullspace basis does not depend on the input row order.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import List, Optional, Sequence, Tuple

Vector = List[Fraction]


@dataclass
class RationalMatrix:
    """Dense matrix of Fractions; ``cols`` is kept explicitly for empty row sets."""

    rows: int
    cols: int
    entries: List[List[Fraction]]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> 'RationalMatrix':
        entries = [[Fraction(v) for v in row] for row in rows]
        if cols is None:
            cols = len(entries[0]) if entries else 0
        if any(len(row) != cols for row in entries):
            raise ValueError(f"all rows must have {cols} entries")
        return cls(len(entries), cols, entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'RationalMatrix':
        return cls(rows, cols, [[Fraction(0)] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> 'RationalMatrix':
        m = cls.zeros(n, n)
        for i in range(n):
            m.entries[i][i] = Fraction(1)
        return m

    def multiply(self, vector: Sequence[Fraction]) -> Vector:
        return [sum((a * b for a, b in zip(row, vector)), Fraction(0)) for row in self.entries]


def _integer_row(row: Sequence[Fraction]) -> List[int]:
    scale = reduce(lcm, (v.denominator for v in row), 1)
    ints = [int(v * scale) for v in row]
    return _primitive(ints)


def _primitive(row: List[int]) -> List[int]:
    content = reduce(gcd, row, 0)
    if content > 1:
        return [v // content for v in row]
    return row


def echelon_form(m: RationalMatrix) -> Tuple[List[List[int]], List[int]]:
    """
    Fraction-free row echelon form.

    Pivot: nonzero entry of smallest magnitude in the column, lowest row on ties.

    Returns:
        (integer rows, pivot columns); rows beyond len(pivots) are zero
    """
    rows = [_integer_row(row) for row in m.entries]
    pivots: List[int] = []
    r = 0
    for c in range(m.cols):
        if r == len(rows):
            break
        candidates = [i for i in range(r, len(rows)) if rows[i][c] != 0]
        if not candidates:
            continue
        best = min(candidates, key=lambda i: (abs(rows[i][c]), i))
        rows[r], rows[best] = rows[best], rows[r]
        a = rows[r][c]
        for i in range(r + 1, len(rows)):
            b = rows[i][c]
            if b == 0:
                continue
            rows[i] = _primitive([a * x - b * y for x, y in zip(rows[i], rows[r])])
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: RationalMatrix) -> Tuple[List[Vector], List[int]]:
    """Reduced row echelon form in Fractions plus pivot columns."""
    rows, pivots = echelon_form(m)
    reduced = [[Fraction(v) for v in row] for row in rows[:len(pivots)]]
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        lead = reduced[r][c]
        reduced[r] = [v / lead for v in reduced[r]]
        for above in range(r):
            factor = reduced[above][c]
            if factor:
                reduced[above] = [x - factor * y for x, y in zip(reduced[above], reduced[r])]
    return reduced, pivots


def rank(m: RationalMatrix) -> int:
    return len(echelon_form(m)[1])


def nullspace(m: RationalMatrix) -> List[Vector]:
    """
    Basis of {v : m v = 0}.

    One vector per free column in ascending order: 1 in that column, 0 in
    the other free columns, -R[r][free] in pivot column of row r.
    """
    reduced, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vector = [Fraction(0)] * m.cols
        vector[free] = Fraction(1)
        for r, c in enumerate(pivots):
            vector[c] = -reduced[r][free]
        basis.append(vector)
    return basis


def solve(m: RationalMatrix, rhs: Sequence[Fraction]) -> Optional[Vector]:
    """
    One exact solution of m v = rhs (free variables set to 0).

    Returns:
        The solution, or None if the system is inconsistent
    """
    if len(rhs) != m.rows:
        raise ValueError(f"right-hand side has {len(rhs)} entries, matrix has {m.rows} rows")
    augmented = RationalMatrix(
        m.rows, m.cols + 1, [list(row) + [Fraction(b)] for row, b in zip(m.entries, rhs)]
    )
    reduced, pivots = rref(augmented)
    if pivots and pivots[-1] == m.cols:
        return None
    solution = [Fraction(0)] * m.cols
    for r, c in enumerate(pivots):
        solution[c] = reduced[r][m.cols]
    return solution
