"""Dense exact linear algebra over Q.

Matrices are lists of rows of :class:`~fractions.Fraction`.  Pivoting is
deterministic (leftmost column first, then topmost nonzero row), so equal
inputs always produce equal bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Matrix = list[list[Fraction]]
Vector = list[Fraction]


class RationalMatrix:
    """Thin wrapper carrying shape information for an exact matrix."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: Optional[int] = None):
        self.entries: Matrix = [[Fraction(x) for x in row] for row in entries]
        self.rows = len(self.entries)
        if cols is None:
            if not self.entries:
                raise ValueError("column count required for an empty matrix")
            cols = len(self.entries[0])
        if any(len(r) != cols for r in self.entries):
            raise ValueError("ragged matrix")
        self.cols = cols

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RationalMatrix:
        return cls([[Fraction(0)] * cols for _ in range(rows)], cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
            return RationalMatrix(
                [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in self.entries],
                other.cols,
            )
        return mat_vec(self, other)

    def transpose(self) -> RationalMatrix:
        return RationalMatrix([list(c) for c in zip(*self.entries)], self.rows) if self.rows else RationalMatrix([], 0)

    def __repr__(self):
        return f"RationalMatrix({[[str(x) for x in r] for r in self.entries]})"


def _as_matrix(M) -> tuple[Matrix, int]:
    if isinstance(M, RationalMatrix):
        return [list(r) for r in M.entries], M.cols
    rows = [[Fraction(x) for x in r] for r in M]
    return rows, (len(rows[0]) if rows else 0)


def mat_vec(M, v: Sequence) -> Vector:
    rows, cols = _as_matrix(M)
    if len(v) != cols:
        raise ValueError("shape mismatch")
    return [sum((a * Fraction(b) for a, b in zip(r, v)), Fraction(0)) for r in rows]


@dataclass
class Echelon:
    """Result of :func:`rref`.  ``transform @ M == matrix``."""

    matrix: RationalMatrix
    pivots: list[int]
    rank: int
    transform: RationalMatrix

    def __iter__(self):
        # allows ``R, pivots, rank = rref(M)[:3]``-style unpacking via tuple()
        return iter((self.matrix, self.pivots, self.rank))


def rref(M) -> Echelon:
    rows, cols = _as_matrix(M)
    nrows = len(rows)
    E = [[Fraction(int(i == j)) for j in range(nrows)] for i in range(nrows)]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        if p != r:
            rows[p], rows[r] = rows[r], rows[p]
            E[p], E[r] = E[r], E[p]
        inv = 1 / rows[r][c]
        if inv != 1:
            rows[r] = [x * inv for x in rows[r]]
            E[r] = [x * inv for x in E[r]]
        for i in range(nrows):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
                E[i] = [a - f * b for a, b in zip(E[i], E[r])]
        pivots.append(c)
        r += 1
    return Echelon(RationalMatrix(rows, cols), pivots, len(pivots), RationalMatrix(E, nrows))


def rank(M) -> int:
    return rref(M).rank


def kernel_basis(M, cols: Optional[int] = None) -> list[Vector]:
    """Basis of the right nullspace, one vector per free column.

    Each vector has a 1 in its free column and zeros in the other free
    columns.  ``cols`` is needed only when ``M`` has no rows.
    """
    rows, n = _as_matrix(M)
    if not rows:
        n = cols if cols is not None else n
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    ech = rref(RationalMatrix(rows, n))
    R = ech.matrix.entries
    pivset = set(ech.pivots)
    out = []
    for free in range(n):
        if free in pivset:
            continue
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for i, pc in enumerate(ech.pivots):
            v[pc] = -R[i][free]
        out.append(v)
    return out


def solve_affine(M, b: Sequence, cols: Optional[int] = None) -> Optional[tuple[Vector, list[Vector]]]:
    """Solve ``M x = b`` exactly.

    Returns ``(particular, kernel)`` or ``None`` when inconsistent.  The
    particular solution has zeros in all free coordinates.
    """
    rows, n = _as_matrix(M)
    if not rows:
        n = cols if cols is not None else n
        if any(Fraction(x) for x in b):
            return None
        return [Fraction(0)] * n, kernel_basis([], n)
    if len(b) != len(rows):
        raise ValueError("right-hand side has wrong length")
    aug = [r + [Fraction(x)] for r, x in zip(rows, b)]
    ech = rref(RationalMatrix(aug, n + 1))
    if n in ech.pivots:
        return None
    x = [Fraction(0)] * n
    for i, pc in enumerate(ech.pivots):
        x[pc] = ech.matrix.entries[i][n]
    return x, kernel_basis(RationalMatrix(rows, n))


def inconsistency_row(M, b: Sequence) -> Optional[Vector]:
    """A row vector ``y`` with ``y M = 0`` and ``y b = 1``, if the system is inconsistent."""
    rows, n = _as_matrix(M)
    aug = [r + [Fraction(x)] for r, x in zip(rows, b)]
    ech = rref(RationalMatrix(aug, n + 1))
    if n not in ech.pivots:
        return None
    i = ech.pivots.index(n)
    return list(ech.transform.entries[i])


def determinant(M) -> Fraction:
    rows, n = _as_matrix(M)
    if len(rows) != n:
        raise ValueError("determinant of a non-square matrix")
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[p], rows[c] = rows[c], rows[p]
            det = -det
        det *= rows[c][c]
        for i in range(c + 1, n):
            f = rows[i][c] / rows[c][c]
            if f:
                rows[i] = [a - f * bb for a, bb in zip(rows[i], rows[c])]
    return det


def inverse(M) -> RationalMatrix:
    rows, n = _as_matrix(M)
    if len(rows) != n:
        raise ValueError("inverse of a non-square matrix")
    ech = rref(RationalMatrix(rows, n))
    if ech.rank != n:
        raise ValueError("matrix is singular")
    return ech.transform


def leading_minors(M) -> list[Fraction]:
    rows, n = _as_matrix(M)
    return [determinant([r[:k] for r in rows[:k]]) for k in range(1, n + 1)]
