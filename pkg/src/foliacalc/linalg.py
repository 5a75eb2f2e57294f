"""Dense exact linear algebra over the rationals.

Matrices are lists of rows of Fractions.  The complexes handled here have at
most C(7, 3) = 35 monomials per degree, so plain Gauss-Jordan elimination is
more than fast enough and keeps every step exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Vector = list[Fraction]
Matrix = list[list[Fraction]]


def transpose(m: Matrix, ncols: int | None = None) -> Matrix:
    if not m:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*m)]


def rref(m: Matrix, ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns. Input is not modified."""
    a = [list(row) for row in m]
    if not a:
        return [], []
    width = len(a[0]) if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(width):
        pivot = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def nullspace(m: Matrix, ncols: int) -> list[Vector]:
    """Basis of {x : m x = 0}; one vector per free column, RREF-normalized."""
    if not m:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(m, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            x[pc] = -row[f]
        basis.append(x)
    return basis


def solve(m: Matrix, rhs: Vector, ncols: int) -> Vector | None:
    """One solution x of m x = rhs (free variables set to zero), or None."""
    if not m:
        return [Fraction(0)] * ncols if all(v == 0 for v in rhs) else None
    aug = [list(row) + [Fraction(b)] for row, b in zip(m, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[ncols]
    return x


def row_space_basis(vectors: Sequence[Vector]) -> list[Vector]:
    """Canonical (reduced echelon) basis of the span of ``vectors``."""
    if not vectors:
        return []
    red, _ = rref([list(v) for v in vectors])
    return red


def matmul(a: Matrix, b: Matrix, inner: int, ncols: int) -> Matrix:
    bt = transpose(b, ncols) if b else [[Fraction(0)] * inner for _ in range(ncols)]
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def determinant(m: Matrix) -> Fraction:
    n = len(m)
    a = [list(row) for row in m]
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det
