"""Dense exact linear algebra over the rationals (small systems only)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def _copy(A: Sequence[Sequence[Fraction]]) -> Matrix:
    return [[Fraction(x) for x in row] for row in A]


def rref(A: Sequence[Sequence[Fraction]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = _copy(A)
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if R[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        R[r], R[pivot_row] = R[pivot_row], R[r]
        pv = R[r][c]
        R[r] = [x / pv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def solve_affine(
    A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
) -> tuple[list[Fraction], list[list[Fraction]]] | None:
    """General solution of A x = b.

    Returns (particular solution, basis of the null space), or None if the
    system is inconsistent.
    """
    rows = len(A)
    if rows == 0:
        return [], []
    cols = len(A[0])
    aug = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    R, pivots = rref(aug)
    pivot_set = set(pivots)
    if cols in pivot_set:  # pivot in the rhs column: inconsistent
        return None
    particular = [Fraction(0)] * cols
    for r_idx, c in enumerate(pivots):
        particular[c] = R[r_idx][cols]
    free = [c for c in range(cols) if c not in pivot_set]
    null_basis: list[list[Fraction]] = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r_idx, c in enumerate(pivots):
            v[c] = -R[r_idx][f]
        null_basis.append(v)
    return particular, null_basis


def invert(A: Sequence[Sequence[Fraction]]) -> Matrix:
    """Exact inverse of a square matrix; raises ValueError if singular."""
    n = len(A)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in R]


def mat_vec(A: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * xi for a, xi in zip(row, x)), Fraction(0)) for row in A]


def mat_mul(A: Sequence[Sequence[Fraction]], B: Sequence[Sequence[Fraction]]) -> Matrix:
    cols = len(B[0])
    return [
        [sum((row[k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(cols)]
        for row in A
    ]
