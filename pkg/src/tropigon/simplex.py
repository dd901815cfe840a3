"""Exact rational linear programming (dense two-phase simplex, Bland's rule).

The problems solved here are tiny (tens of variables), so a textbook tableau
implementation over `Fraction` is both adequate and -- thanks to Bland's
anticycling rule -- guaranteed to terminate.  All variables are free
(unrestricted in sign); internally each is split into a difference of two
non-negative variables.

The main consumer pattern in this package is *strict* feasibility: find x with
A x < b (componentwise strict).  That is decided exactly by maximizing an
auxiliary margin t subject to A x + t <= b, t <= cap: the strict system is
solvable iff the optimum t* is positive, and x* is then an interior witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

Row = Sequence[Fraction]


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None


def solve_lp(
    c: Row,
    A_ub: Sequence[Row] | None = None,
    b_ub: Row | None = None,
    A_eq: Sequence[Row] | None = None,
    b_eq: Row | None = None,
    maximize: bool = False,
) -> LPResult:
    """Optimize c.x subject to A_ub x <= b_ub and A_eq x = b_eq, x free."""
    A_ub = [list(map(Fraction, r)) for r in (A_ub or [])]
    b_ub = [Fraction(v) for v in (b_ub or [])]
    A_eq = [list(map(Fraction, r)) for r in (A_eq or [])]
    b_eq = [Fraction(v) for v in (b_eq or [])]
    c = [Fraction(v) for v in c]
    n = len(c)
    for r in A_ub + A_eq:
        if len(r) != n:
            raise ValueError("inconsistent LP dimensions")

    # Split each free variable into plus/minus parts, append slack variables
    # for the inequality rows, normalize all rhs to be non-negative.
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    n_split = 2 * n
    n_total = n_split + m_ub

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(m_ub):
        row = [ZERO] * n_total
        for j, a in enumerate(A_ub[i]):
            row[2 * j] = a
            row[2 * j + 1] = -a
        row[n_split + i] = ONE
        rows.append(row)
        rhs.append(b_ub[i])
    for i in range(m_eq):
        row = [ZERO] * n_total
        for j, a in enumerate(A_eq[i]):
            row[2 * j] = a
            row[2 * j + 1] = -a
        rows.append(row)
        rhs.append(b_eq[i])
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-a for a in rows[i]]
            rhs[i] = -rhs[i]

    cost = [ZERO] * n_total
    sign = Fraction(-1) if maximize else ONE
    for j, cj in enumerate(c):
        cost[2 * j] = sign * cj
        cost[2 * j + 1] = -sign * cj

    tab = _Tableau(rows, rhs, n_total)
    if not tab.phase1():
        return LPResult("infeasible")
    status, value, x_split = tab.phase2(cost)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [x_split[2 * j] - x_split[2 * j + 1] for j in range(n)]
    obj = sum((cj * xj for cj, xj in zip(c, x)), ZERO)
    return LPResult("optimal", x, obj)


class _Tableau:
    """Simplex tableau with artificial variables and Bland pivoting."""

    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], n_struct: int):
        self.m = len(rows)
        self.n_struct = n_struct
        self.n = n_struct + self.m  # + artificials
        self.rows = [row + [ONE if i == j else ZERO for j in range(self.m)] for i, row in enumerate(rows)]
        self.rhs = list(rhs)
        self.basis = [n_struct + i for i in range(self.m)]

    def _pivot(self, r: int, c: int, cost: list[Fraction], cost_val: list[Fraction]) -> None:
        pv = self.rows[r][c]
        self.rows[r] = [a / pv for a in self.rows[r]]
        self.rhs[r] /= pv
        for i in range(self.m):
            if i != r and self.rows[i][c] != 0:
                f = self.rows[i][c]
                self.rows[i] = [a - f * b for a, b in zip(self.rows[i], self.rows[r])]
                self.rhs[i] -= f * self.rhs[r]
        if cost[c] != 0:
            f = cost[c]
            for j in range(self.n):
                cost[j] -= f * self.rows[r][j]
            cost_val[0] -= f * self.rhs[r]
        self.basis[r] = c

    def _iterate(self, cost: list[Fraction], cost_val: list[Fraction], allowed: int) -> str:
        while True:
            enter = -1
            for j in range(allowed):
                if cost[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            leave = -1
            best: Fraction | None = None
            for i in range(self.m):
                a = self.rows[i][enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            self._pivot(leave, enter, cost, cost_val)

    def phase1(self) -> bool:
        # minimize the sum of artificials; initial reduced costs come from
        # subtracting every row (each artificial is basic with cost 1).
        cost = [ZERO] * self.n
        for j in range(self.n_struct):
            cost[j] = -sum(self.rows[i][j] for i in range(self.m))
        cost_val = [-sum(self.rhs, ZERO)]  # invariant: cost_val[0] == -objective
        status = self._iterate(cost, cost_val, self.n_struct)
        assert status == "optimal"  # phase-1 objective is bounded below by 0
        if cost_val[0] != 0:
            return False
        # Drive any artificial still in the basis out (or drop redundant rows).
        for i in range(self.m):
            if self.basis[i] >= self.n_struct and self.rhs[i] == 0:
                for j in range(self.n_struct):
                    if self.rows[i][j] != 0:
                        self._pivot(i, j, cost, cost_val)
                        break
        keep = [i for i in range(self.m) if self.basis[i] < self.n_struct or self.rhs[i] != 0]
        # A basic artificial with nonzero rhs cannot remain after a zero-sum
        # phase 1, so every kept row has a structural basic variable.
        self.rows = [self.rows[i] for i in keep]
        self.rhs = [self.rhs[i] for i in keep]
        self.basis = [self.basis[i] for i in keep]
        self.m = len(keep)
        return True

    def phase2(self, struct_cost: list[Fraction]) -> tuple[str, Fraction, list[Fraction]]:
        cost = [ZERO] * self.n
        for j in range(self.n_struct):
            cost[j] = struct_cost[j]
        cost_val = [ZERO]
        for i in range(self.m):
            b = self.basis[i]
            if cost[b] != 0:
                f = cost[b]
                for j in range(self.n):
                    cost[j] -= f * self.rows[i][j]
                cost_val[0] -= f * self.rhs[i]
        status = self._iterate(cost, cost_val, self.n_struct)
        x = [ZERO] * self.n_struct
        for i in range(self.m):
            if self.basis[i] < self.n_struct:
                x[self.basis[i]] = self.rhs[i]
        return status, -cost_val[0], x


def strict_feasible(
    A_strict: Sequence[Row],
    b_strict: Row,
    A_eq: Sequence[Row] | None = None,
    b_eq: Row | None = None,
    A_loose: Sequence[Row] | None = None,
    b_loose: Row | None = None,
    cap: Fraction | int = 1,
) -> tuple[list[Fraction], Fraction] | None:
    """Witness for {A_strict x < b_strict, A_loose x <= b_loose, A_eq x = b_eq}.

    Returns (x, margin) with margin > 0, or None if no strict solution exists.
    The margin is maximized up to `cap`, which keeps the LP bounded without
    affecting the yes/no answer.
    """
    A_strict = [list(r) for r in A_strict]
    n = len(A_strict[0]) if A_strict else (len(A_eq[0]) if A_eq else (len(A_loose[0]) if A_loose else 0))
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for r, b in zip(A_strict, b_strict or []):
        rows.append(list(r) + [ONE])
        rhs.append(Fraction(b))
    for r, b in zip(A_loose or [], b_loose or []):
        rows.append(list(r) + [ZERO])
        rhs.append(Fraction(b))
    rows.append([ZERO] * n + [ONE])
    rhs.append(Fraction(cap))
    eq_rows = [list(r) + [ZERO] for r in (A_eq or [])]
    c = [ZERO] * n + [ONE]
    res = solve_lp(c, rows, rhs, eq_rows, list(b_eq or []), maximize=True)
    if res.status != "optimal" or res.value is None or res.value <= 0:
        return None
    return res.x[:n], res.value
