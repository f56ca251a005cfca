"""Polyhedra and an exact two-phase simplex method (Bland's rule)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exact import Rat, ONE, ZERO, RatVec, dot, rat, ratvec


@dataclass(frozen=True)
class Polytope:
    """{x in Q^dim : a.x <= b for (a, b) in inequalities, a.x = b for (a, b) in equalities}.

    Boundedness is not assumed.
    """

    dim: int
    inequalities: tuple = ()
    equalities: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        ineq = tuple((ratvec(a), rat(b)) for a, b in self.inequalities)
        eq = tuple((ratvec(a), rat(b)) for a, b in self.equalities)
        for a, _ in ineq + eq:
            if len(a) != self.dim:
                raise ValueError(f"constraint row of length {len(a)} in dimension {self.dim}")
        object.__setattr__(self, "inequalities", ineq)
        object.__setattr__(self, "equalities", eq)

    def contains(self, x: Sequence[Rat]) -> bool:
        return all(dot(a, x) <= b for a, b in self.inequalities) and all(
            dot(a, x) == b for a, b in self.equalities
        )

    def active(self, x: Sequence[Rat]) -> list[int]:
        """Indices of inequalities tight at x."""
        return [i for i, (a, b) in enumerate(self.inequalities) if dot(a, x) == b]


def unit(n: int, i: int, s=ONE) -> RatVec:
    return tuple(s if j == i else ZERO for j in range(n))


def orthant(n: int) -> Polytope:
    """x >= 0, written as -x_i <= 0."""
    return Polytope(n, tuple((unit(n, i, -ONE), ZERO) for i in range(n)))


def simplex(n: int) -> Polytope:
    """Standard simplex {x >= 0, sum x = 1}."""
    return Polytope(n, orthant(n).inequalities, (((ONE,) * n, ONE),))


def capped_orthant(n: int, t) -> Polytope:
    """{x >= 0, sum x <= t}."""
    return Polytope(n, orthant(n).inequalities + (((ONE,) * n, rat(t)),))


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Rat | None = None
    argmin: RatVec | None = None


def _pivot(T, r, c):
    row = T[r]
    inv = 1 / row[c]
    if inv != 1:
        T[r] = row = [x * inv for x in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [a - f * b for a, b in zip(other, row)]


def _simplex(T, basis, cost_row, allowed):
    """Bland's-rule iterations on tableau T (last row is the cost row).

    Columns not in ``allowed`` never enter.  Returns False when unbounded.
    """
    m = len(basis)
    width = len(T[0]) - 1
    while True:
        obj = T[cost_row]
        enter = next((j for j in range(width) if allowed[j] and obj[j] < 0), None)
        if enter is None:
            return True
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][width] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        leave = best[1]
        _pivot(T, leave, enter)
        basis[leave] = enter


def lp_min(objective: Sequence, polytope: Polytope) -> LpResult:
    """Minimize ``objective . x`` over ``polytope`` exactly.

    Free variables are split as x = u - w and inequalities get slacks; the
    standard-form problem is solved by the two-phase simplex method with
    Bland's anti-cycling rule.  The returned argmin is a basic solution, hence
    a vertex whenever the polytope has one.
    """
    n = polytope.dim
    c = ratvec(objective)
    if len(c) != n:
        raise ValueError(f"objective has dimension {len(c)}, polytope {n}")
    ineq, eq = polytope.inequalities, polytope.equalities
    m1, m2 = len(ineq), len(eq)
    m = m1 + m2
    if m == 0:
        if any(c):
            return LpResult("unbounded")
        return LpResult("optimal", ZERO, (ZERO,) * n)

    # columns: u (n), w (n), slacks (m1), artificials (m), rhs
    nv = 2 * n + m1
    width = nv + m
    T = []
    for i, (a, b) in enumerate(list(ineq) + list(eq)):
        row = list(a) + [-x for x in a] + [ZERO] * m1
        if i < m1:
            row[2 * n + i] = ONE
        if b < 0:
            row = [-x for x in row]
            b = -b
        row += [ZERO] * m + [b]
        row[nv + i] = ONE
        T.append(row)
    basis = [nv + i for i in range(m)]

    # phase 1: minimize the sum of artificials
    phase1 = [ZERO] * (width + 1)
    for row in T:
        for j in range(nv):
            phase1[j] -= row[j]
        phase1[width] -= row[width]
    T.append(phase1)
    _simplex(T, basis, m, [True] * nv + [False] * m)
    if T[m][width] != 0:
        return LpResult("infeasible")

    # drive remaining artificials out of the basis; drop redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= nv:
            j = next((j for j in range(nv) if T[i][j]), None)
            if j is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, i, j)
            basis[i] = j
        i += 1
    m = len(basis)
    T.pop()  # phase-1 cost row

    cost = list(c) + [-x for x in c] + [ZERO] * (width - 2 * n + 1)
    for i, bj in enumerate(basis):
        f = cost[bj]
        if f:
            cost = [a - f * b for a, b in zip(cost, T[i])]
    T.append(cost)
    if not _simplex(T, basis, m, [True] * nv + [False] * (width - nv)):
        return LpResult("unbounded")

    val = [ZERO] * nv
    for i, bj in enumerate(basis):
        val[bj] = T[i][width]
    x = tuple(val[j] - val[n + j] for j in range(n))
    return LpResult("optimal", dot(c, x), x)


def lp_feasible_point(polytope: Polytope) -> RatVec | None:
    res = lp_min((ZERO,) * polytope.dim, polytope)
    return res.argmin if res.status == "optimal" else None
