"""Exact global minimization of a quadratic over a polyhedron.

The minimizer of x^T Q x + c^T x over a polytope lies in the relative
interior of some face and is stationary on that face's affine hull, so
enumerating every active set and solving the face's stationarity system
exactly recovers it.  Cost is exponential in the number of inequalities;
:data:`DEFAULT_CAP` bounds the dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .constructions import QuarticInstance
from .exact import (
    Rat,
    ONE,
    ZERO,
    RatVec,
    SymMat,
    Verdict,
    dot,
    kernel,
    primitive,
    rank,
    ratvec,
    solve_linear_n,
)
from .graphs import Graph
from .lp import Polytope, capped_orthant, lp_min, orthant, simplex, unit

DEFAULT_CAP = 12

__all__ = [
    "DEFAULT_CAP",
    "DimensionCapError",
    "Polytope",
    "QpInstance",
    "QpResult",
    "capped_orthant",
    "cone_generators",
    "exact_qp_min",
    "is_copositive",
    "is_pd_quartic",
    "ms_max",
    "ms_argmax",
    "orthant",
    "simplex",
]


class DimensionCapError(ValueError):
    """Problem dimension exceeds the enumeration cap."""


@dataclass(frozen=True)
class QpInstance:
    """min x^T Q x + c^T x over ``feasible``."""

    Q: SymMat
    c: RatVec
    feasible: Polytope
    provenance: str = ""

    def __post_init__(self):
        c = ratvec(self.c)
        if len(c) != self.Q.dim or self.feasible.dim != self.Q.dim:
            raise ValueError("Q, c and the feasible set disagree on dimension")
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.Q.dim

    def objective(self, x: Sequence[Rat]) -> Rat:
        return self.Q.quad(x) + dot(self.c, x)

    def gradient(self, x: Sequence[Rat]) -> RatVec:
        return tuple(2 * a + b for a, b in zip(self.Q.matvec(x), self.c))


@dataclass(frozen=True)
class QpResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    value: Rat | None = None
    argmin: RatVec | None = None
    direction: RatVec | None = None  # recession ray certifying "unbounded"


def _matT_vec(cols, v):
    return tuple(dot(col, v) for col in cols)


@lru_cache(maxsize=256)
def _faces(P: Polytope):
    """Affine hulls of all candidate faces as (x0, N): x = x0 + N z.

    Faces whose hull is a single point are kept only when the point is
    feasible.
    """
    n = P.dim
    eq_rows = [a for a, _ in P.equalities]
    eq_rhs = [b for _, b in P.equalities]
    r_eq = rank(eq_rows, n)
    m = len(P.inequalities)
    out = []
    for size in range(0, min(m, n - r_eq) + 1):
        for S in combinations(range(m), size):
            rows = [P.inequalities[i][0] for i in S] + eq_rows
            rhs = [P.inequalities[i][1] for i in S] + eq_rhs
            if rows:
                sol = solve_linear_n(rows, rhs, n)
                if sol.empty:
                    continue
                x0, N = sol.particular, sol.basis
            else:
                x0, N = (ZERO,) * n, kernel([], n)
            if not N and not P.contains(x0):
                continue
            out.append((x0, N))
    return tuple(out)


def _family_point(P: Polytope, x1: RatVec, D) -> RatVec | None:
    """A point of P on the affine family x1 + span(D), via an LP in the family coordinates."""
    k = len(D)
    ineq = []
    for a, b in P.inequalities:
        ineq.append((_matT_vec(D, a), b - dot(a, x1)))
    eq = []
    for a, b in P.equalities:
        eq.append((_matT_vec(D, a), b - dot(a, x1)))
    # The objective is constant on a stationary family, so any feasible point is optimal.
    res = lp_min((ZERO,) * k, Polytope(k, tuple(ineq), tuple(eq)))
    if res.status != "optimal":
        return None
    w = res.argmin
    return tuple(x + sum((wi * d[j] for wi, d in zip(w, D)), ZERO) for j, x in enumerate(x1))


def _stationary_candidates(qp: QpInstance):
    P, Q, c = qp.feasible, qp.Q, qp.c
    for x0, N in _faces(P):
        if not N:
            yield x0
            continue
        # N^T (2 Q (x0 + N z) + c) = 0
        QN = [Q.matvec(col) for col in N]
        H = [[dot(N[a], QN[b]) for b in range(len(N))] for a in range(len(N))]
        g0 = [q + ci / 2 for q, ci in zip(Q.matvec(x0), c)]
        rhs = [-dot(col, g0) for col in N]
        sol = solve_linear_n(H, rhs, len(N))
        if sol.empty:
            continue
        z = sol.particular
        x1 = tuple(x0[j] + sum((zi * col[j] for zi, col in zip(z, N)), ZERO) for j in range(len(x0)))
        if not sol.basis:
            if P.contains(x1):
                yield x1
            continue
        D = [
            tuple(sum((ki * col[j] for ki, col in zip(kv, N)), ZERO) for j in range(len(x0)))
            for kv in sol.basis
        ]
        D = [d for d in D if any(d)]
        if not D:
            if P.contains(x1):
                yield x1
            continue
        x = _family_point(P, x1, D)
        if x is not None:
            yield x


def cone_generators(ineq_rows: Sequence, eq_rows: Sequence, n: int) -> list[RatVec]:
    """Finite generators of {d : B d <= 0, E d = 0}.

    Lineality directions appear with both signs, followed by the extreme rays
    of the pointed part; every cone element is a nonnegative combination of
    the returned vectors.  Vectors are primitive integer vectors.
    """
    B = [tuple(r) for r in ineq_rows]
    E = [tuple(r) for r in eq_rows]
    lin = [primitive(v) for v in kernel(B + E, n)]
    gens = []
    for v in lin:
        gens.append(v)
        gens.append(tuple(-x for x in v))
    base = E + lin
    need = n - 1 - rank(base, n)
    if need < 0:
        return gens
    seen = set()
    for S in combinations(range(len(B)), need):
        rows = [B[i] for i in S] + base
        ker = kernel(rows, n)
        if len(ker) != 1:
            continue
        v = primitive(ker[0])
        for s in (v, tuple(-x for x in v)):
            if s not in seen and all(dot(b, s) <= 0 for b in B):
                seen.add(s)
                gens.append(s)
    return gens


@lru_cache(maxsize=256)
def _feasible(P: Polytope) -> bool:
    return lp_min((ZERO,) * P.dim, P).status != "infeasible"


@lru_cache(maxsize=256)
def _recession(P: Polytope) -> tuple:
    return tuple(
        cone_generators([a for a, _ in P.inequalities], [a for a, _ in P.equalities], P.dim)
    )


@lru_cache(maxsize=256)
def _vertices(P: Polytope) -> tuple:
    """Vertices of P intersected with the orthogonal complement of its lineality space."""
    n = P.dim
    lin = kernel([a for a, _ in P.inequalities] + [a for a, _ in P.equalities], n)
    extra = [(v, ZERO) for v in lin]
    eq = list(P.equalities) + extra
    eq_rows = [a for a, _ in eq]
    r_eq = rank(eq_rows, n)
    out = []
    for S in combinations(range(len(P.inequalities)), n - r_eq):
        rows = [P.inequalities[i][0] for i in S] + eq_rows
        if rank(rows, n) != n:
            continue
        rhs = [P.inequalities[i][1] for i in S] + [b for _, b in eq]
        sol = solve_linear_n(rows, rhs, n)
        if sol.kind == "unique" and P.contains(sol.particular) and sol.particular not in out:
            out.append(sol.particular)
    return tuple(out)


def _combine(G, lam) -> RatVec:
    n = len(G[0])
    return tuple(sum((l * g[j] for l, g in zip(lam, G)), ZERO) for j in range(n))


def _unbounded_direction(qp: QpInstance, cap: int) -> RatVec | None:
    """A ray x + t d along which the objective tends to -infinity, if any.

    With G generating the recession cone and H = G^T Q G: either H is not
    copositive (negative curvature ray), or some zero-curvature direction has
    negative slope 2 d^T Q v + c^T d at a vertex v.  The zero-curvature set
    of a copositive H is the union over supports T of {lam >= 0 on T :
    H_T lam_T = 0}.
    """
    G = _recession(qp.feasible)
    if not G:
        return None
    H = qp.Q.congruence(G)
    cop = is_copositive(H, cap=cap)
    if not cop.holds:
        return primitive(_combine(G, cop.witness))
    m = len(G)
    for v in _vertices(qp.feasible):
        slope = _matT_vec(G, qp.gradient(v))
        if all(s >= 0 for s in slope):
            continue
        for size in range(1, m + 1):
            for T in combinations(range(m), size):
                if all(slope[i] >= 0 for i in T):
                    continue
                eq = [(tuple(H[i, j] for j in T), ZERO) for i in T]
                eq.append(((ONE,) * size, ONE))
                ineq = [(unit(size, a, -ONE), ZERO) for a in range(size)]
                res = lp_min([slope[i] for i in T], Polytope(size, tuple(ineq), tuple(eq)))
                if res.status == "optimal" and res.value < 0:
                    lam = [ZERO] * m
                    for a, i in enumerate(T):
                        lam[i] = res.argmin[a]
                    return primitive(_combine(G, lam))
    return None


def exact_qp_min(qp: QpInstance, cap: int = DEFAULT_CAP) -> QpResult:
    """Exact global minimum of a QP by active-set enumeration.

    Returns status "optimal" with the least value and (among ties) the
    lexicographically smallest candidate argmin, "unbounded" with a
    recession direction, or "infeasible".
    """
    if qp.dim > cap:
        raise DimensionCapError(f"dimension {qp.dim} exceeds cap {cap}")
    P = qp.feasible
    if not _feasible(P):
        return QpResult("infeasible")
    d = _unbounded_direction(qp, cap)
    if d is not None:
        return QpResult("unbounded", direction=d)
    best = None
    for x in _stationary_candidates(qp):
        key = (qp.objective(x), x)
        if best is None or key < best:
            best = key
    # A bounded-below QP attains its minimum, and the minimizer is a candidate.
    return QpResult("optimal", best[0], best[1])


def _simplex_qp(M: SymMat) -> QpInstance:
    return QpInstance(M, (ZERO,) * M.dim, simplex(M.dim))


def is_copositive(M: SymMat, cap: int = DEFAULT_CAP) -> Verdict:
    """Decide x^T M x >= 0 on the nonnegative orthant.

    By homogeneity it suffices to minimize over the standard simplex.  The
    failure witness is a simplex point with negative value; a negative
    diagonal entry is reported directly as a unit vector.
    """
    n = M.dim
    for i, m_ii in enumerate(M.diagonal()):
        if m_ii < 0:
            return Verdict(False, unit(n, i), m_ii)
    res = exact_qp_min(_simplex_qp(M), cap)
    if res.value >= 0:
        return Verdict(True, detail={"simplex_min": res.value, "argmin": res.argmin})
    return Verdict(False, res.argmin, res.value, {"simplex_min": res.value})


def is_pd_quartic(inst: QuarticInstance, cap: int = DEFAULT_CAP) -> Verdict:
    """Positive definiteness of p(x) = (x^2)^T M x^2.

    With y = x^2 this is strict positivity of y^T M y on the simplex.  The
    failure witness is the y-vector: any x with x^2 = y has p(x) = q(y) <= 0.
    """
    M = inst.M
    for i, m_ii in enumerate(M.diagonal()):
        if m_ii <= 0:
            return Verdict(False, unit(M.dim, i), m_ii)
    res = exact_qp_min(_simplex_qp(M), cap)
    if res.value > 0:
        return Verdict(True, detail={"simplex_min": res.value, "argmin": res.argmin})
    return Verdict(False, res.argmin, res.value, {"simplex_min": res.value})


def ms_argmax(G: Graph, cap: int = DEFAULT_CAP) -> tuple[Rat, RatVec]:
    """max x^T A x over the simplex, with a maximizer."""
    negA = SymMat.from_function(G.n, lambda i, j: -ONE if G.adjacent(i, j) else ZERO)
    res = exact_qp_min(_simplex_qp(negA), cap)
    return -res.value, res.argmin


def ms_max(G: Graph, cap: int = DEFAULT_CAP) -> Rat:
    return ms_argmax(G, cap)[0]
