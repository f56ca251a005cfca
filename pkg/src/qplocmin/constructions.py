"""The graph matrix M = kA + kI - J and the forms built on it.

q(x) = x^T M x is the quadratic form, p(x) = (x*x)^T M (x*x) the quartic one.
Everything is exact; square roots never appear because p(x) = q(x*x).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .exact import Rat, ONE, SymMat, RatVec, dot, rat
from .graphs import Graph


@dataclass(frozen=True)
class QuarticInstance:
    M: SymMat
    k: Rat
    graph: Graph
    r: int | None = None

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def integer_k(self) -> bool:
        """True when k is an integer; the existence equivalences need k noninteger."""
        return self.k.denominator == 1


def graph_matrix(G: Graph, k) -> SymMat:
    k = rat(k)
    return SymMat.from_function(G.n, lambda i, j: k - 1 if i == j or G.adjacent(i, j) else -ONE)


def build(G: Graph, k, r: int | None = None) -> QuarticInstance:
    """Instance for graph G and scalar k > 0."""
    k = rat(k)
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    return QuarticInstance(graph_matrix(G, k), k, G, r)


def from_stable_set_question(G: Graph, r: int) -> QuarticInstance:
    """Reduction instance for "does G have a stable set of size r?": k = r - 1/2."""
    if not 1 <= r <= G.n:
        raise ValueError(f"r must lie in 1..{G.n}, got {r}")
    return build(G, mpq(2 * r - 1, 2), r)


def _check(inst: QuarticInstance, x: Sequence) -> list[Rat]:
    x = [rat(v) for v in x]
    if len(x) != inst.M.dim:
        raise ValueError(f"dimension mismatch: instance has n={inst.M.dim}, point has {len(x)}")
    return x


def eval_q(inst: QuarticInstance, x: Sequence) -> Rat:
    return inst.M.quad(_check(inst, x))


def eval_p(inst: QuarticInstance, x: Sequence) -> Rat:
    x = _check(inst, x)
    return inst.M.quad([v * v for v in x])


def grad_p(inst: QuarticInstance, x: Sequence) -> RatVec:
    """4 x * (M x^2)."""
    x = _check(inst, x)
    Mx2 = inst.M.matvec([v * v for v in x])
    return tuple(4 * a * b for a, b in zip(x, Mx2))


def hess_p(inst: QuarticInstance, x: Sequence) -> SymMat:
    """8 M * x x^T + 4 Diag(M x^2)."""
    x = _check(inst, x)
    Mx2 = inst.M.matvec([v * v for v in x])
    M = inst.M
    return SymMat.from_function(
        M.dim, lambda i, j: 8 * M[i, j] * x[i] * x[j] + (4 * Mx2[i] if i == j else 0)
    )


def euler_residual(inst: QuarticInstance, x: Sequence) -> Rat:
    """x . grad p(x) - 4 p(x); identically zero for a quartic form."""
    return dot(_check(inst, x), grad_p(inst, x)) - 4 * eval_p(inst, x)
