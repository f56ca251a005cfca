"""Undirected simple graphs, DIMACS input and brute-force alpha/omega oracles.

Vertices are 0-based internally.  DIMACS files and JSON reports use 1-based
labels; conversion happens only at those boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

ORACLE_LIMIT = 20
ENUMERATION_LIMIT = 6


class DimacsError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class OracleLimitError(ValueError):
    """Raised when an exponential-time oracle is asked for a graph that is too large."""


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_adjacency(cls, A) -> "Graph":
        n = len(A)
        for i in range(n):
            if A[i][i]:
                raise ValueError("adjacency matrix has a nonzero diagonal")
            for j in range(n):
                if A[i][j] != A[j][i] or A[i][j] not in (0, 1):
                    raise ValueError("adjacency matrix must be symmetric 0/1")
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n) if A[i][j]))

    @property
    def adjacency(self) -> tuple:
        A = [[0] * self.n for _ in range(self.n)]
        for u, v in self.edges:
            A[u][v] = A[v][u] = 1
        return tuple(tuple(r) for r in A)

    def adjacent(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def neighbor_masks(self) -> list[int]:
        nb = [0] * self.n
        for u, v in self.edges:
            nb[u] |= 1 << v
            nb[v] |= 1 << u
        return nb

    def edge_list(self) -> list[list[int]]:
        """Sorted 1-based edge list, the report representation."""
        return [[u + 1, v + 1] for u, v in sorted(self.edges)]

    def edge_mask(self) -> int:
        """Index of this graph in :func:`enumerate_graphs` order."""
        pairs = list(combinations(range(self.n), 2))
        return sum(1 << i for i, p in enumerate(pairs) if p in self.edges)

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_list()})"


def complete(n: int) -> Graph:
    return Graph(n, frozenset(combinations(range(n), 2)))


def empty(n: int) -> Graph:
    return Graph(n)


def cycle(n: int) -> Graph:
    return Graph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def parse_dimacs(text) -> Graph:
    """Parse a DIMACS ``.col`` graph ("p edge n m" header, "e u v" lines).

    Duplicate edges are accepted; self-loops, out-of-range vertices and
    malformed lines raise :class:`DimacsError` naming the line.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii", errors="replace")
    n = None
    edges = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        tok = line.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "p":
            if n is not None:
                raise DimacsError(lineno, "duplicate problem line")
            if len(tok) != 4 or tok[1] not in ("edge", "col"):
                raise DimacsError(lineno, "malformed header, expected 'p edge <n> <m>'")
            try:
                n, m = int(tok[2]), int(tok[3])
            except ValueError:
                raise DimacsError(lineno, "malformed header, counts must be integers") from None
            if n < 1 or m < 0:
                raise DimacsError(lineno, "malformed header, need n >= 1 and m >= 0")
        elif tok[0] == "e":
            if n is None:
                raise DimacsError(lineno, "edge line before the 'p edge' header")
            if len(tok) != 3:
                raise DimacsError(lineno, "malformed edge line, expected 'e <u> <v>'")
            try:
                u, v = int(tok[1]), int(tok[2])
            except ValueError:
                raise DimacsError(lineno, "edge endpoints must be integers") from None
            if u == v:
                raise DimacsError(lineno, f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise DimacsError(lineno, f"vertex index out of range 1..{n}")
            edges.add((min(u, v) - 1, max(u, v) - 1))
        else:
            raise DimacsError(lineno, f"unknown line type {tok[0]!r}")
    if n is None:
        raise DimacsError(0, "missing 'p edge' header")
    return Graph(n, frozenset(edges))


def to_dimacs(G: Graph) -> str:
    lines = [f"p edge {G.n} {len(G.edges)}"]
    lines += [f"e {u} {v}" for u, v in G.edge_list()]
    return "\n".join(lines) + "\n"


def complement(G: Graph) -> Graph:
    return Graph(G.n, frozenset(p for p in combinations(range(G.n), 2) if p not in G.edges))


def induced_subgraph(G: Graph, S: Iterable[int]) -> Graph:
    """Subgraph on the sorted vertex set S, relabelled 0..|S|-1."""
    S = sorted(set(S))
    if not S:
        raise ValueError("induced subgraph needs a nonempty vertex set")
    if S[0] < 0 or S[-1] >= G.n:
        raise ValueError("vertex set out of range")
    pos = {v: i for i, v in enumerate(S)}
    return Graph(len(S), frozenset((pos[u], pos[v]) for u, v in G.edges if u in pos and v in pos))


def _max_stable(nb: list[int], n: int) -> int:
    best = 0
    best_size = 0

    def rec(cand: int, cur: int, size: int):
        nonlocal best, best_size
        if cand == 0:
            if size > best_size:
                best, best_size = cur, size
            return
        if size + bin(cand).count("1") <= best_size:
            return
        v = (cand & -cand).bit_length() - 1
        bit = 1 << v
        rec(cand & ~nb[v] & ~bit, cur | bit, size + 1)
        rec(cand & ~bit, cur, size)

    rec((1 << n) - 1, 0, 0)
    return best


def alpha(G: Graph, limit: int = ORACLE_LIMIT) -> tuple[int, tuple[int, ...]]:
    """Stability number with a maximum stable set as witness (branch and bound)."""
    if G.n > limit:
        raise OracleLimitError(f"alpha oracle refuses n={G.n} > {limit}")
    mask = _max_stable(G.neighbor_masks(), G.n)
    S = tuple(i for i in range(G.n) if mask >> i & 1)
    return len(S), S


def omega(G: Graph, limit: int = ORACLE_LIMIT) -> tuple[int, tuple[int, ...]]:
    """Clique number, computed as alpha of the complement."""
    if G.n > limit:
        raise OracleLimitError(f"omega oracle refuses n={G.n} > {limit}")
    return alpha(complement(G), limit)


def is_stable(G: Graph, S) -> bool:
    return all(not G.adjacent(u, v) for u, v in combinations(S, 2))


def is_clique(G: Graph, S) -> bool:
    return all(G.adjacent(u, v) for u, v in combinations(S, 2))


def graph_count(n: int) -> int:
    return 1 << (n * (n - 1) // 2)


def enumerate_graphs(n: int, start: int = 0, stop: int | None = None) -> Iterator[Graph]:
    """All labelled graphs on n vertices, by edge-mask index in [start, stop).

    Disjoint index ranges may be consumed independently.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > ENUMERATION_LIMIT:
        raise OracleLimitError(f"refusing to enumerate 2^{n * (n - 1) // 2} graphs on {n} vertices")
    pairs = list(combinations(range(n), 2))
    total = graph_count(n)
    stop = total if stop is None else min(stop, total)
    for mask in range(start, stop):
        yield Graph(n, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1))


def random_graph(n: int, rng, p: float = 0.5) -> Graph:
    """G(n, p) graph drawn with a ``random.Random``-like generator."""
    return Graph(n, frozenset(e for e in combinations(range(n), 2) if rng.random() < p))
