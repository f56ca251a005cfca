"""Exact rational linear algebra.

Scalars are ``gmpy2.mpq`` (GMP rationals, always in lowest terms), vectors are
tuples of them and symmetric matrices are :class:`SymMat`.  Nothing in this
module ever touches a float.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from numbers import Rational
from typing import Iterable, Sequence

from gmpy2 import mpq

_RAT_LITERAL = re.compile(r"[+-]?\d+(/\d+)?")

Rat = mpq
RatVec = tuple  # tuple[Rat, ...]

ZERO = mpq(0)
ONE = mpq(1)


def rat(value) -> Rat:
    """Coerce an int, Rat, mpq or "p/q" string to an exact rational.

    Floats are refused on purpose; use ``mpq(x)`` explicitly when a binary
    float really is meant.
    """
    if isinstance(value, mpq):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational literal")
    if isinstance(value, str):
        value = value.strip()
        if not _RAT_LITERAL.fullmatch(value):
            raise ValueError(f"not a rational literal: {value!r}")
        return mpq(value)
    if isinstance(value, (int, Rational)) or type(value).__name__ == "mpz":
        return mpq(value)
    raise TypeError(f"not an exact rational: {value!r}")


def ratvec(values: Iterable) -> RatVec:
    v = tuple(rat(x) for x in values)
    if not v:
        raise ValueError("vectors must have positive dimension")
    return v


def fmt_rat(x) -> str:
    return str(rat(x))


def dot(u: Sequence[Rat], v: Sequence[Rat]) -> Rat:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), ZERO)


def matvec(rows: Sequence[Sequence[Rat]], v: Sequence[Rat]) -> RatVec:
    return tuple(dot(r, v) for r in rows)


class SymMat:
    """Dense symmetric matrix over the rationals.

    Only the upper triangle is stored, so the matrix is symmetric by
    construction.  Instances are immutable and hashable.
    """

    __slots__ = ("dim", "_upper", "_rows")

    def __init__(self, upper: Sequence[Sequence]):
        upper = tuple(tuple(rat(x) for x in row) for row in upper)
        n = len(upper)
        if n < 1:
            raise ValueError("SymMat needs dim >= 1")
        for i, row in enumerate(upper):
            if len(row) != n - i:
                raise ValueError(f"upper-triangle row {i} has length {len(row)}, expected {n - i}")
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "_upper", upper)
        object.__setattr__(self, "_rows", None)

    def __setattr__(self, name, value):
        raise AttributeError("SymMat is immutable")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "SymMat":
        rows = [[rat(x) for x in r] for r in rows]
        n = len(rows)
        for i, r in enumerate(rows):
            if len(r) != n:
                raise ValueError("matrix is not square")
            for j in range(i):
                if r[j] != rows[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i}, {j})")
        return cls([r[i:] for i, r in enumerate(rows)])

    @classmethod
    def from_function(cls, n: int, f) -> "SymMat":
        return cls([[f(i, j) for j in range(i, n)] for i in range(n)])

    @classmethod
    def identity(cls, n: int) -> "SymMat":
        return cls.from_function(n, lambda i, j: ONE if i == j else ZERO)

    @classmethod
    def ones(cls, n: int) -> "SymMat":
        return cls.from_function(n, lambda i, j: ONE)

    @classmethod
    def zeros(cls, n: int) -> "SymMat":
        return cls.from_function(n, lambda i, j: ZERO)

    def __getitem__(self, ij) -> Rat:
        i, j = ij
        if i > j:
            i, j = j, i
        return self._upper[i][j - i]

    def rows(self) -> list[list[Rat]]:
        """Full square table (a fresh copy each call)."""
        if self._rows is None:
            n = self.dim
            full = tuple(tuple(self[i, j] for j in range(n)) for i in range(n))
            object.__setattr__(self, "_rows", full)
        return [list(r) for r in self._rows]

    def row(self, i: int) -> RatVec:
        self.rows()
        return self._rows[i]

    def diagonal(self) -> RatVec:
        return tuple(self._upper[i][0] for i in range(self.dim))

    def matvec(self, v: Sequence[Rat]) -> RatVec:
        if len(v) != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {len(v)}")
        self.rows()
        return tuple(dot(r, v) for r in self._rows)

    def quad(self, v: Sequence[Rat]) -> Rat:
        """v^T M v."""
        return dot(v, self.matvec(v))

    def principal(self, idx: Sequence[int]) -> "SymMat":
        idx = list(idx)
        return SymMat.from_function(len(idx), lambda a, b: self[idx[a], idx[b]])

    def scaled(self, s) -> "SymMat":
        s = rat(s)
        return SymMat([[s * x for x in row] for row in self._upper])

    def __add__(self, other: "SymMat") -> "SymMat":
        if not isinstance(other, SymMat):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return SymMat([[a + b for a, b in zip(r, s)] for r, s in zip(self._upper, other._upper)])

    def __sub__(self, other: "SymMat") -> "SymMat":
        return self + other.scaled(-1)

    def __neg__(self) -> "SymMat":
        return self.scaled(-1)

    def congruence(self, cols: Sequence[Sequence[Rat]]) -> "SymMat":
        """G^T M G where ``cols`` are the columns of G."""
        mg = [self.matvec(g) for g in cols]
        return SymMat.from_function(len(cols), lambda a, b: dot(cols[a], mg[b]))

    def __eq__(self, other):
        return isinstance(other, SymMat) and self._upper == other._upper

    def __hash__(self):
        return hash(self._upper)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows())
        return f"SymMat([{body}])"


# --------------------------------------------------------------------------
# linear systems


@dataclass(frozen=True)
class SolutionSet:
    """Solution set of a rational linear system.

    ``kind`` is "unique", "affine" or "empty".  For "affine" the solutions are
    ``particular + span(basis)``; for "unique" the basis is empty.
    """

    kind: str
    particular: RatVec | None = None
    basis: tuple = ()

    @property
    def empty(self) -> bool:
        return self.kind == "empty"


def _as_rows(M) -> list[list[Rat]]:
    if isinstance(M, SymMat):
        return M.rows()
    return [[rat(x) for x in r] for r in M]


def rref(rows: list[list[Rat]], ncols: int) -> list[int]:
    """In-place reduced row echelon form on the first ``ncols`` columns.

    Returns the pivot columns; rows past ``len(pivots)`` are zero in those
    columns (any extra augmented columns are carried along).
    """
    pivots = []
    r = 0
    m = len(rows)
    for col in range(ncols):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][col]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        inv = 1 / prow[col]
        if inv != 1:
            prow[:] = [x * inv for x in prow]
        for i in range(m):
            if i != r:
                f = rows[i][col]
                if f:
                    rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivots.append(col)
        r += 1
    return pivots


def solve_linear(M, rhs: Sequence) -> SolutionSet:
    """Exact solution set of ``M x = rhs``.

    ``M`` is a SymMat or any rectangular table of rationals with
    ``len(rhs)`` rows.  Zero-row systems are allowed when the column count
    is passed through a SymMat; for plain tables the column count is taken
    from the first row.
    """
    rows = _as_rows(M)
    rhs = [rat(x) for x in rhs]
    if len(rows) != len(rhs):
        raise ValueError(f"dimension mismatch: {len(rows)} rows but {len(rhs)} right-hand sides")
    if not rows:
        raise ValueError("empty system: column count unknown, use solve_linear_n")
    return solve_linear_n(rows, rhs, len(rows[0]))


def solve_linear_n(rows, rhs, n: int) -> SolutionSet:
    """As :func:`solve_linear` with an explicit column count ``n``."""
    aug = []
    for r, b in zip(rows, rhs):
        r = list(r)
        if len(r) != n:
            raise ValueError(f"row has {len(r)} entries, expected {n}")
        aug.append(r + [b])
    pivots = rref(aug, n)
    for row in aug[len(pivots):]:
        if row[n]:
            return SolutionSet("empty")
    x = [ZERO] * n
    for i, p in enumerate(pivots):
        x[p] = aug[i][n]
    pivset = set(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        v = [ZERO] * n
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -aug[i][f]
        basis.append(tuple(v))
    return SolutionSet("unique" if not basis else "affine", tuple(x), tuple(basis))


def rank(rows, n: int) -> int:
    if not rows:
        return 0
    aug = [list(r) for r in rows]
    return len(rref(aug, n))


def kernel(rows, n: int) -> tuple:
    """Basis of {x : rows x = 0}."""
    if not rows:
        return tuple(tuple(ONE if i == j else ZERO for i in range(n)) for j in range(n))
    return solve_linear_n(rows, [ZERO] * len(rows), n).basis


def primitive(v: Sequence[Rat]) -> RatVec:
    """Scale a nonzero rational vector to a primitive integer vector.

    The sign is kept, so ``primitive(v)`` is a positive multiple of ``v``.
    """
    from math import gcd, lcm

    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for a in ints:
        g = gcd(g, a)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(mpq(a // g) for a in ints)


# --------------------------------------------------------------------------
# definiteness


@dataclass(frozen=True)
class Verdict:
    """A yes/no decision with an optional checkable witness.

    ``value`` is the exact quantity the witness certifies (for example the
    quadratic form at the witness); ``detail`` holds anything else a verifier
    may want.
    """

    holds: bool
    witness: RatVec | None = None
    value: Rat | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def _canonical_sign(v: RatVec) -> RatVec:
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def _semidefinite(M: SymMat, strict: bool) -> Verdict:
    n = M.dim
    S = M.rows()
    alive = list(range(n))
    # (pivot, {j: S[p][j] / S[p][p]}) in elimination order
    record = []

    def lift(w: dict[int, Rat]) -> RatVec:
        v = [ZERO] * n
        for j, x in w.items():
            v[j] = x
        for p, mult in reversed(record):
            v[p] = -sum((l * v[j] for j, l in mult.items()), ZERO)
        return _canonical_sign(tuple(v))

    while alive:
        bad = next((i for i in alive if S[i][i] < 0 or (strict and S[i][i] == 0)), None)
        if bad is not None:
            v = lift({bad: ONE})
            return Verdict(False, v, M.quad(v))
        p = next((i for i in alive if S[i][i] > 0), None)
        if p is None:
            # every remaining diagonal entry is zero
            for a in alive:
                for b in alive:
                    if a < b and S[a][b]:
                        v = lift({a: ONE, b: ONE if S[a][b] < 0 else -ONE})
                        return Verdict(False, v, M.quad(v))
            break
        alive.remove(p)
        piv = S[p][p]
        mult = {j: S[p][j] / piv for j in alive if S[p][j]}
        for i in alive:
            f = S[i][p]
            if f:
                Si, Sp = S[i], S[p]
                for j in alive:
                    if Sp[j]:
                        Si[j] -= f * Sp[j] / piv
        record.append((p, mult))
    return Verdict(True)


def is_psd(M: SymMat) -> Verdict:
    """Exact positive semidefiniteness test.

    On failure the witness ``v`` satisfies ``v^T M v < 0`` (reported as
    ``value``).
    """
    return _semidefinite(M, strict=False)


def is_pd(M: SymMat) -> Verdict:
    """Exact positive definiteness test; failure witness has ``v^T M v <= 0``."""
    return _semidefinite(M, strict=True)
