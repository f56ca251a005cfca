"""Local minimizers of the graph forms and of general quadratic programs.

Existence for the quartic p(x) = (x^2)^T M x^2 with noninteger k reduces to
positive definiteness of p, i.e. to strict copositivity of M.  For a general
QP a feasible point is a local minimizer exactly when it is a KKT point and Q
is copositive on the critical cone; :func:`certify_qp_point` decides that at
desk scale.  :func:`descent_falsifier` only ever proves non-minimality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from .constructions import QuarticInstance, eval_q, from_stable_set_question
from .exact import ONE, ZERO, Rat, RatVec, SymMat, Verdict, dot, is_psd, kernel, primitive, rat
from .graphs import Graph, alpha
from .lp import Polytope, capped_orthant, lp_min, orthant, simplex, unit
from .polyopt import (
    DEFAULT_CAP,
    DimensionCapError,
    QpInstance,
    cone_generators,
    exact_qp_min,
    is_copositive,
    is_pd_quartic,
)

ORIGIN_UNIQUE = "OriginUnique"
ALL_ON_HYPERPLANE = "AllOnHyperplane"


class NonintegerRequired(ValueError):
    """The existence equivalence only holds for noninteger k."""


class InfeasiblePoint(ValueError):
    pass


@dataclass(frozen=True)
class SupportSet:
    indices: tuple
    witness: RatVec  # y > 0 on the support with M_S y = 0


@dataclass(frozen=True)
class LocalMinCertificate:
    kind: str  # OriginPD | KKT+ConeCopositive | DescentSequence | SupportAnalysis
    payload: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExistenceAnswer:
    answer: bool
    strict: bool | None
    cert: LocalMinCertificate

    def __bool__(self):
        return self.answer


# --------------------------------------------------------------------------
# quartic forms


def _require_noninteger(inst: QuarticInstance):
    if inst.integer_k:
        raise NonintegerRequired(
            f"k = {inst.k} is an integer; the existence criterion only holds for noninteger k"
        )


def enumerate_sos_supports(inst: QuarticInstance, cap: int = DEFAULT_CAP) -> list[SupportSet]:
    """Supports of the nonzero second-order points of p.

    S qualifies when M_S is PSD and some y > 0 on S has M_S y = 0 and
    (M y)_j >= 0 for every j outside S.  Then x = sqrt(y) (zero off S) has
    zero gradient and Hessian blockdiag(8 D M_S D, 4 Diag((M y)_j)) with
    D = Diag(x_S), which is PSD; conversely every nonzero second-order point
    gives such a y = x^2.  Positivity is decided with an LP over the kernel
    (scaled so y >= 1).
    """
    M = inst.M
    n = M.dim
    if n > cap:
        raise DimensionCapError(f"dimension {n} exceeds cap {cap}")
    out = []
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            MS = M.principal(S)
            if not is_psd(MS).holds:
                continue
            K = kernel(MS.rows(), size)
            if not K:
                continue
            # y = sum_w w_b K_b with y_i >= 1 and (M y)_j >= 0 off S
            ineq = [(tuple(-v[i] for v in K), -ONE) for i in range(size)]
            for j in range(n):
                if j not in S:
                    row = [M[j, s] for s in S]
                    ineq.append((tuple(-dot(row, v) for v in K), ZERO))
            res = lp_min((ZERO,) * len(K), Polytope(len(K), tuple(ineq)))
            if res.status != "optimal":
                continue
            y = tuple(sum((w * v[i] for w, v in zip(res.argmin, K)), ZERO) for i in range(size))
            out.append(SupportSet(S, primitive(y)))
    return out


def has_local_min_quartic(inst: QuarticInstance, cap: int = DEFAULT_CAP) -> ExistenceAnswer:
    """Does p(x) = (x^2)^T M x^2 have a local minimizer?  (k must be noninteger.)

    Yes exactly when p is positive definite; the origin is then a strict
    local minimizer.  Otherwise the certificate lists the (empty) set of
    candidate second-order supports together with y >= 0 where q(y) < 0, so
    p(sqrt(s*y)) = s^2 q(y) < 0 arbitrarily close to the origin.
    """
    _require_noninteger(inst)
    pd = is_pd_quartic(inst, cap)
    if pd.holds:
        cert = LocalMinCertificate(
            "OriginPD", {"simplex_min": pd.detail["simplex_min"], "argmin": pd.detail["argmin"]}
        )
        return ExistenceAnswer(True, True, cert)
    cop = is_copositive(inst.M, cap)
    payload = {"supports": [s.indices for s in enumerate_sos_supports(inst, cap)]}
    if not cop.holds:
        payload["witness_y"] = cop.witness
        payload["value"] = cop.value
    return ExistenceAnswer(False, None, LocalMinCertificate("SupportAnalysis", payload))


def orthant_qp(inst: QuarticInstance) -> QpInstance:
    """min q(x) s.t. x >= 0."""
    tag = f"qp-orthant k={inst.k}" + (f" r={inst.r}" if inst.r is not None else "")
    return QpInstance(inst.M, (ZERO,) * inst.n, orthant(inst.n), tag)


def bounded_qp(inst: QuarticInstance, t) -> QpInstance:
    """min q(x) s.t. x >= 0, sum(x) <= t."""
    t = rat(t)
    if t <= 0:
        raise ValueError("the bound t must be positive (t = 0 leaves only the origin)")
    tag = f"bounded-qp k={inst.k} t={t}" + (f" r={inst.r}" if inst.r is not None else "")
    return QpInstance(inst.M, (ZERO,) * inst.n, capped_orthant(inst.n, t), tag)


def has_local_min_qp_orthant(G: Graph, r: int, cap: int = DEFAULT_CAP) -> ExistenceAnswer:
    """Does min q(x) over x >= 0 (k = r - 1/2) have a local minimizer?

    x is a local minimizer of the QP iff sqrt(x) is one of p, and x <-> x^2
    maps local minimizers both ways, so the answer is the quartic one.
    """
    if not 1 <= r <= G.n:
        raise ValueError(f"r must lie in 1..{G.n}, got {r}")
    inst = from_stable_set_question(G, r)
    ans = has_local_min_quartic(inst, cap)
    payload = dict(ans.cert.payload)
    payload["via"] = "quartic"
    return ExistenceAnswer(ans.answer, ans.strict, LocalMinCertificate(ans.cert.kind, payload))


# --------------------------------------------------------------------------
# certification of a given point


def _box(n: int):
    rows = []
    for i in range(n):
        rows.append((unit(n, i), ONE))
        rows.append((unit(n, i, -ONE), ONE))
    return rows


def _kkt_multipliers(g, B, E, n):
    """lam >= 0, mu free with g + B^T lam + E^T mu = 0, or None."""
    nb, ne = len(B), len(E)
    if nb + ne == 0:
        return ((), ()) if not any(g) else None
    m = nb + ne
    eq = []
    for j in range(n):
        eq.append((tuple(b[j] for b in B) + tuple(e[j] for e in E), -g[j]))
    ineq = tuple((unit(m, i, -ONE), ZERO) for i in range(nb))
    res = lp_min((ZERO,) * m, Polytope(m, ineq, tuple(eq)))
    if res.status != "optimal":
        return None
    return res.argmin[:nb], res.argmin[nb:]


def certify_qp_point(qp: QpInstance, x: Sequence, cap: int = DEFAULT_CAP) -> Verdict:
    """Exact local-minimality test for a feasible point of a QP.

    First order: min g.d over the tangent cone (boxed) must be 0.  Second
    order: with G generating the critical cone {d tangent, g.d = 0}, the
    matrix G^T Q G must be copositive.  On failure ``witness`` is a feasible
    direction d with f(x + s d) < f(x) for all small s > 0.
    """
    n = qp.dim
    if n > cap:
        raise DimensionCapError(f"dimension {n} exceeds cap {cap}")
    x = tuple(rat(v) for v in x)
    if len(x) != n:
        raise ValueError("point has the wrong dimension")
    P = qp.feasible
    if not P.contains(x):
        raise InfeasiblePoint("point is not feasible")
    g = qp.gradient(x)
    active = P.active(x)
    B = [P.inequalities[i][0] for i in active]
    E = [a for a, _ in P.equalities]

    tangent = Polytope(n, tuple((b, ZERO) for b in B) + tuple(_box(n)), tuple((e, ZERO) for e in E))
    first = lp_min(g, tangent)
    if first.value < 0:
        d = primitive(first.argmin)
        cert = LocalMinCertificate("DescentSequence", {"direction": d, "order": 1, "slope": dot(g, d)})
        return Verdict(False, d, dot(g, d), {"reason": "first-order", "certificate": cert})

    mult = _kkt_multipliers(g, B, E, n)
    if mult is None:  # cannot happen by LP duality with the first-order test
        raise RuntimeError("first-order test passed but no KKT multipliers exist")
    lam, mu = mult
    gens = cone_generators(B, E + ([g] if any(g) else []), n)
    payload = {
        "active": tuple(active),
        "multipliers": lam,
        "eq_multipliers": mu,
        "generators": tuple(gens),
    }
    if not gens:
        payload["strict"] = True
        return Verdict(True, detail={"certificate": LocalMinCertificate("KKT+ConeCopositive", payload)})
    H = qp.Q.congruence(gens)
    cop = is_copositive(H, cap=max(cap, H.dim))
    if not cop.holds:
        d = primitive(tuple(sum((l * gv[j] for l, gv in zip(cop.witness, gens)), ZERO) for j in range(n)))
        cert = LocalMinCertificate("DescentSequence", {"direction": d, "order": 2, "curvature": qp.Q.quad(d)})
        return Verdict(False, d, qp.Q.quad(d), {"reason": "second-order", "certificate": cert})
    payload["strict"] = bool(cop.detail.get("simplex_min", ZERO) > 0) or None
    return Verdict(True, detail={"certificate": LocalMinCertificate("KKT+ConeCopositive", payload)})


# --------------------------------------------------------------------------
# falsifier


@dataclass(frozen=True)
class ImprovingPoint:
    """Exactly checked points y_j with |y_j - x| <= radius_j and f(y_j) < f(x)."""

    x: RatVec
    steps: tuple  # (radius, y, f(y) - f(x))

    found = True


@dataclass(frozen=True)
class GiveUp:
    """No improving point found at ``radius``.  Not a proof of local minimality."""

    x: RatVec
    radius: Rat
    steps: tuple = ()

    found = False


def default_radii(count: int = 20) -> list[Rat]:
    return [mpq(1, 2**j) for j in range(1, count + 1)]


def _exact(v) -> Rat:
    if isinstance(v, float):
        return mpq(v)
    return rat(v)


class _Direction:
    __slots__ = ("d", "slope", "curv", "smax", "norm2", "norm_f")

    def __init__(self, qp, x, g, d):
        P = qp.feasible
        self.d = d
        self.slope = dot(g, d)
        self.curv = qp.Q.quad(d)
        smax = None
        for a, b in P.inequalities:
            ad = dot(a, d)
            if ad > 0:
                s = (b - dot(a, x)) / ad
                smax = s if smax is None or s < smax else smax
        self.smax = smax
        self.norm2 = dot(d, d)
        self.norm_f = math.sqrt(float(self.norm2))

    def step(self, radius: Rat) -> Rat | None:
        """Largest convenient s with |s d| <= radius and x + s d feasible."""
        if self.norm2 == 0 or (self.smax is not None and self.smax <= 0):
            return None
        s = mpq(float(radius) / self.norm_f * (1 - 1e-12))
        while s * s * self.norm2 > radius * radius:
            s /= 2
        if self.smax is not None and s > self.smax:
            s = self.smax
        return s if s > 0 else None


def _candidate_directions(qp: QpInstance, x: RatVec, g: RatVec, rng, n_random: int):
    """Float search directions, most promising first.

    Scaling along x (the forms are homogeneous), the projected negative
    gradient, 0/1 indicator directions of vertex subsets, coordinate and
    pairwise-exchange directions (tangent to sum(x) = const), then random
    Gaussian directions.
    """
    n = qp.dim
    xf = np.array([float(v) for v in x])
    gf = np.array([float(v) for v in g])
    if np.any(xf):
        yield -xf
        yield xf
    act = [np.array([float(v) for v in qp.feasible.inequalities[i][0]]) for i in qp.feasible.active(x)]
    d = -gf
    for _ in range(3):
        for a in act:
            ad = a @ d
            if ad > 0:
                d = d - ad / (a @ a) * a
    if np.any(d):
        yield d
    if n <= 8:
        for size in range(1, n + 1):
            for S in combinations(range(n), size):
                v = np.zeros(n)
                v[list(S)] = 1.0
                yield v
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        yield -e
    for i, j in combinations(range(n), 2):
        e = np.zeros(n)
        e[i], e[j] = 1.0, -1.0
        yield e
        yield -e
    for _ in range(n_random):
        yield rng.standard_normal(n)


def descent_falsifier(
    qp: QpInstance,
    x: Sequence,
    radii: Sequence | None = None,
    *,
    seed: int = 0,
    n_random: int = 32,
    tol: float = 1e-9,
):
    """Search for strictly improving feasible points in shrinking balls around x.

    Returns :class:`ImprovingPoint` when every radius in the schedule (default
    2^-1 .. 2^-20) has an exactly verified improving point, otherwise
    :class:`GiveUp` naming the first radius that failed.  Directions are
    chosen in floating point but every accepted point is rational and is
    re-checked exactly.  It must be feasible and lie within the radius, and
    its objective must be strictly below the value at x (x taken as the
    exact value of its entries).
    """
    radii = [rat(r) if not isinstance(r, float) else mpq(r) for r in (radii or default_radii())]
    x = tuple(_exact(v) for v in x)
    n = qp.dim
    if len(x) != n:
        raise ValueError("point has the wrong dimension")
    P = qp.feasible
    for a, b in P.inequalities:
        if float(dot(a, x)) > float(b) + tol:
            raise InfeasiblePoint("point violates an inequality beyond tolerance")
    for a, b in P.equalities:
        if abs(float(dot(a, x)) - float(b)) > tol:
            raise InfeasiblePoint("point violates an equality beyond tolerance")
    E = [a for a, _ in P.equalities]
    N = kernel(E, n) if E else None
    if N is not None and not N:
        return GiveUp(x, radii[0])
    Nf = np.array([[float(v) for v in col] for col in N]).T if N else None

    rng = np.random.default_rng(seed)
    g = qp.gradient(x)
    f0 = qp.objective(x)
    source = _candidate_directions(qp, x, g, rng, n_random)
    cache: list[_Direction] = []
    exhausted = False

    def directions():
        nonlocal exhausted
        yield from cache
        while not exhausted:
            df = next(source, None)
            if df is None:
                exhausted = True
                return
            if N is not None:
                z, *_ = np.linalg.lstsq(Nf, df, rcond=None)
                zr = [mpq(float(v)) for v in z]
                d = tuple(sum((zi * col[j] for zi, col in zip(zr, N)), ZERO) for j in range(n))
            else:
                d = tuple(mpq(float(v)) for v in df)
            if not any(d):
                continue
            dd = _Direction(qp, x, g, d)
            cache.append(dd)
            yield dd

    steps = []
    for radius in radii:
        hit = None
        for dd in directions():
            s = dd.step(radius)
            if s is None:
                continue
            if s * dd.slope + s * s * dd.curv >= 0:
                continue
            # re-check from scratch, independently of the direction bookkeeping
            y = tuple(xi + s * di for xi, di in zip(x, dd.d))
            diff = [a - b for a, b in zip(y, x)]
            fy = qp.objective(y)
            if fy < f0 and P.contains(y) and dot(diff, diff) <= radius * radius:
                hit = (radius, y, fy - f0)
                break
        if hit is None:
            return GiveUp(x, radius, tuple(steps))
        steps.append(hit)
    return ImprovingPoint(x, tuple(steps))


# --------------------------------------------------------------------------
# bounded instances


def dyadic_bound(c, n: int, bits: int = 16) -> Rat:
    """Smallest multiple of 2^-bits that is >= 3 c^n sqrt(n)."""
    c = rat(c)
    if c < 0:
        raise ValueError("c must be nonnegative")
    D = 1 << bits
    # N^2 >= 9 c^(2n) n D^2
    target = 9 * c ** (2 * n) * n * D * D
    num, den = int(target.numerator), int(target.denominator)
    N = math.isqrt(num // den)
    while N * N * den < num:
        N += 1
    while N > 0 and (N - 1) * (N - 1) * den >= num:
        N -= 1
    return mpq(N, D)


@dataclass(frozen=True)
class BoundedClassification:
    case: str
    k: Rat
    t: Rat
    alpha: int
    alpha_witness: tuple
    confirmed: bool | None
    detail: dict = field(default_factory=dict)


def _sample_points(rng, n: int, t: Rat, count: int, strict: bool, nonzero: bool):
    """Exact dyadic feasible points of {x >= 0, sum x <= t}.

    With ``strict`` every point has sum(x) < t; otherwise some are placed
    on the hyperplane.  About a third of the points lie on a face x_i = 0.
    """
    D = 1 << 16
    out = []
    while len(out) < count:
        X = rng.integers(0, D + 1, size=n)
        if rng.random() < 1 / 3:
            X[rng.random(n) < 0.5] = 0
        if nonzero and not X.any():
            continue
        if not strict and X.any() and rng.random() < 0.25:
            s = int(X.sum())
            out.append(tuple(mpq(int(v), s) * t for v in X))
        else:
            out.append(tuple(mpq(int(v), D) * t / (n + 1) for v in X))
    return out


def classify_bounded_instance(
    G: Graph,
    r: int,
    t,
    *,
    cap: int = DEFAULT_CAP,
    samples: int = 100,
    probes: int = 0,
    seed: int = 0,
) -> BoundedClassification:
    """Which structural case min q(x), x >= 0, sum x <= t falls in (k = r - 1/2).

    OriginUnique when alpha(G) <= r - 1: the origin is then the only local
    minimizer.  AllOnHyperplane otherwise: every local minimizer has
    sum(x) = t.  When n <= cap the verdict is confirmed empirically: the
    origin is certified (plus ``probes`` falsifier runs from random nonzero
    points), or every one of ``samples`` points with sum(x) < t is shown not
    to be a local minimizer.
    """
    t = rat(t)
    if t <= 0:
        raise ValueError("the bound t must be positive (t = 0 leaves only the origin)")
    inst = from_stable_set_question(G, r)
    a, witness = alpha(G)
    case = ORIGIN_UNIQUE if a <= r - 1 else ALL_ON_HYPERPLANE
    qp = bounded_qp(inst, t)
    detail = {}
    confirmed = None
    if G.n <= cap:
        rng = np.random.default_rng(seed)
        if case == ORIGIN_UNIQUE:
            v = certify_qp_point(qp, (ZERO,) * G.n, cap)
            detail["origin_certified"] = v.holds
            escaped = 0
            for i, x in enumerate(_sample_points(rng, G.n, t, probes, strict=False, nonzero=True)):
                if not descent_falsifier(qp, x, seed=seed + i).found:
                    escaped += 1
            detail["probes"] = probes
            detail["probes_not_falsified"] = escaped
            confirmed = v.holds and escaped == 0
        else:
            pts = [(ZERO,) * G.n] + _sample_points(rng, G.n, t, max(samples - 1, 0), strict=True, nonzero=True)
            falsified = sum(descent_falsifier(qp, x, seed=seed + i).found for i, x in enumerate(pts))
            detail["samples"] = len(pts)
            detail["falsified"] = falsified
            best = exact_qp_min(qp, cap)
            detail["global_min"] = best.value
            detail["global_argmin"] = best.argmin
            confirmed = falsified == len(pts) and sum(best.argmin) == t
    return BoundedClassification(case, inst.k, t, a, witness, confirmed, detail)


# --------------------------------------------------------------------------
# certificate checking


def verify_certificate(subject, cert: LocalMinCertificate, point: Sequence | None = None, cap: int = DEFAULT_CAP) -> bool:
    """Re-check a certificate in exact arithmetic.

    ``subject`` is the QuarticInstance for OriginPD / SupportAnalysis and the
    QpInstance (with ``point``) for KKT+ConeCopositive / DescentSequence.
    """
    p = cert.payload
    if cert.kind == "OriginPD":
        y = p["argmin"]
        if any(v < 0 for v in y) or sum(y) != 1 or eval_q(subject, y) != p["simplex_min"]:
            return False
        return p["simplex_min"] > 0 and exact_qp_min(
            QpInstance(subject.M, (ZERO,) * subject.n, simplex(subject.n)), cap
        ).value == p["simplex_min"]
    if cert.kind == "SupportAnalysis":
        y = p.get("witness_y")
        if y is None or any(v < 0 for v in y) or eval_q(subject, y) != p["value"] or p["value"] >= 0:
            return False
        return [s.indices for s in enumerate_sos_supports(subject, cap)] == list(p["supports"])
    qp, x = subject, tuple(rat(v) for v in point)
    if not qp.feasible.contains(x):
        return False
    g = qp.gradient(x)
    if cert.kind == "DescentSequence":
        d = p["direction"]
        B = [qp.feasible.inequalities[i][0] for i in qp.feasible.active(x)]
        if any(dot(b, d) > 0 for b in B) or any(dot(a, d) != 0 for a, _ in qp.feasible.equalities):
            return False
        slope, curv = dot(g, d), qp.Q.quad(d)
        return slope < 0 or (slope == 0 and curv < 0)
    if cert.kind == "KKT+ConeCopositive":
        active = list(p["active"])
        if active != qp.feasible.active(x):
            return False
        lam, mu = p["multipliers"], p["eq_multipliers"]
        if any(v < 0 for v in lam):
            return False
        B = [qp.feasible.inequalities[i][0] for i in active]
        E = [a for a, _ in qp.feasible.equalities]
        resid = list(g)
        for l, b in zip(lam, B):
            resid = [r + l * bj for r, bj in zip(resid, b)]
        for m_, e in zip(mu, E):
            resid = [r + m_ * ej for r, ej in zip(resid, e)]
        if any(resid):
            return False
        gens = p["generators"]
        for d in gens:
            if any(dot(b, d) > 0 for b in B) or any(dot(e, d) for e in E) or dot(g, d):
                return False
        # the generators must span the whole critical cone: compare against a fresh computation
        fresh = cone_generators(B, E + ([g] if any(g) else []), qp.dim)
        if sorted(fresh) != sorted(gens):
            return False
        return not gens or is_copositive(qp.Q.congruence(gens), cap=max(cap, len(gens))).holds
    raise ValueError(f"unknown certificate kind {cert.kind!r}")
