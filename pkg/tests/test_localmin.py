import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from conftest import graphs, sym_matrices
from oracles import frac, naive_qp_min, vertices
from qplocmin.constructions import build, from_stable_set_question, grad_p, hess_p
from qplocmin.exact import SymMat, dot, is_psd
from qplocmin.graphs import Graph, alpha, complete, cycle, empty
from qplocmin.localmin import (
    ALL_ON_HYPERPLANE,
    ORIGIN_UNIQUE,
    GiveUp,
    ImprovingPoint,
    InfeasiblePoint,
    NonintegerRequired,
    bounded_qp,
    certify_qp_point,
    classify_bounded_instance,
    default_radii,
    descent_falsifier,
    dyadic_bound,
    enumerate_sos_supports,
    has_local_min_qp_orthant,
    has_local_min_quartic,
    orthant_qp,
    verify_certificate,
)
from qplocmin.lp import Polytope, orthant
from qplocmin.polyopt import QpInstance, exact_qp_min, is_copositive

HALF = mpq(1, 2)
MURTY = QpInstance(SymMat.from_rows([[0, 1], [1, -2]]), (0, 0), orthant(2), "murty")


def test_quartic_existence_examples():
    ans = has_local_min_quartic(from_stable_set_question(complete(2), 2))
    assert ans.answer and ans.strict and ans.cert.kind == "OriginPD"
    ans = has_local_min_quartic(from_stable_set_question(empty(2), 1))
    assert not ans.answer and ans.cert.kind == "SupportAnalysis"
    assert ans.cert.payload["supports"] == []
    ans = has_local_min_quartic(from_stable_set_question(complete(3), 2))
    assert ans.answer and ans.strict


def test_integer_k_refused():
    with pytest.raises(NonintegerRequired):
        has_local_min_quartic(build(complete(2), 2))


def test_sos_support_examples():
    sup = enumerate_sos_supports(build(Graph(1), 1))
    assert [s.indices for s in sup] == [(0,)] and sup[0].witness == (1,)
    assert enumerate_sos_supports(build(complete(2), mpq(3, 2))) == []
    assert enumerate_sos_supports(build(empty(2), HALF)) == []


def test_orthant_examples():
    assert has_local_min_qp_orthant(complete(2), 2).answer
    assert not has_local_min_qp_orthant(empty(2), 1).answer
    assert has_local_min_qp_orthant(cycle(5), 3).answer
    with pytest.raises(ValueError):
        has_local_min_qp_orthant(cycle(5), 0)


def test_certify_murty_point():
    v = certify_qp_point(MURTY, (1, 0))
    assert v.holds
    cert = v.detail["certificate"]
    assert cert.kind == "KKT+ConeCopositive" and verify_certificate(MURTY, cert, (1, 0))


def test_certify_murty_descent():
    v = certify_qp_point(MURTY, (0, 1))
    assert not v.holds and v.witness == (0, 1)
    assert MURTY.objective((0, 1)) == -2
    cert = v.detail["certificate"]
    assert cert.kind == "DescentSequence" and verify_certificate(MURTY, cert, (0, 1))


def test_certify_bounded_origin():
    qp = bounded_qp(from_stable_set_question(complete(2), 2), 1)
    v = certify_qp_point(qp, (0, 0))
    assert v.holds and v.detail["certificate"].payload["strict"] is True


def test_certify_rejects_infeasible():
    with pytest.raises(InfeasiblePoint):
        certify_qp_point(MURTY, (-1, 0))


def test_falsifier_examples():
    qp = bounded_qp(from_stable_set_question(empty(2), 1), 1)
    res = descent_falsifier(qp, (0.25, 0.25))
    assert isinstance(res, ImprovingPoint) and len(res.steps) == 20
    f0 = qp.objective(res.x)
    for radius, y, gain in res.steps:
        diff = [a - b for a, b in zip(y, res.x)]
        assert qp.feasible.contains(y) and dot(diff, diff) <= radius * radius
        assert qp.objective(y) - f0 == gain < 0
    qp = bounded_qp(from_stable_set_question(complete(2), 2), 1)
    assert isinstance(descent_falsifier(qp, (0, 0)), GiveUp)
    # strict interior global minimizer of a convex QP
    qp = QpInstance(SymMat.identity(2), (-2, -2), Polytope(2, (((1, 1), 10),)))
    assert not descent_falsifier(qp, (1, 1)).found


def test_falsifier_is_seeded():
    qp = bounded_qp(from_stable_set_question(cycle(4), 1), 1)
    a = descent_falsifier(qp, (0.1, 0.2, 0.05, 0.1), seed=3)
    b = descent_falsifier(qp, (0.1, 0.2, 0.05, 0.1), seed=3)
    assert a == b


def test_default_radii():
    r = default_radii()
    assert r[0] == HALF and r[-1] == mpq(1, 2**20) and len(r) == 20


def test_dyadic_bound():
    assert dyadic_bound(1, 4) == 6
    b = dyadic_bound(1, 2)
    # 3 sqrt 2 < b and b - 2^-16 < 3 sqrt 2
    assert b * b >= 18 and (b - mpq(1, 2**16)) ** 2 < 18
    assert b.denominator <= 2**16
    assert dyadic_bound(mpq(1, 2), 3, bits=4) == mpq(11, 16)


def test_classify_examples():
    c = classify_bounded_instance(complete(2), 2, 1)
    assert c.case == ORIGIN_UNIQUE and c.confirmed
    c = classify_bounded_instance(empty(2), 1, 1)
    assert c.case == ALL_ON_HYPERPLANE and c.confirmed
    assert c.detail["global_min"] == mpq(-3, 4) and c.detail["global_argmin"] == (HALF, HALF)
    c = classify_bounded_instance(complete(3), 2, 5)
    assert c.case == ORIGIN_UNIQUE and c.confirmed and c.alpha == 1
    with pytest.raises(ValueError):
        classify_bounded_instance(complete(2), 1, 0)


def test_bounded_empty_two_unique_minimizer():
    qp = bounded_qp(from_stable_set_question(empty(2), 1), 1)
    assert certify_qp_point(qp, (HALF, HALF)).holds
    # any other point on the segment is not a local minimizer
    for s in (0, mpq(1, 4), mpq(3, 4), 1):
        assert not certify_qp_point(qp, (s, 1 - s)).holds
    assert not certify_qp_point(qp, (0, 0)).holds


@settings(max_examples=40)
@given(graphs(max_n=5), st.data())
def test_origin_certificate_matches_copositivity(G, data):
    r = data.draw(st.integers(1, G.n))
    inst = from_stable_set_question(G, r)
    v = certify_qp_point(orthant_qp(inst), (0,) * G.n)
    assert v.holds == is_copositive(inst.M).holds == (alpha(G)[0] <= r - 1)
    assert verify_certificate(orthant_qp(inst), v.detail["certificate"], (0,) * G.n)


@settings(max_examples=40)
@given(graphs(max_n=5), st.data())
def test_quartic_certificates_verify(G, data):
    r = data.draw(st.integers(1, G.n))
    inst = from_stable_set_question(G, r)
    ans = has_local_min_quartic(inst)
    assert ans.answer == (alpha(G)[0] <= r - 1)
    assert verify_certificate(inst, ans.cert)
    assert has_local_min_qp_orthant(G, r).answer == ans.answer


def _is_square(q):
    from gmpy2 import is_square

    return is_square(q.numerator) and is_square(q.denominator)


@settings(max_examples=40)
@given(graphs(max_n=5), st.integers(1, 11))
def test_sos_supports_are_second_order_supports(G, twice_k):
    k = mpq(twice_k, 2)
    inst = build(G, k)
    sup = enumerate_sos_supports(inst)
    if alpha(G)[0] > k and not inst.integer_k:
        assert sup == []
    for s in sup:
        MS = inst.M.principal(s.indices)
        assert is_psd(MS).holds
        assert min(s.witness) > 0 and all(v == 0 for v in MS.matvec(s.witness))
        if all(_is_square(v) for v in s.witness):
            from gmpy2 import isqrt

            x = [mpq(0)] * G.n
            for i, y in zip(s.indices, s.witness):
                x[i] = mpq(isqrt(y.numerator), isqrt(y.denominator))
            assert all(g == 0 for g in grad_p(inst, x))
            assert is_psd(hess_p(inst, x)).holds


@st.composite
def small_qps_with_points(draw):
    n = draw(st.integers(1, 2))
    Q = draw(sym_matrices(min_dim=n, max_dim=n, entries=st.integers(-2, 2).map(mpq)))
    c = tuple(mpq(draw(st.integers(-2, 2))) for _ in range(n))
    ineq = [(tuple(-1 if j == i else 0 for j in range(n)), 0) for i in range(n)]
    ineq.append(((1,) * n, draw(st.integers(1, 3))))
    qp = QpInstance(Q, c, Polytope(n, tuple(ineq)))
    pts = list(vertices(n, qp.feasible.inequalities, ()))
    best = exact_qp_min(qp)
    pts.append(tuple(frac(v) for v in best.argmin))
    pts.append(tuple(frac(v) for v in (mpq(1, 3),) * n))
    x = draw(st.sampled_from(pts))
    return qp, tuple(mpq(v.numerator, v.denominator) for v in x)


@settings(max_examples=30)
@given(small_qps_with_points())
def test_certify_against_local_box_minimum(case):
    qp, x = case
    v = certify_qp_point(qp, x)
    assert verify_certificate(qp, v.detail["certificate"], x)
    n = qp.dim
    eps = mpq(1, 1000)
    box = []
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        box.append((e, x[i] + eps))
        box.append((tuple(-t for t in e), -x[i] + eps))
    local = naive_qp_min(qp.Q.rows(), qp.c, n, list(qp.feasible.inequalities) + box, [])
    fx = frac(qp.objective(x))
    assert v.holds == (local == fx)
    if v.holds:
        assert not descent_falsifier(qp, x).found
