import random

import pytest
from hypothesis import given

from conftest import graphs
from oracles import max_stable_bruteforce
from qplocmin.graphs import (
    DimacsError,
    Graph,
    OracleLimitError,
    alpha,
    complement,
    complete,
    cycle,
    empty,
    enumerate_graphs,
    graph_count,
    induced_subgraph,
    is_clique,
    is_stable,
    omega,
    parse_dimacs,
    path,
    random_graph,
    to_dimacs,
)


def test_parse_k2():
    assert parse_dimacs("p edge 2 1\ne 1 2\n") == complete(2)


def test_parse_empty_graph():
    assert parse_dimacs(b"c a comment\np edge 3 0\n") == empty(3)


def test_parse_self_loop_names_line():
    with pytest.raises(DimacsError, match="line 2"):
        parse_dimacs("p edge 2 1\ne 1 1\n")


@pytest.mark.parametrize(
    "text",
    ["e 1 2\n", "p edge x 1\n", "p edge 2 1\ne 1 3\n", "p edge 2 1\nq 1 2\n", "p edge 2 1\ne 1\n", ""],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


def test_duplicate_edges_tolerated():
    assert parse_dimacs("p edge 2 2\ne 1 2\ne 2 1\n") == complete(2)


@given(graphs())
def test_dimacs_round_trip(G):
    assert parse_dimacs(to_dimacs(G)) == G


def test_complement_examples():
    assert complement(complete(3)) == empty(3)
    assert complement(empty(2)) == complete(2)
    assert complement(path(3)) == Graph(3, frozenset({(0, 2)}))


def test_induced_examples():
    assert induced_subgraph(complete(3), [0, 1]) == complete(2)
    assert induced_subgraph(path(3), [0, 2]) == empty(2)
    G = cycle(5)
    assert induced_subgraph(G, range(5)) == G
    with pytest.raises(ValueError):
        induced_subgraph(G, [])


@given(graphs())
def test_complement_involution(G):
    assert complement(complement(G)) == G


@given(graphs(), graphs().map(lambda H: H.n))
def test_induced_is_principal_submatrix(G, m):
    S = sorted(random.Random(m).sample(range(G.n), min(m, G.n)))
    A = G.adjacency
    H = induced_subgraph(G, S)
    assert H.adjacency == tuple(tuple(A[i][j] for j in S) for i in S)


def test_alpha_omega_examples():
    assert alpha(complete(3))[0] == 1
    assert alpha(empty(4))[0] == 4
    a, w = alpha(cycle(5))
    assert a == 2 and is_stable(cycle(5), w)
    assert omega(complete(3))[0] == 3
    assert omega(cycle(5))[0] == 2
    assert omega(empty(3))[0] == 1


@given(graphs())
def test_alpha_against_bruteforce(G):
    a, w = alpha(G)
    assert a == max_stable_bruteforce(G.n, G.edges)
    assert len(w) == a and is_stable(G, w)
    o, c = omega(G)
    assert o == alpha(complement(G))[0] and len(c) == o and is_clique(G, c)


def test_oracle_limit():
    with pytest.raises(OracleLimitError):
        alpha(empty(25))
    assert alpha(empty(25), limit=30)[0] == 25


@pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 8), (4, 64)])
def test_enumeration_counts(n, count):
    gs = list(enumerate_graphs(n))
    assert len(gs) == count == graph_count(n)
    assert len(set(gs)) == count
    assert [G.edge_mask() for G in gs] == list(range(count))


def test_enumeration_refuses_large_n():
    with pytest.raises(ValueError):
        next(enumerate_graphs(7))


def test_random_graph_is_seeded():
    a = [random_graph(6, random.Random(42)) for _ in range(3)]
    assert a[0] == a[1] == a[2]
