import os
import sys

from gmpy2 import mpq
from hypothesis import settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from qplocmin.exact import SymMat  # noqa: E402
from qplocmin.graphs import Graph  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def rationals(lo=-4, hi=4, max_den=4):
    return st.fractions(min_value=lo, max_value=hi, max_denominator=max_den).map(
        lambda f: mpq(f.numerator, f.denominator)
    )


@st.composite
def sym_matrices(draw, min_dim=1, max_dim=4, entries=None):
    n = draw(st.integers(min_dim, max_dim))
    entries = rationals() if entries is None else entries
    upper = [[draw(entries) for _ in range(i, n)] for i in range(n)]
    return SymMat(upper)


@st.composite
def graphs(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, frozenset(chosen))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
