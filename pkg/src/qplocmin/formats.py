"""Plain-text instance files and JSON rendering.

QP instance (one record per line, ``#`` starts a comment line)::

    qp <n> <m>
    provenance <free text>            (optional)
    Q <n rationals>                   (n lines, must be symmetric)
    c <n rationals>
    a <n rationals> <= <rational>     (m lines; sense is <=, >= or =)

Quartic instance::

    quartic <n>
    k <rational>
    r <integer or ->
    edges <u-v ...>                   (1-based, may be empty)
    M <n rationals>                   (n lines, must equal kA + kI - J)

Rationals are written ``p/q`` or as integers.  Writing and re-reading either
format reproduces the in-memory object exactly ("a ... >= b" rows are stored
as their negated "<=" form, so only files we wrote round-trip byte for byte).
"""

from __future__ import annotations

import dataclasses
import json

from gmpy2 import mpq

from .constructions import QuarticInstance, build
from .exact import SymMat, rat
from .graphs import Graph
from .lp import Polytope
from .polyopt import QpInstance


class InstanceFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _fmt(values) -> str:
    return " ".join(str(rat(v)) for v in values)


def _rats(tokens, lineno, expected=None):
    try:
        vals = [rat(t) for t in tokens]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InstanceFormatError(lineno, f"bad rational: {exc}") from None
    if expected is not None and len(vals) != expected:
        raise InstanceFormatError(lineno, f"expected {expected} values, found {len(vals)}")
    return vals


def _lines(text):
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s and not s.startswith("#"):
            yield lineno, s


# --------------------------------------------------------------------------
# QP instances


def dump_qp(qp: QpInstance) -> str:
    P = qp.feasible
    n = qp.dim
    out = [f"qp {n} {len(P.inequalities) + len(P.equalities)}"]
    if qp.provenance:
        out.append(f"provenance {qp.provenance}")
    out += [f"Q {_fmt(row)}" for row in qp.Q.rows()]
    out.append(f"c {_fmt(qp.c)}")
    out += [f"a {_fmt(a)} <= {b}" for a, b in P.inequalities]
    out += [f"a {_fmt(a)} = {b}" for a, b in P.equalities]
    return "\n".join(out) + "\n"


def load_qp(text) -> QpInstance:
    it = iter(_lines(text))
    try:
        lineno, header = next(it)
    except StopIteration:
        raise InstanceFormatError(0, "empty instance file") from None
    tok = header.split()
    if len(tok) != 3 or tok[0] != "qp":
        raise InstanceFormatError(lineno, "expected header 'qp <n> <m>'")
    try:
        n, m = int(tok[1]), int(tok[2])
    except ValueError:
        raise InstanceFormatError(lineno, "n and m must be integers") from None
    if n < 1 or m < 0:
        raise InstanceFormatError(lineno, "need n >= 1 and m >= 0")
    provenance = ""
    Q, c, ineq, eq = [], None, [], []
    for lineno, line in it:
        key, _, rest = line.partition(" ")
        if key == "provenance":
            if Q or provenance:
                raise InstanceFormatError(lineno, "provenance must directly follow the header")
            provenance = rest.strip()
        elif key == "Q":
            if len(Q) == n:
                raise InstanceFormatError(lineno, "too many Q rows")
            Q.append(_rats(rest.split(), lineno, n))
        elif key == "c":
            if len(Q) != n or c is not None:
                raise InstanceFormatError(lineno, "c must follow the n rows of Q")
            c = _rats(rest.split(), lineno, n)
        elif key == "a":
            if c is None:
                raise InstanceFormatError(lineno, "constraint before c")
            parts = rest.split()
            if len(parts) != n + 2 or parts[n] not in ("<=", ">=", "="):
                raise InstanceFormatError(lineno, "expected 'a <n rationals> <=|>=|= <rational>'")
            a = _rats(parts[:n], lineno)
            (b,) = _rats(parts[n + 1:], lineno)
            if parts[n] == "<=":
                ineq.append((a, b))
            elif parts[n] == ">=":
                ineq.append(([-v for v in a], -b))
            else:
                eq.append((a, b))
        else:
            raise InstanceFormatError(lineno, f"unknown record {key!r}")
    if len(Q) != n or c is None:
        raise InstanceFormatError(0, "incomplete instance: missing Q rows or c")
    if len(ineq) + len(eq) != m:
        raise InstanceFormatError(0, f"header announces {m} constraints, found {len(ineq) + len(eq)}")
    try:
        Qm = SymMat.from_rows(Q)
    except ValueError as exc:
        raise InstanceFormatError(0, str(exc)) from None
    return QpInstance(Qm, tuple(c), Polytope(n, tuple(ineq), tuple(eq)), provenance)


# --------------------------------------------------------------------------
# quartic instances


def dump_quartic(inst: QuarticInstance) -> str:
    out = [f"quartic {inst.n}", f"k {inst.k}", f"r {inst.r if inst.r is not None else '-'}"]
    out.append(" ".join(["edges"] + [f"{u}-{v}" for u, v in inst.graph.edge_list()]))
    out += [f"M {_fmt(row)}" for row in inst.M.rows()]
    return "\n".join(out) + "\n"


def load_quartic(text) -> QuarticInstance:
    recs = list(_lines(text))
    if not recs:
        raise InstanceFormatError(0, "empty instance file")
    lineno, header = recs[0]
    tok = header.split()
    if len(tok) != 2 or tok[0] != "quartic":
        raise InstanceFormatError(lineno, "expected header 'quartic <n>'")
    try:
        n = int(tok[1])
    except ValueError:
        raise InstanceFormatError(lineno, "n must be an integer") from None
    k = r = None
    edges = None
    rows = []
    for lineno, line in recs[1:]:
        key, _, rest = line.partition(" ")
        if key == "k":
            (k,) = _rats(rest.split(), lineno, 1)
        elif key == "r":
            rest = rest.strip()
            try:
                r = None if rest == "-" else int(rest)
            except ValueError:
                raise InstanceFormatError(lineno, "r must be an integer or '-'") from None
        elif key == "edges":
            edges = set()
            for e in rest.split():
                try:
                    u, v = (int(s) for s in e.split("-"))
                except ValueError:
                    raise InstanceFormatError(lineno, f"bad edge {e!r}") from None
                if u == v or not (1 <= u <= n and 1 <= v <= n):
                    raise InstanceFormatError(lineno, f"bad edge {e!r}")
                edges.add((u - 1, v - 1))
        elif key == "M":
            rows.append(_rats(rest.split(), lineno, n))
        else:
            raise InstanceFormatError(lineno, f"unknown record {key!r}")
    if k is None or edges is None or len(rows) != n:
        raise InstanceFormatError(0, "incomplete quartic instance")
    try:
        inst = build(Graph(n, frozenset(edges)), k, r)
    except ValueError as exc:
        raise InstanceFormatError(0, str(exc)) from None
    if inst.M.rows() != rows:
        raise InstanceFormatError(0, "matrix rows do not equal kA + kI - J for the listed graph")
    return inst


def load_instance(text):
    """Read either kind of instance file, dispatching on the header."""
    for _, line in _lines(text):
        if line.startswith("quartic"):
            return load_quartic(text)
        return load_qp(text)
    raise InstanceFormatError(0, "empty instance file")


# --------------------------------------------------------------------------
# JSON


def jsonable(obj):
    """Convert library objects to JSON-ready structures; rationals become strings."""
    if isinstance(obj, mpq):
        return str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, float, str)):
        return obj
    if isinstance(obj, Graph):
        return {"n": obj.n, "edges": obj.edge_list()}
    if isinstance(obj, SymMat):
        return [[str(x) for x in row] for row in obj.rows()]
    if isinstance(obj, QuarticInstance):
        return {"kind": "quartic", "n": obj.n, "k": str(obj.k), "r": obj.r,
                "graph": jsonable(obj.graph), "M": jsonable(obj.M)}
    if isinstance(obj, QpInstance):
        P = obj.feasible
        return {
            "kind": "qp",
            "n": obj.dim,
            "provenance": obj.provenance,
            "Q": jsonable(obj.Q),
            "c": jsonable(obj.c),
            "constraints": [{"a": jsonable(a), "sense": "<=", "b": str(b)} for a, b in P.inequalities]
            + [{"a": jsonable(a), "sense": "=", "b": str(b)} for a, b in P.equalities],
        }
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        if hasattr(type(obj), "found"):
            out["found"] = obj.found
        return out
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    if type(obj).__name__ == "mpz":
        return int(obj)
    raise TypeError(f"cannot render {type(obj).__name__} as JSON")


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"
