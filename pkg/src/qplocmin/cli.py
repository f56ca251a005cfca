"""Command-line front end: ``qplocmin {reduce,verify,oracle,certify,export}``.

Exit codes: 0 ok, 1 disagreement between decision paths, 2 unreadable input,
3 parameter violation, 4 resource limit hit (the report is then marked
incomplete).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import __version__
from .constructions import QuarticInstance, from_stable_set_question
from .exact import ZERO, rat
from .formats import InstanceFormatError, dump_qp, dump_quartic, jsonable, load_instance
from .graphs import (
    DimacsError,
    Graph,
    OracleLimitError,
    alpha,
    enumerate_graphs,
    omega,
    parse_dimacs,
    random_graph,
)
from .localmin import (
    InfeasiblePoint,
    NonintegerRequired,
    bounded_qp,
    certify_qp_point,
    descent_falsifier,
    dyadic_bound,
    enumerate_sos_supports,
    has_local_min_quartic,
    orthant_qp,
)
from .polyopt import DEFAULT_CAP, DimensionCapError, QpInstance, is_copositive, is_pd_quartic, ms_argmax

EXIT_OK, EXIT_DISAGREE, EXIT_PARSE, EXIT_PARAM, EXIT_RESOURCE = 0, 1, 2, 3, 4
EXHAUSTIVE_LIMIT = 5

PATHS = ("alpha_oracle", "copositivity", "pd_quartic", "quartic_localmin", "certify_origin")


class ParameterError(ValueError):
    pass


# --------------------------------------------------------------------------
# verification sweep


@dataclass(frozen=True)
class Job:
    key: tuple  # (n, edge mask, sample index, r)
    graph: Graph
    r: int
    cap: int
    timings: bool


def check_instance(job: Job) -> dict:
    """Run every decision path on one (graph, r) pair and compare them.

    Each path answers "does the quartic (equivalently the orthant QP) with
    k = r - 1/2 have a local minimizer?".
    """
    G, r, cap = job.graph, job.r, job.cap
    inst = from_stable_set_question(G, r)
    rec = {
        "key": "n{}-g{}-s{}-r{}".format(*job.key),
        "graph": jsonable(G),
        "r": r,
        "k": str(inst.k),
    }
    clock = {}

    def timed(name, fn):
        t0 = time.perf_counter()
        out = fn()
        clock[name] = round(time.perf_counter() - t0, 6)
        return out

    try:
        a, wit = timed("alpha_oracle", lambda: alpha(G))
        cop = timed("copositivity", lambda: is_copositive(inst.M, cap))
        pd = timed("pd_quartic", lambda: is_pd_quartic(inst, cap))
        ex = timed("quartic_localmin", lambda: has_local_min_quartic(inst, cap))
        orig = timed("certify_origin", lambda: certify_qp_point(orthant_qp(inst), (ZERO,) * G.n, cap))
        sos = timed("sos_supports", lambda: enumerate_sos_supports(inst, cap))
    except (DimensionCapError, OracleLimitError) as exc:
        rec["incomplete"] = str(exc)
        rec["agree"] = None
        return rec

    decisions = {
        "alpha_oracle": a <= r - 1,
        "copositivity": cop.holds,
        "pd_quartic": pd.holds,
        "quartic_localmin": ex.answer,
        "certify_origin": orig.holds,
    }
    sos_ok = bool(sos) is False if a > inst.k else True
    rec["alpha"] = a
    rec["alpha_witness"] = [v + 1 for v in wit]
    rec["decisions"] = decisions
    rec["answer"] = decisions["alpha_oracle"]
    rec["sos_supports"] = [[v + 1 for v in s.indices] for s in sos]
    rec["sos_consistent"] = sos_ok
    rec["certificates"] = {
        "quartic_localmin": jsonable(ex.cert),
        "certify_origin": jsonable(orig.detail.get("certificate")),
        "copositivity_witness": jsonable(cop.witness),
    }
    rec["agree"] = len(set(decisions.values())) == 1 and sos_ok
    if job.timings:
        rec["timings"] = clock
    return rec


def run_sweep(jobs: list[Job], workers: int) -> list[dict]:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(check_instance, jobs, chunksize=8))
    else:
        records = [check_instance(j) for j in jobs]
    return [rec for _, rec in sorted(zip((j.key for j in jobs), records), key=lambda p: p[0])]


def summarize(records: list[dict]) -> dict:
    matrix = {p: {q: 0 for q in PATHS} for p in PATHS}
    failures, incomplete = [], []
    for rec in records:
        if rec["agree"] is None:
            incomplete.append(rec["key"])
            continue
        if not rec["agree"]:
            failures.append(rec["key"])
        d = rec["decisions"]
        for p in PATHS:
            for q in PATHS:
                matrix[p][q] += d[p] == d[q]
    done = len(records) - len(incomplete)
    return {
        "records": len(records),
        "checked": done,
        "agreeing": done - len(failures),
        "agreement_matrix": matrix,
        "failures": failures,
        "incomplete": incomplete,
    }


def build_report(scope: dict, digest_source: bytes, records: list[dict]) -> dict:
    summary = summarize(records)
    return {
        "tool": "qplocmin",
        "version": __version__,
        "input_digest": hashlib.sha256(digest_source).hexdigest(),
        "scope": scope,
        "complete": not summary["incomplete"],
        "records": records,
        "summary": summary,
    }


def report_exit_code(report: dict) -> int:
    if report["summary"]["failures"]:
        return EXIT_DISAGREE
    if not report["complete"]:
        return EXIT_RESOURCE
    return EXIT_OK


# --------------------------------------------------------------------------
# helpers


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(path: str | None, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit(args, obj, text_lines):
    if args.format == "json":
        _write(getattr(args, "output", None), json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")
    else:
        _write(getattr(args, "output", None), "".join(line + "\n" for line in text_lines))


def _check_r(r: int, n: int):
    if not 1 <= r <= n:
        raise ParameterError(f"r must lie in 1..{n}, got {r}")


def _point(text: str):
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise ParameterError("empty point")
    try:
        return tuple(rat(t) for t in tokens)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParameterError(f"bad point coordinate: {exc}") from None


# --------------------------------------------------------------------------
# subcommands


def cmd_reduce(args) -> int:
    G = parse_dimacs(_read(args.graph))
    _check_r(args.r, G.n)
    inst = from_stable_set_question(G, args.r)
    bound = None
    if args.kind == "quartic":
        if args.t is not None or args.c is not None:
            raise ParameterError("--t and --c only apply to bounded-qp")
        text = dump_quartic(inst)
    elif args.kind == "qp-orthant":
        if args.t is not None or args.c is not None:
            raise ParameterError("--t and --c only apply to bounded-qp")
        text = dump_qp(orthant_qp(inst))
    else:
        if (args.t is None) == (args.c is None):
            raise ParameterError("bounded-qp needs exactly one of --t or --c")
        if args.t is not None:
            bound = rat(args.t)
            if bound <= 0:
                raise ParameterError("t must be positive")
        else:
            c = rat(args.c)
            if c < 0:
                raise ParameterError("c must be nonnegative")
            bound = dyadic_bound(c, G.n, args.denominator_bits)
            if bound <= 0:
                raise ParameterError("c = 0 gives bound 0; the feasible set would be the origin alone")
        text = dump_qp(bounded_qp(inst, bound))
    _write(args.output, text)
    echo = {"n": G.n, "k": str(inst.k), "bound": None if bound is None else str(bound)}
    stream = sys.stdout if args.output not in (None, "-") else sys.stderr
    if args.format == "json":
        stream.write(json.dumps(echo, sort_keys=True) + "\n")
    else:
        stream.write(f"n {echo['n']}\nk {echo['k']}\nbound {echo['bound'] or '-'}\n")
    return EXIT_OK


def _jobs_for(args) -> tuple[dict, bytes, list[Job]]:
    jobs: list[Job] = []
    modes = [args.graph is not None, args.exhaustive is not None, args.random is not None]
    if sum(modes) != 1:
        raise ParameterError("choose exactly one of a graph file, --exhaustive N or --random N")

    def add(G: Graph, mask: int, sample: int):
        rs = [args.r] if args.r is not None else range(1, G.n + 1)
        for r in rs:
            _check_r(r, G.n)
            jobs.append(Job((G.n, mask, sample, r), G, r, args.cap, args.timings))

    if args.graph is not None:
        raw = _read(args.graph)
        G = parse_dimacs(raw)
        scope = {"mode": "graph", "r": args.r}
        add(G, G.edge_mask(), 0)
        return scope, raw + json.dumps(scope, sort_keys=True).encode(), jobs
    if args.exhaustive is not None:
        N = args.exhaustive
        if not 1 <= N <= EXHAUSTIVE_LIMIT:
            raise ParameterError(f"--exhaustive needs 1 <= N <= {EXHAUSTIVE_LIMIT}")
        for n in range(1, N + 1):
            for G in enumerate_graphs(n):
                add(G, G.edge_mask(), 0)
        scope = {"mode": "exhaustive", "max_n": N, "r": args.r}
        return scope, json.dumps(scope, sort_keys=True).encode(), jobs
    n = args.random
    if n < 1 or args.count < 1:
        raise ParameterError("--random needs n >= 1 and --count >= 1")
    rng = random.Random(args.seed)
    for i in range(args.count):
        G = random_graph(n, rng, args.p)
        add(G, G.edge_mask(), i)
    scope = {"mode": "random", "n": n, "count": args.count, "seed": args.seed, "p": args.p, "r": args.r}
    return scope, json.dumps(scope, sort_keys=True).encode(), jobs


def cmd_verify(args) -> int:
    scope, source, jobs = _jobs_for(args)
    records = run_sweep(jobs, args.jobs)
    report = build_report(scope, source, records)
    s = report["summary"]
    lines = [
        f"records {s['records']}",
        f"agreeing {s['agreeing']}",
        f"failures {len(s['failures'])}",
        f"incomplete {len(s['incomplete'])}",
    ] + [f"FAIL {k}" for k in s["failures"]]
    _emit(args, report, lines)
    return report_exit_code(report)


def cmd_oracle(args) -> int:
    G = parse_dimacs(_read(args.graph))
    if args.which == "alpha":
        value, wit = alpha(G)
        out = {"which": "alpha", "value": value, "witness": [v + 1 for v in wit]}
    elif args.which == "omega":
        value, wit = omega(G)
        out = {"which": "omega", "value": value, "witness": [v + 1 for v in wit]}
    else:
        value, x = ms_argmax(G, args.cap)
        out = {"which": "ms", "value": value, "witness": x}
    wtxt = " ".join(str(v) for v in jsonable(out["witness"]))
    _emit(args, out, [f"{args.which} {jsonable(out['value'])}", f"witness {wtxt}"])
    return EXIT_OK


def _as_qp(obj) -> QpInstance:
    return orthant_qp(obj) if isinstance(obj, QuarticInstance) else obj


def cmd_certify(args) -> int:
    """Exact verdict plus the descent falsifier as an independent cross-check.

    A LocalMin verdict contradicted by an exactly verified improving point is
    a disagreement (exit 1).  The falsifier giving up is never evidence.
    """
    qp = _as_qp(load_instance(_read(args.instance)))
    x = _point(args.point)
    if len(x) != qp.dim:
        raise ParameterError(f"point has {len(x)} coordinates, instance has n = {qp.dim}")
    v = certify_qp_point(qp, x, args.cap)
    cert = v.detail.get("certificate")
    fals = descent_falsifier(qp, x, seed=args.seed)
    consistent = not (v.holds and fals.found)
    out = {
        "instance": qp,
        "question": "is the point a local minimizer",
        "point": x,
        "objective": qp.objective(x),
        "answer": "LocalMin" if v.holds else "NotLocalMin",
        "certificate": cert,
        "oracle_crosschecks": {
            "descent_falsifier": "ImprovingPoint" if fals.found else "GiveUp",
            "consistent": consistent,
        },
        "seed": args.seed,
    }
    if not v.holds:
        out["direction"] = v.witness
        out["reason"] = v.detail.get("reason")
    lines = [out["answer"], f"certificate {cert.kind}"]
    if not v.holds:
        lines.append("direction " + " ".join(str(d) for d in v.witness))
    lines.append(f"falsifier {out['oracle_crosschecks']['descent_falsifier']}")
    _emit(args, out, lines)
    return EXIT_OK if consistent else EXIT_DISAGREE


def cmd_export(args) -> int:
    obj = load_instance(_read(args.instance))
    if args.format == "json":
        _write(args.output, json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")
    else:
        _write(args.output, dump_quartic(obj) if isinstance(obj, QuarticInstance) else dump_qp(obj))
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help=f"dimension cap for exact solvers (default {DEFAULT_CAP})")
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(prog="qplocmin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qplocmin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", parents=[common], help="build an instance file from a DIMACS graph")
    p.add_argument("graph", help="DIMACS graph file, or - for stdin")
    p.add_argument("--kind", choices=("quartic", "qp-orthant", "bounded-qp"), required=True)
    p.add_argument("--r", type=int, required=True, help="stable set size asked about (k = r - 1/2)")
    p.add_argument("--t", help="explicit rational bound on sum(x) for bounded-qp")
    p.add_argument("--c", help="rational c >= 0; the bound becomes the dyadic rounding of 3 c^n sqrt(n)")
    p.add_argument("--denominator-bits", type=int, default=16, help="dyadic denominator 2^bits for --c")
    p.add_argument("-o", "--output", help="instance file to write (default stdout)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", parents=[common], help="cross-check all decision paths on a graph sweep")
    p.add_argument("graph", nargs="?", help="single DIMACS graph file")
    p.add_argument("--r", type=int, help="restrict to one r (default: every r in 1..n)")
    p.add_argument("--exhaustive", type=int, metavar="N", help=f"all labeled graphs with n <= N (N <= {EXHAUSTIVE_LIMIT})")
    p.add_argument("--random", type=int, metavar="N", help="random graphs on N vertices")
    p.add_argument("--count", type=int, default=100, help="number of random graphs (default 100)")
    p.add_argument("--p", type=float, default=0.5, help="edge probability for random graphs")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--timings", action="store_true", help="add wall-clock timings (makes reports nondeterministic)")
    p.add_argument("-o", "--output", help="report file (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="alpha, omega or the Motzkin-Straus maximum")
    p.add_argument("graph")
    p.add_argument("--which", choices=("alpha", "omega", "ms"), required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("certify", parents=[common], help="decide whether a point is a local minimizer")
    p.add_argument("instance", help="instance file (a quartic file means its orthant QP)")
    p.add_argument("--point", required=True, help='rational coordinates, e.g. "1,0" or "1/2 1/2"')
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("export", parents=[common], help="re-emit an instance as canonical text or JSON")
    p.add_argument("instance")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DimacsError, InstanceFormatError, UnicodeDecodeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DimensionCapError, OracleLimitError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParameterError, NonintegerRequired, InfeasiblePoint, ValueError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
