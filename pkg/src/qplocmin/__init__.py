"""Exact local-minimality tests for quadratic and quartic programs built from graphs."""

from .constructions import QuarticInstance, build, eval_p, eval_q, from_stable_set_question, grad_p, hess_p
from .exact import Rat, SymMat, Verdict, is_pd, is_psd, rat, solve_linear
from .graphs import Graph, alpha, omega, parse_dimacs
from .localmin import (
    certify_qp_point,
    classify_bounded_instance,
    descent_falsifier,
    dyadic_bound,
    enumerate_sos_supports,
    has_local_min_qp_orthant,
    has_local_min_quartic,
)
from .lp import Polytope, lp_min
from .polyopt import QpInstance, exact_qp_min, is_copositive, is_pd_quartic, ms_max

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "Polytope",
    "QpInstance",
    "QuarticInstance",
    "Rat",
    "SymMat",
    "Verdict",
    "alpha",
    "build",
    "certify_qp_point",
    "classify_bounded_instance",
    "descent_falsifier",
    "dyadic_bound",
    "enumerate_sos_supports",
    "eval_p",
    "eval_q",
    "exact_qp_min",
    "from_stable_set_question",
    "grad_p",
    "has_local_min_qp_orthant",
    "has_local_min_quartic",
    "hess_p",
    "is_copositive",
    "is_pd",
    "is_pd_quartic",
    "is_psd",
    "lp_min",
    "ms_max",
    "omega",
    "parse_dimacs",
    "rat",
    "solve_linear",
]
