"""Solver backends.  ``internal`` needs nothing beyond numpy; ``highs`` uses the
optional ``highspy`` package and is mainly for cross-validation."""
from __future__ import annotations

import os
import tempfile

import numpy as np

from .model import LPProblem, SolverSettings, Solution, Status
from .mps import export_lp
from .simplex import solve as solve_internal

BACKENDS = ("internal", "highs")


def _highs():
    try:
        import highspy
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise ImportError("the highs backend needs the optional highspy package") from exc
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    return highspy, h


def solve_mps_highs(text: str, settings: SolverSettings | None = None) -> tuple[str, float, np.ndarray]:
    """Read an MPS document with HiGHS and solve it; returns (status, objective, x)."""
    s = settings or SolverSettings()
    highspy, h = _highs()
    h.setOptionValue("primal_feasibility_tolerance", s.feas_tol)
    h.setOptionValue("dual_feasibility_tolerance", s.opt_tol)
    fd, path = tempfile.mkstemp(suffix=".mps")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        if h.readModel(path) != highspy.HighsStatus.kOk:
            raise RuntimeError("HiGHS rejected the MPS document")
    finally:
        os.unlink(path)
    h.run()
    status = h.modelStatusToString(h.getModelStatus())
    x = np.asarray(h.getSolution().col_value, dtype=float)
    return status, float(h.getInfo().objective_function_value), x


def _solve_highs(p: LPProblem, s: SolverSettings) -> Solution:
    status, obj, x = solve_mps_highs(export_lp(p), s)
    mapped = {
        "Optimal": Status.OPTIMAL,
        "Infeasible": Status.INFEASIBLE,
        "Unbounded": Status.UNBOUNDED,
        "Iteration limit reached": Status.ITERATION_LIMIT,
    }.get(status, Status.NUMERICAL_TROUBLE)
    A, b, c = p.dense()
    res = float(np.abs(A @ x - b).max(initial=0.0)) if len(x) == p.n_vars else float("inf")
    return Solution(mapped, obj, x, res, 0)


def solve(p: LPProblem, settings: SolverSettings | None = None, backend: str = "internal") -> Solution:
    s = settings or SolverSettings()
    if backend == "internal":
        return solve_internal(p, s)
    if backend == "highs":
        return _solve_highs(p, s)
    raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
