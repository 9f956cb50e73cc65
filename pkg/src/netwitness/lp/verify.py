"""Independent re-check of a solution against the problem rows.

Works from the sparse row lists in plain Python with ``math.fsum`` rather than
the dense arrays the solver uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import GE, LPProblem, Solution


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    worst_row: int
    max_bound_violation: float
    objective: float
    objective_mismatch: float

    def ok(self, feas_tol: float = 1e-8, obj_tol: float = 1e-10) -> bool:
        return (
            self.max_residual <= feas_tol
            and self.max_bound_violation <= feas_tol
            and self.objective_mismatch <= obj_tol
        )


def verify_solution(p: LPProblem, s: Solution) -> ResidualReport:
    x = [float(v) for v in s.values]
    worst, worst_row = 0.0, -1
    for i, r in enumerate(p.rows):
        act = math.fsum(v * x[j] for j, v in zip(r.indices, r.values))
        gap = act - r.rhs
        res = max(0.0, -gap) if r.relation == GE else abs(gap)
        if res > worst:
            worst, worst_row = res, i
    bound = max((lo - xj for lo, xj in zip(p.lower, x)), default=0.0)
    obj = math.fsum(v * x[j] for j, v in p.objective.items())
    return ResidualReport(
        max_residual=worst,
        worst_row=worst_row,
        max_bound_violation=max(0.0, bound),
        objective=obj,
        objective_mismatch=abs(obj - s.objective_value),
    )
