from .backends import BACKENDS, solve, solve_mps_highs
from .model import EQ, GE, LPProblem, LPRow, Solution, SolverSettings, Status
from .mps import export_lp
from .verify import ResidualReport, verify_solution

__all__ = [
    "BACKENDS",
    "EQ",
    "GE",
    "LPProblem",
    "LPRow",
    "ResidualReport",
    "Solution",
    "SolverSettings",
    "Status",
    "export_lp",
    "solve",
    "solve_mps_highs",
    "verify_solution",
]
