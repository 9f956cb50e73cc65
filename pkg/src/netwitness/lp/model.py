from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

EQ = "="
GE = ">="


@dataclass(frozen=True)
class LPRow:
    indices: tuple[int, ...]
    values: tuple[float, ...]
    rhs: float
    relation: str = EQ
    name: str = ""
    tag: str = ""


@dataclass
class LPProblem:
    """``min c.x`` subject to sparse rows and per-variable lower bounds."""

    n_vars: int
    objective: dict[int, float]
    rows: list[LPRow]
    lower: list[float] = field(default_factory=list)
    col_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.lower:
            self.lower = [0.0] * self.n_vars
        if not self.col_labels:
            self.col_labels = [f"x{j}" for j in range(self.n_vars)]
        self.check()

    def check(self) -> None:
        if len(self.lower) != self.n_vars or len(self.col_labels) != self.n_vars:
            raise ValueError("lower bounds and labels must have n_vars entries")
        for j in self.objective:
            if not 0 <= j < self.n_vars:
                raise ValueError(f"objective index {j} out of range")
        for i, r in enumerate(self.rows):
            if r.relation not in (EQ, GE):
                raise ValueError(f"row {i}: unknown relation {r.relation!r}")
            if len(r.indices) != len(r.values):
                raise ValueError(f"row {i}: indices/values length mismatch")
            if len(set(r.indices)) != len(r.indices):
                raise ValueError(f"row {i}: duplicate column index")
            if any(not 0 <= j < self.n_vars for j in r.indices):
                raise ValueError(f"row {i}: column index out of range")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def dense(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(A, b, c)`` as dense arrays."""
        A = np.zeros((self.n_rows, self.n_vars))
        b = np.empty(self.n_rows)
        for i, r in enumerate(self.rows):
            A[i, list(r.indices)] = r.values
            b[i] = r.rhs
        c = np.zeros(self.n_vars)
        for j, v in self.objective.items():
            c[j] = v
        return A, b, c

    def scaled(self, factor: float, fixed_columns: Iterable[int] = ()) -> "LPProblem":
        """Copy with every row and right-hand side multiplied by ``factor``,
        except coefficients of ``fixed_columns`` (e.g. slacks) which are kept."""
        fixed = set(fixed_columns)
        rows = [
            LPRow(
                r.indices,
                tuple(v if j in fixed else factor * v for j, v in zip(r.indices, r.values)),
                factor * r.rhs,
                r.relation,
                r.name,
                r.tag,
            )
            for r in self.rows
        ]
        return LPProblem(self.n_vars, dict(self.objective), rows, list(self.lower), list(self.col_labels))


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"
    NUMERICAL_TROUBLE = "NumericalTrouble"


@dataclass
class Solution:
    status: Status
    objective_value: float
    values: np.ndarray
    max_residual: float
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass(frozen=True)
class SolverSettings:
    feas_tol: float = 1e-8
    opt_tol: float = 1e-8
    max_iter: int | None = None
    pivot_rule: str = "steepest"
    refactor_every: int = 200
    perturb: float = 1e-7

    def iteration_cap(self, p: LPProblem) -> int:
        return self.max_iter if self.max_iter is not None else 500 * (p.n_rows + p.n_vars)


def row_activity(p: LPProblem, x: Sequence[float]) -> list[float]:
    return [sum(v * x[j] for j, v in zip(r.indices, r.values)) for r in p.rows]
