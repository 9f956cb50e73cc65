"""Dense two-phase primal simplex.

Tableau form with periodic refactorisation from the original matrix to keep
round-off from accumulating across long degenerate pivot sequences.  Steepest
edge is the default pricing rule.  Phase 2 starts from a small deterministic
perturbation of the basic values to escape degenerate stalling, and a short
dual-simplex pass removes the perturbation at the end.  Any rule falls back
to Bland after a run of degenerate pivots.
"""
from __future__ import annotations

import logging

import numpy as np
from scipy import sparse
from scipy.linalg.blas import dger

from .model import GE, LPProblem, SolverSettings, Solution, Status

log = logging.getLogger(__name__)

PIVOT_RULES = ("bland", "dantzig", "devex", "steepest")
_PIVOT_TOL = 1e-9
_DEGENERATE_RUN = 50
_SEED = 20240517


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int]):
        self.A = A  # original standard-form matrix, kept for refactorisation
        self._At = sparse.csr_matrix(A.T)  # the constraint matrix is very sparse
        self.b = b
        self.basis = basis
        self.refactor()

    def refactor(self) -> None:
        Binv = np.linalg.inv(self.A[:, self.basis])
        # (A^T Binv^T)^T is column-major, as the in-place BLAS update in pivot() needs
        self.T = np.asfortranarray((self._At @ Binv.T).T)
        self.x = Binv @ self.b

    def pivot(self, r: int, j: int) -> np.ndarray:
        """Pivot on (r, j); returns the new (normalised) pivot row."""
        T = self.T
        prow = T[r] / T[r, j]
        xr = self.x[r] / T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        self.T = T = dger(-1.0, col, prow, a=T, overwrite_a=True)
        self.x -= col * xr
        T[r] = prow
        self.x[r] = xr
        self.basis[r] = j
        return prow


def _reduced_costs(tab: _Tableau, c: np.ndarray) -> np.ndarray:
    return c - c[tab.basis] @ tab.T


def _choose_entering(d: np.ndarray, allowed: np.ndarray, tol: float, rule: str, weights: np.ndarray | None, tab: "_Tableau") -> int:
    cand = np.flatnonzero((d < -tol) & allowed)
    if cand.size == 0:
        return -1
    if rule == "bland":
        return int(cand[0])
    if rule == "dantzig":
        return int(cand[np.argmin(d[cand])])
    if rule == "steepest":
        T = tab.T[:, cand]
        w = 1.0 + np.einsum("ij,ij->j", T, T)
    else:
        w = weights[cand]
    return int(cand[np.argmax(d[cand] ** 2 / w)])


def _choose_leaving(tab: _Tableau, j: int) -> int:
    col = tab.T[:, j]
    rows = np.flatnonzero(col > _PIVOT_TOL)
    if rows.size == 0:
        return -1
    ratios = np.maximum(tab.x[rows], 0.0) / col[rows]
    best = ratios.min()
    ties = rows[ratios <= best + 1e-12 * max(1.0, best)]
    basis = np.asarray(tab.basis)
    return int(ties[np.argmin(basis[ties])])


def _run(tab: _Tableau, c: np.ndarray, allowed: np.ndarray, s: SolverSettings, budget: int) -> tuple[str, int]:
    degenerate = 0
    it = 0
    d = _reduced_costs(tab, c)
    weights = np.ones(d.size) if s.pivot_rule == "devex" else None
    while it < budget:
        # long runs of degenerate pivots switch to Bland's rule until progress resumes
        rule = "bland" if degenerate >= _DEGENERATE_RUN else s.pivot_rule
        j = _choose_entering(d, allowed, s.opt_tol, rule, weights, tab)
        if j < 0:
            return "optimal", it
        r = _choose_leaving(tab, j)
        if r < 0:
            return "unbounded", it
        degenerate = degenerate + 1 if tab.x[r] <= s.feas_tol else 0
        prow = tab.pivot(r, j)
        it += 1
        if weights is not None:
            np.maximum(weights, prow**2 * weights[j], out=weights)
            weights[j] = 1.0
        if it % s.refactor_every == 0:
            tab.refactor()
            d = _reduced_costs(tab, c)
        else:
            d = d - d[j] * prow
    return "limit", it


def solve(p: LPProblem, settings: SolverSettings | None = None) -> Solution:
    """Minimise ``p`` with a two-phase primal simplex.

    Never raises on solver conditions; they are reported through ``status``.
    """
    s = settings or SolverSettings()
    if s.pivot_rule not in PIVOT_RULES:
        raise ValueError(f"unknown pivot rule {s.pivot_rule!r}")
    A0, b0, c0 = p.dense()
    lb = np.asarray(p.lower, dtype=float)
    m, n = A0.shape
    cap = s.iteration_cap(p)

    if m == 0:
        x = lb.copy()
        if np.any(c0 < -s.opt_tol):
            return Solution(Status.UNBOUNDED, float("-inf"), x, 0.0, 0)
        return Solution(Status.OPTIMAL, float(c0 @ x), x, 0.0, 0)

    # shift to x' = x - lb >= 0, add surplus columns for >= rows
    b = b0 - A0 @ lb
    ge = [i for i, r in enumerate(p.rows) if r.relation == GE]
    A = np.hstack([A0, np.zeros((m, len(ge)))])
    for k, i in enumerate(ge):
        A[i, n + k] = -1.0
    c = np.concatenate([c0, np.zeros(len(ge))])
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    n_struct = A.shape[1]

    # crash basis from unit columns, artificials elsewhere
    basis: list[int] = []
    used: set[int] = set()
    need_art: list[int] = []
    nnz = (A != 0).sum(axis=0)
    for i in range(m):
        cands = np.flatnonzero((A[i] > 0) & (nnz == 1))
        cands = [j for j in cands if j not in used]
        if cands:
            j = cands[-1]
            a = A[i, j]
            A[i] /= a
            b[i] /= a
            used.add(j)
            basis.append(j)
        else:
            basis.append(-1)
            need_art.append(i)
    if need_art:
        art = np.zeros((m, len(need_art)))
        for k, i in enumerate(need_art):
            art[i, k] = 1.0
            basis[i] = n_struct + k
        A = np.hstack([A, art])
    n_total = A.shape[1]

    try:
        tab = _Tableau(A, b, basis)
    except np.linalg.LinAlgError:
        return Solution(Status.NUMERICAL_TROUBLE, float("nan"), lb.copy(), float("inf"), 0)

    iters = 0
    allowed = np.ones(n_total, dtype=bool)
    if need_art:
        c1 = np.zeros(n_total)
        c1[n_struct:] = 1.0
        outcome, k = _run(tab, c1, allowed, s, cap)
        iters += k
        if outcome == "limit":
            return _finish(p, tab, n, lb, Status.ITERATION_LIMIT, iters)
        tab.refactor()
        infeas = float(c1[tab.basis] @ tab.x)
        if infeas > s.feas_tol:
            return _finish(p, tab, n, lb, Status.INFEASIBLE, iters)
        _drive_out_artificials(tab, n_struct)
        allowed[n_struct:] = False

    c2 = np.zeros(n_total)
    c2[:n_struct] = c
    b_true = tab.b.copy()
    if s.perturb > 0:
        # shift basic values up by small random amounts (b -> b + B.delta) so
        # degenerate vertices become non-degenerate; removed again below
        rng = np.random.default_rng(_SEED)
        delta = s.perturb * (1.0 + rng.random(m)) * np.maximum(1.0, np.abs(tab.x))
        tab.b = b_true + tab.A[:, tab.basis] @ delta
        tab.refactor()
    outcome, k = _run(tab, c2, allowed, s, cap - iters)
    iters += k
    if outcome == "limit":
        tab.b = b_true
        return _finish(p, tab, n, lb, Status.ITERATION_LIMIT, iters)
    if outcome == "unbounded":
        tab.b = b_true
        return _finish(p, tab, n, lb, Status.UNBOUNDED, iters)
    if s.perturb > 0:
        tab.b = b_true
        tab.refactor()
        outcome, k = _dual_cleanup(tab, c2, allowed, s, cap - iters)
        iters += k
        if outcome == "limit":
            return _finish(p, tab, n, lb, Status.ITERATION_LIMIT, iters)
        if outcome == "infeasible":
            return _finish(p, tab, n, lb, Status.INFEASIBLE, iters)
        # the relaxed ratio test can leave small negative reduced costs behind
        outcome, k = _run(tab, c2, allowed, s, cap - iters)
        iters += k
        if outcome != "optimal":
            status = Status.ITERATION_LIMIT if outcome == "limit" else Status.UNBOUNDED
            return _finish(p, tab, n, lb, status, iters)
    return _finish(p, tab, n, lb, Status.OPTIMAL, iters, s.feas_tol)


def _dual_cleanup(tab: _Tableau, c: np.ndarray, allowed: np.ndarray, s: SolverSettings, budget: int) -> tuple[str, int]:
    """Dual simplex from a dual-feasible basis until the primal values are
    non-negative again."""
    d = _reduced_costs(tab, c)
    it = 0
    while it < budget:
        r = int(np.argmin(tab.x))
        if tab.x[r] >= -s.feas_tol:
            return "optimal", it
        row = tab.T[r]
        cand = np.flatnonzero((row < -_PIVOT_TOL) & allowed)
        if cand.size == 0:
            return "infeasible", it
        # Harris two-pass test: bound the step with relaxed reduced costs, then
        # take the largest pivot among the columns inside that bound
        alpha = -row[cand]
        dc = np.maximum(d[cand], 0.0)
        theta = ((dc + s.opt_tol) / alpha).min()
        inside = dc / alpha <= theta
        j = int(cand[inside][np.argmax(alpha[inside])])
        prow = tab.pivot(r, j)
        it += 1
        if it % s.refactor_every == 0:
            tab.refactor()
            d = _reduced_costs(tab, c)
        else:
            d = d - d[j] * prow
    return "limit", it


def _drive_out_artificials(tab: _Tableau, n_struct: int) -> None:
    for r, j in enumerate(list(tab.basis)):
        if j < n_struct:
            continue
        row = tab.T[r, :n_struct]
        cand = np.flatnonzero(np.abs(row) > _PIVOT_TOL)
        if cand.size:
            tab.pivot(r, int(cand[np.argmax(np.abs(row[cand]))]))
        # otherwise the row is redundant; the artificial stays basic at zero


def _finish(p: LPProblem, tab: _Tableau, n: int, lb: np.ndarray, status: Status, iters: int, feas_tol: float | None = None) -> Solution:
    try:
        tab.refactor()
    except np.linalg.LinAlgError:
        status = Status.NUMERICAL_TROUBLE
    full = np.zeros(tab.A.shape[1])
    full[tab.basis] = tab.x
    x = full[:n] + lb
    x[np.abs(x - lb) < 1e-13] = lb[np.abs(x - lb) < 1e-13]
    A0, b0, c0 = p.dense()
    act = A0 @ x
    res = np.abs(act - b0)
    for i, r in enumerate(p.rows):
        if r.relation == GE:
            res[i] = max(0.0, b0[i] - act[i])
    bound_viol = np.maximum(lb - x, 0.0)
    max_res = float(max(res.max(initial=0.0), bound_viol.max(initial=0.0)))
    if feas_tol is not None and status is Status.OPTIMAL and max_res > feas_tol:
        log.warning("optimal basis has residual %.3e above tolerance", max_res)
        status = Status.NUMERICAL_TROUBLE
    return Solution(status, float(c0 @ x), x, max_res, iters)
