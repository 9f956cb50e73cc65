"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS|FAIL`` line (shown in the terminal
summary) at the stated tolerance before asserting it.  Criteria that do not
hold for this implementation are marked ``xfail(strict=True)``: they still
run and report FAIL, and the suite turns red if they ever start passing.
"""
import math
import os
import time

import pytest

from netwitness import cli
from netwitness.checks import run_all
from netwitness.lp import SolverSettings, Status, export_lp, solve, solve_mps_highs
from netwitness.lv_model import enumerate_strategies, region_pairs, restrict
from netwitness.photonic import behavior, marginal
from netwitness.topology import build_6p4s, build_reference_ring
from netwitness.witness import assemble_lp, compute_mu, gamma

from oracles import TABLE_ONE

EPS = 1e-6


@pytest.fixture(scope="module")
def sweep():
    t0 = time.perf_counter()
    res = cli.run_sweep(build_6p4s(), 0.0, 1.0, 0.001, SolverSettings(), EPS, workers=os.cpu_count() or 1)
    return res, time.perf_counter() - t0


def test_criterion_1_counts(acceptance):
    t0 = time.perf_counter()
    topo = build_6p4s()
    D = enumerate_strategies(topo)
    rm = restrict(topo)
    elapsed = time.perf_counter() - t0
    supports = {len(rm.support[p]) for p in rm.patterns}
    got = (len(D), len(rm.strategies), len(rm.patterns), len(rm.outcomes), supports)
    ok = got == (81, 30, 15, 240, {2}) and elapsed < 1.0
    acceptance(1, ok, f"|D|={got[0]} |S|={got[1]} patterns={got[2]} |O_S|={got[3]} support sizes={sorted(supports)} in {elapsed:.3f}s")
    assert ok


def test_criterion_2_strategy_table(acceptance):
    text = cli.dump_model(build_6p4s())
    rows = [l for l in text.splitlines() if l.startswith("λ_")]
    expected = [
        f"λ_{j} = ({','.join(f'A_{p}' for p in s)}) → {pat}" for j, (s, pat) in enumerate(TABLE_ONE)
    ]
    mismatches = sum(a != b for a, b in zip(rows, expected)) + abs(len(rows) - len(expected))
    ok = mismatches == 0
    acceptance(2, ok, f"{len(rows)} rows, {mismatches} mismatches against the 30-row reference table")
    assert ok


def test_criterion_3_mu_model(acceptance):
    topo = build_6p4s()
    rm = restrict(topo)
    worst = 0.0
    for k in range(1, 10):
        mu = compute_mu(behavior(topo, k / 10), rm, topo)
        worst = max(
            worst,
            max(abs(v - 1 / 3) for v in mu.mu_lambda.values()),
            max(abs(v - 1 / 81) for v in mu.mu_strategy.values()),
            abs(mu.norm_S - 30 / 81),
            abs(mu.norm_OS - 30 / 81),
            max(abs(mu.q_strategy(s) - 1 / 30) for s in rm.strategies),
        )
    ok = worst <= 1e-10
    acceptance(3, ok, f"max deviation from 1/3, 1/81, 30/81, 1/30 over t=0.1..0.9: {worst:.2e}")
    assert ok


def calibrated_topology(topo, rm):
    """Swap input modes at parties whose asymmetry sign disagrees with (t - 1/2)/15."""
    b = behavior(topo, 0.8)
    flip = [p.party for p in region_pairs(topo, rm) if p.click == "L" and gamma(b, p, rm) < 0]
    return topo.with_mode_swap(set(topo.mode_swap) ^ set(flip))


@pytest.mark.xfail(
    strict=True,
    reason="computed asymmetry is (2t-1)/15, twice the stated closed form; see the decisions ledger",
)
def test_criterion_4_domain_asymmetry(acceptance):
    t0 = time.perf_counter()
    topo = build_6p4s()
    rm = restrict(topo)
    topo = calibrated_topology(topo, rm)
    pairs = region_pairs(topo, rm)
    worst = worst_derived = 0.0
    for k in range(21):
        t = k / 20
        b = behavior(topo, t)
        for p in pairs:
            target = (t - 0.5) / 15 if p.click == "L" else (0.5 - t) / 15
            g = gamma(b, p, rm)
            worst = max(worst, abs(g - target))
            worst_derived = max(worst_derived, abs(g - 2 * target))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    acceptance(
        4,
        ok,
        f"max |Gamma - (t-1/2)/15| = {worst:.3e}; against (2t-1)/15 it is {worst_derived:.1e}; {elapsed:.2f}s",
    )
    assert ok


def test_criterion_5_witness_curve(acceptance, sweep):
    res, elapsed = sweep
    rows = res.rows
    by_t = {r.t: r for r in rows}
    nonlocal_ts = [r.t for r in rows if r.verdict == cli.NONLOCAL]
    low = [t for t in nonlocal_ts if t < 0.5]
    high = [t for t in nonlocal_ts if t > 0.5]
    grid = [r.t for r in rows]
    step = 0.001
    # the smallest t* range consistent with the lower and upper windows on this grid
    lo_star = (max(low), max(low) + step) if low else (0.0, step)
    hi_star = (1 - min(high), 1 - min(high) + step) if high else (0.0, step)
    t_lo, t_hi = max(lo_star[0], hi_star[0]), min(lo_star[1], hi_star[1])
    t_star = (t_lo + t_hi) / 2
    form = [t for t in grid if 0 < t < t_star or 1 - t_star < t < 1]
    shape_ok = t_lo < t_hi + 1e-12 and nonlocal_ts == form
    ends_ok = all(by_t[t].verdict == cli.UNDETERMINED and by_t[t].T <= 1e-6 for t in (0.0, 0.5, 1.0))
    status_ok = all(r.status == Status.OPTIMAL.value for r in rows)
    ok = len(rows) == 1001 and shape_ok and abs(t_star - 0.292) <= 0.003 and ends_ok and status_ok
    acceptance(
        5,
        ok,
        f"nonlocal on {res.nonlocal_intervals()}, t* in ({t_lo:.4f}, {t_hi:.4f}]; "
        f"T(0)={by_t[0.0].T:.1e} T(0.5)={by_t[0.5].T:.1e} T(1)={by_t[1.0].T:.1e}; "
        f"{len(rows)} LPs in {elapsed:.0f}s",
    )
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="two-strategy interference changes sign under t -> 1-t; see the decisions ledger",
)
def test_criterion_6_symmetry(acceptance, sweep):
    res, _ = sweep
    T = {round(r.t, 9): r.T for r in res.rows}
    gaps = {t: abs(T[t] - T[round(1 - t, 9)]) for t in T}
    worst_t = max(gaps, key=gaps.get)
    ok = gaps[worst_t] <= 1e-5
    near = max(gaps[t] for t in T if 0.25 <= t <= 0.75)
    acceptance(
        6,
        ok,
        f"max |T(t)-T(1-t)| = {gaps[worst_t]:.3e} at t={worst_t:g}; within [0.25, 0.75] it is {near:.1e}",
    )
    assert ok


def test_criterion_7_theorem_suites(acceptance):
    failures = {}
    for name, topo in (("6p4s", build_6p4s()), ("ring(6)", build_reference_ring(6))):
        for t in (0.0, 0.13, 0.5, 0.77, 1.0):
            for check, bad in run_all(topo, behavior(topo, t)).items():
                if bad:
                    failures[(name, check)] = failures.get((name, check), 0) + len(bad)
    # the witness-side form of the region identity: class-3 right-hand sides over S_p1
    topo = build_6p4s()
    rm = restrict(topo)
    worst = 0.0
    for t in (0.13, 0.77):
        b = behavior(topo, t)
        mu = compute_mu(b, rm, topo)
        for p in region_pairs(topo, rm):
            lhs = math.fsum(mu.q_strategy(s) for s in p.s_p1)
            rhs = math.fsum(marginal(b, pat) for pat in p.coarse(1)) / mu.norm_OS
            worst = max(worst, abs(lhs - rhs))
    ok = not failures and worst <= 1e-9
    acceptance(
        7,
        ok,
        f"no-repeats, image-inside, region-closure, substring-certifies, region-weights on 6p4s and ring(6): "
        f"{sum(failures.values())} counterexamples; class-3 identity gap {worst:.1e}",
    )
    assert ok


def test_criterion_8_quantum_engine(acceptance):
    topo = build_6p4s()
    rm = restrict(topo)
    norm_err = weight_err = 0.0
    for k in range(11):
        b = behavior(topo, k / 10)
        norm_err = max(norm_err, abs(b.total() - 1))
        for pat in rm.patterns:
            weight_err = max(weight_err, abs(marginal(b, pat) - len(rm.support[pat]) / 81))
    b = behavior(topo, 0.5)
    hom = math.fsum(p for a, p in b.probs.items() if "2" in a)
    ok = norm_err <= 1e-12 and weight_err <= 1e-10 and hom <= 1e-12
    acceptance(8, ok, f"normalisation err {norm_err:.1e}, pattern weight err {weight_err:.1e}, p(any TWO at t=1/2) = {hom:.1e}")
    assert ok


def test_criterion_9_cross_solver(acceptance):
    pytest.importorskip("highspy")
    topo = build_6p4s()
    p = assemble_lp(behavior(topo, 0.2), topo).problem
    internal = solve(p)
    status, external, _ = solve_mps_highs(export_lp(p))
    diff = abs(internal.objective_value - external)
    ok = internal.status is Status.OPTIMAL and status == "Optimal" and diff <= 1e-5
    acceptance(9, ok, f"internal T={internal.objective_value:.10f}, HiGHS on exported MPS T={external:.10f}, diff {diff:.1e}")
    assert ok
