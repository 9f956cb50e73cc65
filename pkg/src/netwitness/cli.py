"""``witness`` command line: single runs, transmissivity sweeps and model dumps.

Exit codes: 0 when the run completed (whatever the verdict), 2 for bad input,
3 when the LP solver did not reach a trustworthy optimum.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import hashlib
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

from . import lp
from .lv_model import enumerate_strategies, region_pairs, restrict, strategy_table
from .photonic import Behavior, BehaviorError, behavior, read_behavior_csv, write_behavior_csv
from .topology import Topology, TopologyError, load_topology, serialize_topology
from .witness import WitnessError, assemble_lp, provenance_dump

log = logging.getLogger("netwitness")

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 2, 3
NONLOCAL, UNDETERMINED = "NetworkNonlocal", "Undetermined"
DEFAULT_EPS = 1e-6


class InputError(ValueError):
    code = "bad-arguments"


def verdict(T: float, status: lp.Status, eps: float) -> str:
    # a non-optimal T is only an upper bound on the true minimum, so it certifies nothing
    return NONLOCAL if status is lp.Status.OPTIMAL and T > eps else UNDETERMINED


def topology_hash(t: Topology) -> str:
    return hashlib.sha256(serialize_topology(t).encode()).hexdigest()[:16]


def _strategy_text(s: Sequence[int]) -> str:
    return "(" + ",".join(f"A_{p + 1}" for p in s) + ")"


def run_single(
    t: Topology,
    b: Behavior,
    settings: lp.SolverSettings | None = None,
    eps: float = DEFAULT_EPS,
    backend: str = "internal",
    trans: float | None = None,
) -> dict[str, Any]:
    """Assemble and solve the witness LP for one behavior; returns a JSON-ready report."""
    settings = settings or lp.SolverSettings()
    w = assemble_lp(b, t)
    sol = lp.solve(w.problem, settings, backend)
    check = lp.verify_solution(w.problem, sol)
    return {
        "t": trans,
        "T": sol.objective_value,
        "status": sol.status.value,
        "verdict": verdict(sol.objective_value, sol.status, eps),
        "iterations": sol.iterations,
        "max_residual": check.max_residual,
        "eps": eps,
        "slack_by_class": {str(k): v for k, v in w.slack_by_class(sol.values).items()},
        "gamma": {f"A{n + 1},{c}": g for (n, c), g in w.gammas.items()},
        "mu": {
            "mu_lambda": {f"lambda{m + 1}=A{n + 1}": v for (m, n), v in sorted(w.mu.mu_lambda.items())},
            "norm_S": w.mu.norm_S,
            "norm_OS": w.mu.norm_OS,
        },
        "counts": {
            "D": len(enumerate_strategies(t)),
            "S": len(w.rm.strategies),
            "patterns": len(w.rm.patterns),
            "O_S": len(w.rm.outcomes),
            "q_variables": w.n_q,
            "rows": w.problem.n_rows,
            "columns": w.problem.n_vars,
        },
    }


def grid(t_min: float, t_max: float, step: float) -> list[float]:
    if not (0.0 <= t_min < t_max <= 1.0):
        raise InputError("need 0 <= t-min < t-max <= 1")
    if not step > 0:
        raise InputError("step must be positive")
    n = int(math.floor((t_max - t_min) / step + 1e-9))
    return [round(t_min + k * step, 12) for k in range(n + 1)]


@dataclass
class SweepRow:
    t: float
    T: float
    status: str
    iterations: int
    verdict: str


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def nonlocal_intervals(self) -> list[tuple[float, float]]:
        """Maximal runs of consecutive grid points with a nonlocal verdict."""
        out: list[tuple[float, float]] = []
        start = prev = None
        for r in self.rows:
            if r.verdict == NONLOCAL:
                if start is None:
                    start = r.t
                prev = r.t
            elif start is not None:
                out.append((start, prev))
                start = None
        if start is not None:
            out.append((start, prev))
        return out


def _sweep_point(args: tuple[Topology, float, lp.SolverSettings, float, str]) -> SweepRow:
    t, trans, settings, eps, backend = args
    w = assemble_lp(behavior(t, trans), t)
    sol = lp.solve(w.problem, settings, backend)
    return SweepRow(trans, sol.objective_value, sol.status.value, sol.iterations, verdict(sol.objective_value, sol.status, eps))


def iter_sweep(
    t: Topology,
    ts: Iterable[float],
    settings: lp.SolverSettings | None = None,
    eps: float = DEFAULT_EPS,
    backend: str = "internal",
    workers: int = 1,
) -> Iterator[SweepRow]:
    """Yield sweep rows in grid order; with ``workers > 1`` points are solved in a
    process pool and re-ordered by t."""
    settings = settings or lp.SolverSettings()
    jobs = [(t, x, settings, eps, backend) for x in ts]
    if workers <= 1:
        for j in jobs:
            yield _sweep_point(j)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # Executor.map already yields in submission order
        yield from pool.map(_sweep_point, jobs, chunksize=4)


def run_sweep(
    t: Topology,
    t_min: float,
    t_max: float,
    step: float,
    settings: lp.SolverSettings | None = None,
    eps: float = DEFAULT_EPS,
    backend: str = "internal",
    workers: int = 1,
    sinks: Sequence[Any] = (),
) -> SweepResult:
    """Solve every grid point; each row is handed to ``sinks`` as soon as it
    arrives so interrupted sweeps keep their completed prefix."""
    settings = settings or lp.SolverSettings()
    result = SweepResult(
        metadata={
            "topology_hash": topology_hash(t),
            "settings": dataclasses.asdict(settings),
            "backend": backend,
            "eps": eps,
            "grid": {"t_min": t_min, "t_max": t_max, "step": step},
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        }
    )
    for row in iter_sweep(t, grid(t_min, t_max, step), settings, eps, backend, workers):
        result.rows.append(row)
        for sink in sinks:
            sink(row)
    return result


class _SweepWriter:
    """Writes sweep rows to the results file and the two-column plot file,
    flushing after every row."""

    def __init__(self, out_dir: str, fmt: str):
        self.fmt = fmt
        os.makedirs(out_dir, exist_ok=True)
        self.plot = open(os.path.join(out_dir, "sweep_plot.dat"), "w", encoding="utf-8")
        self.plot.write("# t T\n")
        name = "sweep.csv" if fmt == "csv" else "sweep.jsonl"
        self.main = open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="")
        if fmt == "csv":
            self.csv = csv.writer(self.main, lineterminator="\n")
            self.csv.writerow(["t", "T", "status", "verdict"])

    def __call__(self, row: SweepRow) -> None:
        if self.fmt == "csv":
            self.csv.writerow([repr(row.t), repr(row.T), row.status, row.verdict])
        else:
            self.main.write(json.dumps(dataclasses.asdict(row)) + "\n")
        self.plot.write(f"{row.t!r} {row.T!r}\n")
        self.main.flush()
        self.plot.flush()

    def close(self) -> None:
        self.main.close()
        self.plot.close()


def dump_model(t: Topology) -> str:
    """Strategy table, region pairs and the ``|D| / |S| / |O_S|`` counts line."""
    rm = restrict(t)
    lines = ["label  assignment -> pattern"]
    for label, s, pat in strategy_table(t, rm):
        lines.append(f"λ_{label} = {_strategy_text(s)} → {pat}")
    lines.append("")
    lines.append("region pairs (party, click): O_p1 | O_p2 ; S_p1 | S_p2")
    for p in region_pairs(t, rm):
        s1 = ",".join(f"λ_{rm.label(s)}" for s in p.s_p1)
        s2 = ",".join(f"λ_{rm.label(s)}" for s in p.s_p2)
        lines.append(
            f"A_{p.party + 1} {p.click}: {','.join(p.o_p1)} | {','.join(p.o_p2)} ; {s1} | {s2}"
        )
    lines.append("")
    lines.append(f"{len(enumerate_strategies(t))} / {len(rm.strategies)} / {len(rm.outcomes)}")
    return "\n".join(lines) + "\n"


def _settings(a: argparse.Namespace) -> lp.SolverSettings:
    if a.feas_tol <= 0 or a.opt_tol <= 0:
        raise InputError("tolerances must be positive")
    if a.max_iter is not None and a.max_iter <= 0:
        raise InputError("--max-iter must be positive")
    return lp.SolverSettings(a.feas_tol, a.opt_tol, a.max_iter, a.pivot_rule)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_run(a: argparse.Namespace) -> int:
    t = load_topology(a.topology)
    settings = _settings(a)
    if a.behavior is not None:
        try:
            with open(a.behavior, encoding="utf-8") as fh:
                b = read_behavior_csv(fh.read(), t)
        except OSError as exc:
            raise InputError(f"cannot read behavior file: {exc}") from exc
        trans = None
    else:
        if not 0.0 <= a.t <= 1.0:
            raise InputError("--t must lie in [0, 1]")
        b, trans = behavior(t, a.t), a.t
    report = run_single(t, b, settings, a.eps, a.backend, trans)
    if a.out:
        os.makedirs(a.out, exist_ok=True)
        w = assemble_lp(b, t)
        _write(os.path.join(a.out, "provenance.json"), provenance_dump(w))
        _write(os.path.join(a.out, "behavior.csv"), write_behavior_csv(b))
        if a.export_mps:
            _write(os.path.join(a.out, "witness.mps"), lp.export_lp(w.problem))
        if a.format == "json":
            _write(os.path.join(a.out, "report.json"), json.dumps(report, indent=1) + "\n")
        else:
            _write(os.path.join(a.out, "report.csv"), _report_csv(report))
    elif a.export_mps:
        raise InputError("--export-mps needs --out")
    if a.format == "json":
        print(json.dumps(report, indent=1))
    else:
        print(_report_text(report))
    return EXIT_OK if report["status"] == lp.Status.OPTIMAL.value else EXIT_SOLVER


def _report_csv(r: dict[str, Any]) -> str:
    rows = [("t", r["t"]), ("T", r["T"]), ("status", r["status"]), ("verdict", r["verdict"])]
    rows += [("iterations", r["iterations"]), ("max_residual", r["max_residual"])]
    rows += [(f"slack_class{k}", v) for k, v in r["slack_by_class"].items()]
    rows += [(f"gamma[{k}]", v) for k, v in r["gamma"].items()]
    rows += [(f"count_{k}", v) for k, v in r["counts"].items()]
    buf = [f"key,value"] + [f'"{k}",{v!r}' if isinstance(v, float) else f'"{k}",{v}' for k, v in rows]
    return "\n".join(buf) + "\n"


def _report_text(r: dict[str, Any]) -> str:
    c = r["counts"]
    lines = [
        f"verdict   {r['verdict']}  (T = {r['T']:.6e}, eps = {r['eps']:g})",
        f"status    {r['status']} after {r['iterations']} iterations, max residual {r['max_residual']:.2e}",
        f"counts    {c['D']} / {c['S']} / {c['O_S']}  ({c['patterns']} patterns, {c['q_variables']} q-variables, {c['rows']} rows)",
        "slack     " + "  ".join(f"class{k}={v:.3e}" for k, v in r["slack_by_class"].items()),
        "gamma     " + "  ".join(f"{k}={v:+.6f}" for k, v in r["gamma"].items()),
        f"mu        norm_S={r['mu']['norm_S']:.12f} norm_OS={r['mu']['norm_OS']:.12f}",
    ]
    return "\n".join(lines)


def _cmd_sweep(a: argparse.Namespace) -> int:
    t = load_topology(a.topology)
    settings = _settings(a)
    ts = grid(a.t_min, a.t_max, a.step)
    if a.workers < 1:
        raise InputError("--workers must be at least 1")
    writer = _SweepWriter(a.out, a.format) if a.out else None
    sinks = [writer] if writer else []
    try:
        res = run_sweep(t, a.t_min, a.t_max, a.step, settings, a.eps, a.backend, a.workers, sinks)
    finally:
        if writer:
            writer.close()
    if a.out:
        _write(os.path.join(a.out, "sweep_meta.json"), json.dumps(res.metadata, indent=1) + "\n")
        if a.format == "json":
            _write(
                os.path.join(a.out, "sweep.json"),
                json.dumps({"metadata": res.metadata, "rows": [dataclasses.asdict(r) for r in res.rows]}, indent=1) + "\n",
            )
    bad = [r for r in res.rows if r.status != lp.Status.OPTIMAL.value]
    iv = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in res.nonlocal_intervals()) or "none"
    print(f"{len(ts)} points, nonlocal on {iv}, {len(bad)} non-optimal")
    return EXIT_SOLVER if bad else EXIT_OK


def _cmd_dump(a: argparse.Namespace) -> int:
    t = load_topology(a.topology)
    text = dump_model(t)
    sys.stdout.write(text)
    if a.out:
        os.makedirs(a.out, exist_ok=True)
        _write(os.path.join(a.out, "strategies.txt"), text)
        _write(os.path.join(a.out, "provenance.json"), provenance_dump(assemble_lp(behavior(t, a.t), t)))
        if a.export_mps:
            _write(os.path.join(a.out, "witness.mps"), lp.export_lp(assemble_lp(behavior(t, a.t), t).problem))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--topology", required=True, help="JSON file, '6p4s' or 'ring:N'")
    common.add_argument("--eps", type=float, default=DEFAULT_EPS, help="T threshold for a nonlocal verdict")
    common.add_argument("--feas-tol", type=float, default=1e-8)
    common.add_argument("--opt-tol", type=float, default=1e-8)
    common.add_argument("--max-iter", type=int, default=None)
    common.add_argument("--pivot-rule", choices=lp.simplex.PIVOT_RULES, default="steepest")
    common.add_argument("--backend", choices=lp.BACKENDS, default="internal")
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--export-mps", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="witness", description="Network-nonlocality LP witness for photonic ring networks.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="solve one LP")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--t", type=float, help="simulate the behavior at this transmissivity")
    src.add_argument("--behavior", metavar="FILE", help="outcome,probability CSV")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("sweep", parents=[common], help="solve over a transmissivity grid")
    s.add_argument("--t-min", type=float, default=0.0)
    s.add_argument("--t-max", type=float, default=1.0)
    s.add_argument("--step", type=float, default=0.001)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=_cmd_sweep)

    d = sub.add_parser("dump", parents=[common], help="strategy table, region pairs, provenance")
    d.add_argument("--t", type=float, default=0.5, help="transmissivity for the provenance dump")
    d.set_defaults(func=_cmd_dump)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except (TopologyError, BehaviorError, WitnessError, InputError) as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ImportError as exc:
        print(f"error[missing-dependency]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        print("interrupted; completed rows were flushed", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
