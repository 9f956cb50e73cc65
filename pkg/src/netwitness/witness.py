"""Linear constraints on the auxiliary distribution q(a, lambda).

Decision variables exist only for compatible pairs: a strategy in ``S`` and a
fine-grained outcome of its (single) pattern.  Every equality row gets a pair
of non-negative slack columns in :func:`assemble_lp`; the objective is their
sum, so ``T = 0`` means the constraints are jointly satisfiable.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .lp import EQ, GE, LPProblem, LPRow
from .lv_model import (
    RegionPair,
    RestrictedModel,
    Strategy,
    enumerate_strategies,
    fine_grain,
    region_pairs,
    restrict,
    substring_compatible,
)
from .photonic import LEFT, RIGHT, Behavior, marginal
from .topology import Topology, format_strategy

log = logging.getLogger(__name__)

CLASS_EQUATION = {
    1: "validity (non-negativity, normalisation)",
    2: "marginal agreement q(a) = p(a)/p(O_S)",
    3: "strategy distribution q(lambda) = mu(lambda)/mu(S)",
    4: "conditional independence of single-party marginals",
    5: "domain asymmetry",
}


class WitnessError(ValueError):
    code = "witness-error"


class DegenerateBehaviorError(WitnessError):
    code = "degenerate-behavior"


class ZeroNormalizationError(WitnessError):
    code = "zero-normalization"


@dataclass(frozen=True)
class Variables:
    """Column index of every compatible ``(outcome, strategy)`` pair."""

    pairs: tuple[tuple[str, Strategy], ...]

    @cached_property
    def index(self) -> dict[tuple[str, Strategy], int]:
        return {p: j for j, p in enumerate(self.pairs)}

    def __len__(self) -> int:
        return len(self.pairs)

    def get(self, outcome: str, s: Strategy) -> int | None:
        return self.index.get((outcome, s))


def variables(rm: RestrictedModel) -> Variables:
    return Variables(tuple((a, s) for s in rm.strategies for a in rm.outcomes_of(s)))


@dataclass(frozen=True)
class MuModel:
    mu_lambda: Mapping[tuple[int, int], float]
    mu_strategy: Mapping[Strategy, float]
    norm_S: float
    norm_OS: float

    def q_strategy(self, s: Strategy) -> float:
        return self.mu_strategy[s] / self.norm_S


@dataclass
class Row:
    cls: int
    coeffs: list[tuple[int, float]]
    rhs: float
    relation: str = EQ
    note: str = ""
    detail: dict = field(default_factory=dict)


@dataclass
class ConstraintSet:
    rows: list[Row] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def extend(self, other: "ConstraintSet") -> None:
        self.rows.extend(other.rows)

    def by_class(self, cls: int) -> list[Row]:
        return [r for r in self.rows if r.cls == cls]


def _os_norm(b: Behavior, rm: RestrictedModel) -> float:
    return math.fsum(b[a] for a in rm.outcomes)


def substring_marginal(b: Behavior, rm: RestrictedModel, t: Topology, source: int, party: int) -> float:
    """p(a in O_S compatible with the substring of ``source`` at ``party``)."""
    return math.fsum(
        marginal(b, pat) for pat in rm.patterns if substring_compatible(pat, t, source, party)
    )


def compute_mu(b: Behavior, rm: RestrictedModel, t: Topology) -> MuModel:
    """Per-source assignment probabilities inferred from substring marginals,
    and the factorised strategy distribution they imply."""
    mu_lambda: dict[tuple[int, int], float] = {}
    for m, tl in enumerate(t.targets):
        weights = {n: substring_marginal(b, rm, t, m, n) for n in tl}
        total = math.fsum(weights.values())
        if total <= 0:
            raise DegenerateBehaviorError(
                f"source {m + 1}: all substring marginals vanish, cannot infer its LV distribution"
            )
        for n, w in weights.items():
            mu_lambda[(m, n)] = w / total
    mu_strategy = {
        s: math.prod(mu_lambda[(m, n)] for m, n in enumerate(s)) for s in enumerate_strategies(t)
    }
    norm_S = math.fsum(mu_strategy[s] for s in rm.strategies)
    norm_OS = _os_norm(b, rm)
    if abs(norm_S - norm_OS) > 1e-9:
        log.warning("mu(S)=%.12g and p(O_S)=%.12g disagree", norm_S, norm_OS)
    return MuModel(mu_lambda, mu_strategy, norm_S, norm_OS)


def class1_validity(rm: RestrictedModel, var: Variables | None = None) -> ConstraintSet:
    var = var or variables(rm)
    cs = ConstraintSet()
    if not len(var):
        return cs
    for j, (a, s) in enumerate(var.pairs):
        cs.rows.append(Row(1, [(j, 1.0)], 0.0, GE, f"q({a},{format_strategy(s)}) >= 0"))
    cs.rows.append(Row(1, [(j, 1.0) for j in range(len(var))], 1.0, EQ, "sum q = 1"))
    return cs


def class2_marginal(b: Behavior, rm: RestrictedModel, var: Variables | None = None) -> ConstraintSet:
    var = var or variables(rm)
    norm = _os_norm(b, rm)
    if norm <= 0:
        raise ZeroNormalizationError("behavior puts no weight on O_S")
    cs = ConstraintSet()
    for a in rm.outcomes:
        supp = rm.supporters(a)
        coeffs = [(var.get(a, s), 1.0) for s in supp]
        cs.rows.append(
            Row(
                2,
                coeffs,
                b[a] / norm,
                note=f"q({a}) = p({a})/p(O_S)",
                detail={"outcomes": [a], "strategies": [rm.label(s) for s in supp]},
            )
        )
    return cs


def class3_strategy(mu: MuModel, rm: RestrictedModel, var: Variables | None = None) -> ConstraintSet:
    var = var or variables(rm)
    cs = ConstraintSet()
    for s in rm.strategies:
        coeffs = [(var.get(a, s), 1.0) for a in rm.outcomes_of(s)]
        j = rm.label(s)
        cs.rows.append(
            Row(
                3,
                coeffs,
                mu.q_strategy(s),
                note=f"q(lambda_{j}) = mu(lambda_{j})/mu(S)",
                detail={"strategies": [j]},
            )
        )
    return cs


def _click_sum(var: Variables, rm: RestrictedModel, s: Strategy, party: int, click: str) -> list[tuple[int, float]]:
    return [(var.get(a, s), 1.0) for a in rm.outcomes_of(s) if a[party] == click]


def class4_conditional(mu: MuModel, rm: RestrictedModel, t: Topology, var: Variables | None = None) -> ConstraintSet:
    """Chained equalities of ``sum_{a_n = c} q(a, lambda) / mu(lambda)`` within
    groups of strategies sharing the values of party ``n``'s two LVs.

    Only groups whose LV pair sends a photon to ``n`` yield rows: otherwise
    both sides are empty sums for ``c`` in ``{L, R}``.
    """
    var = var or variables(rm)
    cs = ConstraintSet()
    for n in range(t.n_parties):
        m1, m2 = t.sources_of(n)
        groups: dict[tuple[int, int], list[Strategy]] = {}
        for s in rm.strategies:
            groups.setdefault((s[m1], s[m2]), []).append(s)
        for key in sorted(groups):
            group = groups[key]
            if len(group) < 2 or n not in key:
                continue
            for click in (LEFT, RIGHT):
                for s, s2 in zip(group, group[1:]):
                    if mu.mu_strategy[s2] == 0:
                        log.warning(
                            "class 4: mu(lambda_%d)=0, skipping row for party %d",
                            rm.label(s2),
                            n + 1,
                        )
                        continue
                    ratio = mu.mu_strategy[s] / mu.mu_strategy[s2]
                    coeffs = _click_sum(var, rm, s, n, click) + [
                        (j, -ratio) for j, _ in _click_sum(var, rm, s2, n, click)
                    ]
                    cs.rows.append(
                        Row(
                            4,
                            coeffs,
                            0.0,
                            note=(
                                f"party A{n + 1}, a_n={click}: lambda_{rm.label(s)} ~ "
                                f"lambda_{rm.label(s2)} (ratio {ratio:.12g})"
                            ),
                            detail={
                                "party": n + 1,
                                "click": click,
                                "strategies": [rm.label(s), rm.label(s2)],
                                "ratio": ratio,
                            },
                        )
                    )
    return cs


def gamma(b: Behavior, pair: RegionPair, rm: RestrictedModel) -> float:
    """Domain asymmetry from observed statistics: marginal of ``O_p1`` minus
    marginal of ``O_p2``, renormalised over ``O_S``."""
    norm = _os_norm(b, rm)
    if norm <= 0:
        raise ZeroNormalizationError("behavior puts no weight on O_S")
    p1 = math.fsum(b[a] for pat in pair.o_p1 for a in fine_grain(pat))
    p2 = math.fsum(b[a] for pat in pair.o_p2 for a in fine_grain(pat))
    return (p1 - p2) / norm


def gamma_by_substring(b: Behavior, pair: RegionPair, t: Topology, rm: RestrictedModel) -> float:
    """Same quantity by filtering individual outcomes of ``O_S`` on the substring."""
    n, c = pair.party, pair.click
    norm = _os_norm(b, rm)

    def q_sub(m: int) -> float:
        silent = [p for p in t.targets[m] if p != n]
        return sum(b[a] for a in rm.outcomes if a[n] == c and all(a[p] == "0" for p in silent)) / norm

    return q_sub(pair.sources[0]) - q_sub(pair.sources[1])


def class5_domain_asymmetry(
    b: Behavior, pairs: Sequence[RegionPair], rm: RestrictedModel, var: Variables | None = None
) -> ConstraintSet:
    var = var or variables(rm)
    cs = ConstraintSet()
    for pair in pairs:
        g = gamma(b, pair, rm)
        outcomes = [a for pat in pair.o_p for a in fine_grain(pat)]
        coeffs: list[tuple[int, float]] = []
        for sign, strategies in ((1.0, pair.s_p1), (-1.0, pair.s_p2)):
            for s in strategies:
                for a in outcomes:
                    j = var.get(a, s)
                    if j is not None:
                        coeffs.append((j, sign))
        cs.rows.append(
            Row(
                5,
                coeffs,
                g,
                note=f"Delta(a_{pair.party + 1}={pair.click}) = {g:.12g}",
                detail={
                    "party": pair.party + 1,
                    "click": pair.click,
                    "sources": [pair.sources[0] + 1, pair.sources[1] + 1],
                    "outcomes": list(pair.o_p),
                    "S_p1": [rm.label(s) for s in pair.s_p1],
                    "S_p2": [rm.label(s) for s in pair.s_p2],
                },
            )
        )
    return cs


@dataclass
class WitnessLP:
    """An assembled LP plus what is needed to interpret its solution."""

    problem: LPProblem
    constraints: ConstraintSet
    n_q: int
    slack_rows: list[int]  # constraint row index owning slack pair k
    mu: MuModel
    rm: RestrictedModel
    pairs: list[RegionPair]
    gammas: dict[tuple[int, str], float]

    def slack_by_class(self, x) -> dict[int, float]:
        out = {c: 0.0 for c in CLASS_EQUATION}
        for k, ri in enumerate(self.slack_rows):
            cls = self.constraints.rows[ri].cls
            out[cls] += float(x[self.n_q + 2 * k] + x[self.n_q + 2 * k + 1])
        return out


def build_constraints(b: Behavior, t: Topology, rm: RestrictedModel | None = None):
    rm = rm or restrict(t)
    var = variables(rm)
    mu = compute_mu(b, rm, t)
    pairs = region_pairs(t, rm)
    cs = ConstraintSet()
    cs.extend(class1_validity(rm, var))
    cs.extend(class2_marginal(b, rm, var))
    cs.extend(class3_strategy(mu, rm, var))
    cs.extend(class4_conditional(mu, rm, t, var))
    cs.extend(class5_domain_asymmetry(b, pairs, rm, var))
    return cs, var, mu, rm, pairs


def assemble_lp(b: Behavior, t: Topology, rm: RestrictedModel | None = None) -> WitnessLP:
    """Tolerance-relaxed LP: every equality ``c.q = v`` becomes
    ``c.q - s+ + s- = v`` and the objective is the sum of all slacks."""
    cs, var, mu, rm, pairs = build_constraints(b, t, rm)
    n_q = len(var)
    labels = [f"q[{a}|l{rm.label(s)}]" for a, s in var.pairs]
    lower = [0.0] * n_q
    rows: list[LPRow] = []
    slack_rows: list[int] = []
    objective: dict[int, float] = {}
    for ri, r in enumerate(cs.rows):
        if r.relation == GE:
            # single-variable non-negativity rows are kept as hard bounds
            if len(r.coeffs) == 1 and r.coeffs[0][1] == 1.0 and r.rhs == 0.0:
                continue
            rows.append(LPRow(tuple(j for j, _ in r.coeffs), tuple(v for _, v in r.coeffs), r.rhs, GE, r.note, f"class{r.cls}"))
            continue
        k = len(slack_rows)
        sp, sm = n_q + 2 * k, n_q + 2 * k + 1
        slack_rows.append(ri)
        labels += [f"s+[{ri}]", f"s-[{ri}]"]
        lower += [0.0, 0.0]
        objective[sp] = 1.0
        objective[sm] = 1.0
        idx = tuple(j for j, _ in r.coeffs) + (sp, sm)
        val = tuple(v for _, v in r.coeffs) + (-1.0, 1.0)
        rows.append(LPRow(idx, val, r.rhs, EQ, f"class{r.cls}: {r.note}", f"class{r.cls}"))
    problem = LPProblem(n_q + 2 * len(slack_rows), objective, rows, lower, labels)
    gammas = {(p.party, p.click): r.rhs for p, r in zip(pairs, cs.by_class(5))}
    return WitnessLP(problem, cs, n_q, slack_rows, mu, rm, pairs, gammas)


def provenance_dump(w: WitnessLP) -> str:
    """JSON listing of every constraint row with its class and right-hand side."""
    rows = []
    for i, r in enumerate(w.constraints.rows):
        if r.cls == 1 and r.relation == GE:
            continue
        rows.append(
            {
                "row": i,
                "class": r.cls,
                "equation": CLASS_EQUATION[r.cls],
                "relation": r.relation,
                "rhs": r.rhs,
                "n_terms": len(r.coeffs),
                "note": r.note,
                **r.detail,
            }
        )
    return json.dumps(
        {"n_q_variables": w.n_q, "n_nonnegativity_bounds": w.n_q, "rows": rows}, indent=1
    )
