"""Brute-force checks of the structural results the LP construction relies on.

Each check returns a list of human-readable failures (empty means it holds),
so callers can report every counterexample rather than the first one.
"""
from __future__ import annotations

import math

from .lv_model import (
    RegionPair,
    RestrictedModel,
    enumerate_strategies,
    fine_image,
    image,
    region_pairs,
    repeat_free,
    restrict,
    substring_compatible,
)
from .photonic import Behavior, marginal
from .topology import Topology, format_strategy
from .witness import MuModel, compute_mu


def check_no_repeats(t: Topology, rm: RestrictedModel) -> list[str]:
    """No strategy in S sends two photons to one party, and every repeat-free
    strategy whose image meets O_S is in S."""
    bad = [f"{format_strategy(s)} in S repeats a party" for s in rm.strategies if not repeat_free(s)]
    for s in enumerate_strategies(t):
        if repeat_free(s) and image(s, t) & set(rm.patterns) and s not in rm.S:
            bad.append(f"{format_strategy(s)} is repeat-free with image in O_S but missing from S")
    return bad


def check_image_inside(t: Topology, rm: RestrictedModel) -> list[str]:
    """Strategies of S only produce outcomes in O_S."""
    bad = []
    for s in rm.strategies:
        outside = fine_image(s, t) - rm.O_S
        if outside:
            bad.append(f"{format_strategy(s)} produces {sorted(outside)[0]} outside O_S")
    return bad


def check_region_closure(t: Topology, rm: RestrictedModel, pairs: list[RegionPair]) -> list[str]:
    """Strategies in S_p1 and S_p2 stay inside O_p1 and O_p2 respectively, and
    the two strategy regions are disjoint."""
    bad = []
    for p in pairs:
        tag = f"(A{p.party + 1},{p.click})"
        if set(p.s_p1) & set(p.s_p2):
            bad.append(f"{tag}: S_p1 and S_p2 overlap")
        for which, strategies in ((1, p.s_p1), (2, p.s_p2)):
            allowed = set(p.coarse(which))
            for s in strategies:
                extra = image(s, t) - allowed
                if extra:
                    bad.append(f"{tag}: {format_strategy(s)} reaches {sorted(extra)[0]} outside O_p{which}")
        for m, strategies in zip(p.sources, (p.s_p1, p.s_p2)):
            others = set(t.targets[m]) - {p.party}
            for s in strategies:
                rest = [q for k, q in enumerate(s) if k != m]
                if s[m] != p.party or any(q in others or q == p.party for q in rest):
                    bad.append(f"{tag}: {format_strategy(s)} does not certify source {m + 1}")
    return bad


def check_substring_certifies(t: Topology, rm: RestrictedModel) -> list[str]:
    """Every supporter of a pattern containing substring a^(m,n) has lambda_m = A_n."""
    bad = []
    for pat in rm.patterns:
        for m, tl in enumerate(t.targets):
            for n in tl:
                if not substring_compatible(pat, t, m, n):
                    continue
                for s in rm.support[pat]:
                    if s[m] != n:
                        bad.append(f"{pat}: {format_strategy(s)} has source {m + 1} at A{s[m] + 1}, not A{n + 1}")
    return bad


def region_weight_gaps(b: Behavior, t: Topology, rm: RestrictedModel, pairs: list[RegionPair], mu: MuModel | None = None) -> list[float]:
    """``sum_{S_p1} mu(lambda) - p(O_p1)`` per pair, with O_p1 taken at the
    single-click level for party n (the weight of a region does not depend
    on which mode the photon leaves by)."""
    mu = mu or compute_mu(b, rm, t)
    gaps = []
    for p in pairs:
        for which, strategies in ((1, p.s_p1), (2, p.s_p2)):
            w = math.fsum(mu.mu_strategy[s] for s in strategies)
            m = math.fsum(marginal(b, pat) for pat in p.coarse(which))
            gaps.append(w - m)
    return gaps


def check_region_weights(b: Behavior, t: Topology, tol: float = 1e-10) -> list[str]:
    rm = restrict(t)
    pairs = region_pairs(t, rm)
    gaps = region_weight_gaps(b, t, rm, pairs)
    return [f"region weight gap {g:.3e}" for g in gaps if abs(g) > tol]


def run_all(t: Topology, b: Behavior | None = None) -> dict[str, list[str]]:
    """Every structural check for ``t``; the weight identity needs a behavior."""
    rm = restrict(t)
    pairs = region_pairs(t, rm)
    out = {
        "no-repeats": check_no_repeats(t, rm),
        "image-inside": check_image_inside(t, rm),
        "region-closure": check_region_closure(t, rm, pairs),
        "substring-certifies": check_substring_certifies(t, rm),
    }
    if b is not None:
        out["region-weights"] = check_region_weights(b, t)
    return out
