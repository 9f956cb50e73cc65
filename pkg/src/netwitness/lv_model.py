"""Deterministic local-variable strategies and the outcome subsets built on them.

A strategy assigns every source's photon to one party of its target list.
Strategies only decide *which* parties click, never ``L`` versus ``R``, so
images are computed at the level of coarse outcome patterns over
``{0, X, 2}`` and expanded to fine-grained outcomes on demand.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .photonic import ANY_CLICK, LEFT, RIGHT, TWO, ZERO, realizable_outcomes
from .topology import Topology

Strategy = tuple[int, ...]
Pattern = str


def enumerate_strategies(t: Topology) -> list[Strategy]:
    """Cartesian product of the target lists, lexicographic in list position."""
    return list(itertools.product(*t.targets))


def photon_counts(s: Strategy, n_parties: int) -> list[int]:
    counts = [0] * n_parties
    for p in s:
        counts[p] += 1
    return counts


def image(s: Strategy, t: Topology) -> frozenset[Pattern]:
    """Outcome patterns a strategy can produce.

    Replacement: a party receiving one photon shows ``X``.  Collision: a party
    receiving two photons shows either ``2`` or ``X``.
    """
    choices = []
    for k in photon_counts(s, t.n_parties):
        if k == 0:
            choices.append((ZERO,))
        elif k == 1:
            choices.append((ANY_CLICK,))
        else:
            choices.append((TWO, ANY_CLICK))
    return frozenset("".join(c) for c in itertools.product(*choices))


def fine_grain(pattern: str) -> list[str]:
    """Expand every ``X`` into ``L`` and ``R`` (sorted output)."""
    slots = [(LEFT, RIGHT) if c == ANY_CLICK else (c,) for c in pattern]
    return sorted("".join(c) for c in itertools.product(*slots))


def coarse_grain(outcome: str) -> Pattern:
    return "".join(ANY_CLICK if c in (LEFT, RIGHT) else c for c in outcome)


def fine_image(s: Strategy, t: Topology) -> frozenset[str]:
    return frozenset(a for pat in image(s, t) for a in fine_grain(pat))


def verify_image_coverage(t: Topology, realizable: Iterable[str] | None = None) -> bool:
    """True iff the fine-grained image of all strategies equals the realizable set.

    ``realizable`` defaults to the combinatorial set for ``t``; pass the set of
    a different (e.g. physical) network to test a candidate LV model against it.
    """
    target = frozenset(realizable) if realizable is not None else realizable_outcomes(t)
    covered: set[str] = set()
    for s in enumerate_strategies(t):
        covered |= fine_image(s, t)
    return covered == target


def in_os_pattern(pattern: str, n_sources: int) -> bool:
    return pattern.count(ANY_CLICK) == n_sources and pattern.count(ZERO) == len(pattern) - n_sources


@dataclass(frozen=True)
class RestrictedModel:
    """The amenable subset ``O_S`` (exactly ``M`` single clicks) and its pre-image ``S``.

    ``strategies`` is ordered by (supported pattern, assignment), which puts the
    6-party/4-source strategies in the same order as Table 1 of the reference
    construction; ``label(s)`` gives that index.
    """

    n_parties: int
    n_sources: int
    patterns: tuple[Pattern, ...]
    support: Mapping[Pattern, tuple[Strategy, ...]]
    strategies: tuple[Strategy, ...]

    @cached_property
    def outcomes(self) -> tuple[str, ...]:
        return tuple(sorted(a for pat in self.patterns for a in fine_grain(pat)))

    @cached_property
    def O_S(self) -> frozenset[str]:
        return frozenset(self.outcomes)

    @cached_property
    def S(self) -> frozenset[Strategy]:
        return frozenset(self.strategies)

    @cached_property
    def _label(self) -> dict[Strategy, int]:
        return {s: j for j, s in enumerate(self.strategies)}

    def label(self, s: Strategy) -> int:
        return self._label[s]

    @cached_property
    def pattern_of(self) -> dict[Strategy, Pattern]:
        return {s: pat for pat, ss in self.support.items() for s in ss}

    def outcomes_of(self, s: Strategy) -> list[str]:
        """Fine-grained outcomes in ``O_S`` produced by ``s``."""
        return fine_grain(self.pattern_of[s])

    def supporters(self, outcome: str) -> tuple[Strategy, ...]:
        return self.support.get(coarse_grain(outcome), ())


def restrict(t: Topology) -> RestrictedModel:
    """Isolate ``O_S`` and ``S`` by running every strategy through :func:`image`."""
    realizable = realizable_outcomes(t)
    os_patterns = sorted(
        {coarse_grain(a) for a in realizable if in_os_pattern(coarse_grain(a), t.n_sources)}
    )
    os_set = set(os_patterns)
    support: dict[Pattern, list[Strategy]] = {p: [] for p in os_patterns}
    for s in enumerate_strategies(t):
        for pat in image(s, t) & os_set:
            support[pat].append(s)
    patterns = tuple(p for p in os_patterns if support[p])
    frozen = {p: tuple(sorted(support[p])) for p in patterns}
    strategies = tuple(s for p in patterns for s in frozen[p])
    return RestrictedModel(t.n_parties, t.n_sources, patterns, frozen, strategies)


def substring_compatible(pattern: str, t: Topology, source: int, party: int) -> bool:
    """Does ``pattern`` contain the substring where ``party`` clicks and the
    other two targets of ``source`` are silent?"""
    if pattern[party] not in (ANY_CLICK, LEFT, RIGHT):
        return False
    return all(pattern[p] == ZERO for p in t.targets[source] if p != party)


@dataclass(frozen=True)
class RegionPair:
    """The two disjoint ways party ``party`` can click ``click`` inside ``O_S``.

    ``o_p1``/``o_p2`` are pattern sets with the party's symbol fixed to
    ``click``; ``s_p1``/``s_p2`` are the strategies certifying that the photon
    came from ``sources[0]`` / ``sources[1]`` respectively.
    """

    party: int
    click: str
    sources: tuple[int, int]
    o_p1: tuple[str, ...]
    o_p2: tuple[str, ...]
    s_p1: tuple[Strategy, ...]
    s_p2: tuple[Strategy, ...]

    @property
    def o_p(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.o_p1) | set(self.o_p2)))

    def coarse(self, which: int) -> tuple[str, ...]:
        pats = self.o_p1 if which == 1 else self.o_p2
        return tuple(p[: self.party] + ANY_CLICK + p[self.party + 1 :] for p in pats)


def region_strategies(rm: RestrictedModel, t: Topology, source: int, party: int) -> tuple[Strategy, ...]:
    """Strategies in ``S`` with ``source -> party`` and no other photon landing on
    the target list of ``source``."""
    others = set(t.targets[source]) - {party}
    out = []
    for s in rm.strategies:
        if s[source] != party:
            continue
        rest = s[:source] + s[source + 1 :]
        if any(p in others or p == party for p in rest):
            continue
        out.append(s)
    return tuple(out)


def region_pairs(t: Topology, rm: RestrictedModel) -> list[RegionPair]:
    """One pair per party and click value (``2N`` in total)."""
    pairs = []
    for n in range(t.n_parties):
        m1, m2 = t.sources_of(n)
        for c in (LEFT, RIGHT):
            sets = []
            for m in (m1, m2):
                pats = [p for p in rm.patterns if substring_compatible(p, t, m, n)]
                sets.append(tuple(p[:n] + c + p[n + 1 :] for p in pats))
            pairs.append(
                RegionPair(
                    party=n,
                    click=c,
                    sources=(m1, m2),
                    o_p1=sets[0],
                    o_p2=sets[1],
                    s_p1=region_strategies(rm, t, m1, n),
                    s_p2=region_strategies(rm, t, m2, n),
                )
            )
    return pairs


def strategy_table(t: Topology, rm: RestrictedModel) -> list[tuple[int, Strategy, Pattern]]:
    """Rows ``(label, strategy, supported pattern)`` in label order."""
    return [(rm.label(s), s, rm.pattern_of[s]) for s in rm.strategies]


def pattern_weights(rm: RestrictedModel, n_strategies: int) -> dict[Pattern, float]:
    """Fraction of all strategies supporting each pattern."""
    return {p: len(rm.support[p]) / n_strategies for p in rm.patterns}


def repeat_free(s: Sequence[int]) -> bool:
    return max(Counter(s).values()) <= 1
