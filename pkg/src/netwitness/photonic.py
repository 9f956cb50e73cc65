"""Exact Fock-space simulation of the W-state ring experiment.

Each source emits one photon in an equal superposition over its three target
parties, each party mixes its two input modes on a lossless beamsplitter and
reads out one click/no-click detector per output mode.  Outcomes are strings
over ``0`` (no click), ``L``, ``R`` (one mode clicks) and ``2`` (both click).
"""
from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .topology import Topology

log = logging.getLogger(__name__)

ZERO, LEFT, RIGHT, TWO, ANY_CLICK = "0", "L", "R", "2", "X"
SYMBOLS = (ZERO, LEFT, RIGHT, TWO)

Occupation = tuple[int, ...]


class BehaviorError(ValueError):
    code = "behavior-error"


@dataclass(frozen=True)
class FockState:
    """Sparse superposition over occupation vectors.

    Vectors have length ``2N`` laid out as ``(party0 mode1, party0 mode2,
    party1 mode1, ...)``.
    """

    terms: Mapping[Occupation, complex]

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.terms.values()))


@dataclass(frozen=True)
class Behavior:
    """Outcome distribution ``p(a)`` normalised over ``realizable_set``."""

    probs: Mapping[str, float]
    realizable_set: frozenset[str]

    @property
    def n_parties(self) -> int:
        return len(next(iter(self.realizable_set)))

    def __getitem__(self, outcome: str) -> float:
        return self.probs.get(outcome, 0.0)

    def total(self) -> float:
        return math.fsum(self.probs.values())


def initial_state(t: Topology) -> FockState:
    """Product of single-photon W states, one per source."""
    M = t.n_sources
    amp = complex(3.0 ** (-M / 2))
    terms: dict[Occupation, complex] = {}
    for placement in itertools.product(*t.targets):
        occ = [0] * (2 * t.n_parties)
        for m, party in enumerate(placement):
            occ[2 * party + t.input_mode(m, party)] += 1
        key = tuple(occ)
        terms[key] = terms.get(key, 0.0) + amp
    return FockState(terms)


@lru_cache(maxsize=None)
def _two_mode_map(n1: int, n2: int, t: float, phi: float) -> tuple[tuple[int, int, complex], ...]:
    # |n1,n2> = (a1^)^n1 (a2^)^n2 / sqrt(n1! n2!) |0,0>, with
    # a1^ -> sqrt(t) a1^ + e^{i phi} sqrt(1-t) a2^, a2^ -> -e^{-i phi} sqrt(1-t) a1^ + sqrt(t) a2^
    r = math.sqrt(t)
    s = math.sqrt(1.0 - t)
    e = complex(math.cos(phi), math.sin(phi))
    a11, a12 = r, e * s
    a21, a22 = -e.conjugate() * s, r
    out: dict[tuple[int, int], complex] = {}
    norm_in = math.sqrt(math.factorial(n1) * math.factorial(n2))
    for j in range(n1 + 1):
        cj = math.comb(n1, j) * a11**j * a12 ** (n1 - j)
        for k in range(n2 + 1):
            ck = math.comb(n2, k) * a21**k * a22 ** (n2 - k)
            p, q = j + k, n1 + n2 - j - k
            amp = cj * ck * math.sqrt(math.factorial(p) * math.factorial(q)) / norm_in
            out[(p, q)] = out.get((p, q), 0.0) + amp
    return tuple((p, q, a) for (p, q), a in sorted(out.items()) if a != 0)


def apply_beamsplitter(s: FockState, party: int, t: float, phi: float = 0.0) -> FockState:
    """Mix the two input modes of ``party`` with transmissivity ``t``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {t}")
    i = 2 * party
    out: dict[Occupation, complex] = {}
    for occ, amp in s.terms.items():
        for p, q, c in _two_mode_map(occ[i], occ[i + 1], float(t), float(phi)):
            key = occ[:i] + (p, q) + occ[i + 2 :]
            out[key] = out.get(key, 0.0) + amp * c
    return FockState({k: a for k, a in out.items() if a != 0})


def click_symbol(n1: int, n2: int) -> str:
    if n1 and n2:
        return TWO
    if n1:
        return LEFT
    if n2:
        return RIGHT
    return ZERO


def detection_distribution(s: FockState, realizable: frozenset[str] | None = None) -> Behavior:
    """Click statistics of ``s`` under non-number-resolving detectors."""
    probs: dict[str, float] = {}
    for occ, amp in s.terms.items():
        key = "".join(click_symbol(occ[i], occ[i + 1]) for i in range(0, len(occ), 2))
        probs[key] = probs.get(key, 0.0) + abs(amp) ** 2
    if realizable is None:
        realizable = frozenset(probs)
    return Behavior(probs, realizable)


def _assignable(t: Topology, counts: tuple[int, ...]) -> bool:
    # can every source send its photon to a target so that party n receives counts[n]?
    remaining = list(counts)

    def place(m: int) -> bool:
        if m == t.n_sources:
            return not any(remaining)
        for p in t.targets[m]:
            if remaining[p] > 0:
                remaining[p] -= 1
                if place(m + 1):
                    remaining[p] += 1
                    return True
                remaining[p] += 1
        return False

    return place(0)


def realizable_outcomes(t: Topology) -> frozenset[str]:
    """All click strings compatible with photon conservation.

    Enumerates per-party photon counts summing to ``M`` that admit a
    source-to-target assignment, then every click string those counts can
    produce: 0 photons -> ``0``, 1 -> ``L``/``R``, 2+ -> ``L``/``R``/``2``.
    """
    N, M = t.n_parties, t.n_sources
    cap = [len(t.sources_of(n)) for n in range(N)]
    result: set[str] = set()
    for counts in itertools.product(*(range(c + 1) for c in cap)):
        if sum(counts) != M or not _assignable(t, counts):
            continue
        choices = [
            (ZERO,) if k == 0 else (LEFT, RIGHT) if k == 1 else (LEFT, RIGHT, TWO) for k in counts
        ]
        result.update("".join(c) for c in itertools.product(*choices))
    return frozenset(result)


def behavior(t: Topology, trans: float, phi: float = 0.0, order: Iterable[int] | None = None) -> Behavior:
    """Exact ``p(a)`` for shared transmissivity ``trans`` at every party."""
    if not 0.0 <= trans <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {trans}")
    state = initial_state(t)
    for n in range(t.n_parties) if order is None else order:
        state = apply_beamsplitter(state, n, trans, phi)
    return detection_distribution(state, realizable_outcomes(t))


def matches(outcome: str, selector: str) -> bool:
    """Per-party match; ``X`` matches ``L`` or ``R``, ``*`` matches anything."""
    for a, s in zip(outcome, selector):
        if s == "*":
            continue
        if s == ANY_CLICK:
            if a not in (LEFT, RIGHT):
                return False
        elif a != s:
            return False
    return True


def marginal(b: Behavior, selector: str) -> float:
    """Total probability of outcomes matching ``selector``."""
    return math.fsum(p for a, p in b.probs.items() if matches(a, selector))


def write_behavior_csv(b: Behavior) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["outcome", "probability"])
    for a in sorted(b.probs):
        w.writerow([a, repr(float(b.probs[a]))])
    return buf.getvalue()


def read_behavior_csv(text: str, t: Topology, tol: float = 1e-9) -> Behavior:
    """Ingest ``outcome,probability`` rows for topology ``t``.

    Unknown or malformed outcomes are errors; a normalisation deviation above
    ``tol`` only logs a warning since measured data is noisy.
    """
    realizable = realizable_outcomes(t)
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["outcome", "probability"]:
        raise BehaviorError("behavior CSV must start with header 'outcome,probability'")
    probs: dict[str, float] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise BehaviorError(f"line {lineno}: expected 2 fields, got {len(row)}")
        a, raw = row[0].strip(), row[1].strip()
        if len(a) != t.n_parties or any(c not in SYMBOLS for c in a):
            raise BehaviorError(f"line {lineno}: bad outcome string {a!r}")
        if a not in realizable:
            raise BehaviorError(f"line {lineno}: outcome {a} is not realizable in this network")
        try:
            p = float(raw)
        except ValueError as exc:
            raise BehaviorError(f"line {lineno}: bad probability {raw!r}") from exc
        if not math.isfinite(p) or p < 0:
            raise BehaviorError(f"line {lineno}: probability must be finite and >= 0")
        if a in probs:
            raise BehaviorError(f"line {lineno}: duplicate outcome {a}")
        probs[a] = p
    total = math.fsum(probs.values())
    if abs(total - 1.0) > tol:
        log.warning("behavior normalisation deviates from 1 by %.3e", total - 1.0)
    return Behavior(probs, realizable)
