"""Ring-network descriptions: parties, tripartite sources and input-mode wiring.

Party and source indices are 0-based internally and 1-based in every external
format (JSON configs, CLI output).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "Topology",
    "ValidationReport",
    "TopologyError",
    "TopologyParseError",
    "TopologyValidationError",
    "build_reference_ring",
    "build_6p4s",
    "parse_topology",
    "serialize_topology",
    "validate",
    "load_topology",
]


class TopologyError(ValueError):
    """Base class for topology problems. ``code`` is machine readable."""

    code = "topology-error"


class TopologyParseError(TopologyError):
    code = "topology-parse-error"


class TopologyValidationError(TopologyError):
    code = "topology-validation-error"

    def __init__(self, report: "ValidationReport"):
        self.report = report
        msgs = "; ".join(f"[{rule}] {msg}" for rule, msg in report.violations)
        super().__init__(f"invalid topology: {msgs}")


@dataclass(frozen=True)
class Topology:
    """A ring network of ``n_parties`` parties fed by tripartite sources.

    ``targets[m]`` is the target list of source ``m`` (sorted party indices).
    ``mode_swap`` holds parties whose default input-mode assignment is
    reversed; by default the lower-indexed source feeds input mode 1.
    """

    n_parties: int
    targets: tuple[tuple[int, ...], ...]
    mode_swap: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(
            self, "targets", tuple(tuple(sorted(int(p) for p in tl)) for tl in self.targets)
        )
        object.__setattr__(self, "mode_swap", frozenset(int(p) for p in self.mode_swap))

    @property
    def n_sources(self) -> int:
        return len(self.targets)

    def sources_of(self, party: int) -> tuple[int, ...]:
        """Sources whose target list contains ``party``, ascending."""
        return tuple(m for m, tl in enumerate(self.targets) if party in tl)

    @property
    def mode_wiring(self) -> tuple[tuple[int, ...], ...]:
        """Per party, the sources feeding (input mode 1, input mode 2)."""
        wiring = []
        for n in range(self.n_parties):
            srcs = self.sources_of(n)
            if n in self.mode_swap:
                srcs = tuple(reversed(srcs))
            wiring.append(srcs)
        return tuple(wiring)

    def input_mode(self, source: int, party: int) -> int:
        """0 for input mode 1, 1 for input mode 2."""
        return self.mode_wiring[party].index(source)

    def with_mode_swap(self, parties: Iterable[int]) -> "Topology":
        return Topology(self.n_parties, self.targets, frozenset(parties))


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[tuple[str, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(t: Topology) -> ValidationReport:
    """Collect every violated structural invariant of ``t``."""
    v: list[tuple[str, str]] = []
    N, M = t.n_parties, t.n_sources
    if N < 6 or N % 3 != 0:
        v.append(("party-count", f"N must satisfy N>=6 and N mod 3 = 0, got N={N}"))
    if 3 * M != 2 * N:
        v.append(("source-count", f"M=2N/3 required, got N={N}, M={M}"))
    for m, tl in enumerate(t.targets):
        if len(tl) != 3:
            v.append(("tripartite", f"source {m + 1} has {len(tl)} targets, expected 3"))
        if len(set(tl)) != len(tl):
            v.append(("distinct-targets", f"source {m + 1} repeats a party"))
        bad = [p + 1 for p in tl if not 0 <= p < N]
        if bad:
            v.append(("party-range", f"source {m + 1} targets unknown parties {bad}"))
    seen: dict[frozenset[int], int] = {}
    for m, tl in enumerate(t.targets):
        key = frozenset(tl)
        if key in seen:
            v.append(
                (
                    "duplicate-source",
                    f"sources {seen[key] + 1} and {m + 1} signal to the same parties",
                )
            )
        else:
            seen[key] = m
    for n in range(N):
        k = len(t.sources_of(n))
        if k != 2:
            v.append(("two-lvs-per-party", f"party {n + 1} receives {k} LVs, expected exactly 2"))
    bad_swap = sorted(p + 1 for p in t.mode_swap if not 0 <= p < N)
    if bad_swap:
        v.append(("mode-swap-range", f"mode_swap names unknown parties {bad_swap}"))
    return ValidationReport(tuple(v))


def build_reference_ring(n_parties: int) -> Topology:
    """Reference ring: sources come in pairs centred on parties 1, 4, 7, ...

    Odd-numbered sources reach the next-nearest neighbour to the left of their
    middle party and the nearest neighbour to the right; even-numbered sources
    the reverse.
    """
    N = n_parties
    if N < 6 or N % 3 != 0:
        raise TopologyValidationError(
            ValidationReport((("party-count", f"N must satisfy N>=6 and N mod 3 = 0, got N={N}"),))
        )
    targets = []
    for k in range(N // 3):
        c_odd = 3 * k
        targets.append(((c_odd - 2) % N, c_odd, (c_odd + 1) % N))
        c_even = (3 * (k + 1)) % N
        targets.append(((c_even - 1) % N, c_even, (c_even + 2) % N))
    return Topology(N, tuple(targets))


def build_6p4s() -> Topology:
    """The 6-party, 4-source configuration with Table-1 target lists."""
    return Topology(6, ((0, 1, 2), (1, 3, 4), (2, 3, 5), (0, 4, 5)))


def serialize_topology(t: Topology) -> str:
    doc = {
        "n_parties": t.n_parties,
        "sources": [[p + 1 for p in tl] for tl in t.targets],
    }
    if t.mode_swap:
        doc["mode_swap"] = sorted(p + 1 for p in t.mode_swap)
    return json.dumps(doc, indent=2)


def _int_list(value, what: str) -> list[int]:
    if not isinstance(value, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in value
    ):
        raise TopologyParseError(f"{what} must be an array of integers")
    return value


def parse_topology(text: str) -> Topology:
    """Parse a JSON topology config and validate it.

    Raises :class:`TopologyParseError` for malformed documents and
    :class:`TopologyValidationError` for well-formed but invalid networks.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologyParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise TopologyParseError("top-level document must be an object")
    unknown = set(doc) - {"n_parties", "sources", "mode_swap"}
    if unknown:
        raise TopologyParseError(f"unknown fields: {sorted(unknown)}")
    n = doc.get("n_parties")
    if not isinstance(n, int) or isinstance(n, bool):
        raise TopologyParseError("n_parties must be an integer")
    sources = doc.get("sources")
    if not isinstance(sources, list):
        raise TopologyParseError("sources must be an array of arrays")
    targets = [_int_list(s, f"sources[{i}]") for i, s in enumerate(sources)]
    swap = _int_list(doc.get("mode_swap", []), "mode_swap")
    t = Topology(n, tuple(tuple(p - 1 for p in tl) for tl in targets), frozenset(p - 1 for p in swap))
    report = validate(t)
    if not report.ok:
        raise TopologyValidationError(report)
    return t


def load_topology(source: str) -> Topology:
    """Resolve a CLI topology argument: a file path or ``6p4s`` / ``ring:N``."""
    if source == "6p4s":
        return build_6p4s()
    if source.startswith("ring:"):
        try:
            n = int(source.split(":", 1)[1])
        except ValueError as exc:
            raise TopologyParseError(f"bad ring spec {source!r}") from exc
        return build_reference_ring(n)
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise TopologyParseError(f"cannot read topology file {source!r}: {exc}") from exc
    return parse_topology(text)


def party_label(n: int) -> str:
    return f"A{n + 1}"


def format_strategy(s: Sequence[int]) -> str:
    return "(" + ",".join(party_label(p) for p in s) + ")"
