from functools import lru_cache

import pytest

from netwitness.lv_model import region_pairs, restrict
from netwitness.photonic import behavior
from netwitness.topology import build_6p4s, build_reference_ring

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def cached_behavior(kind: str, t: float):
    topo = build_6p4s() if kind == "6p4s" else build_reference_ring(6)
    return behavior(topo, t)


@pytest.fixture(scope="session")
def topo():
    return build_6p4s()


@pytest.fixture(scope="session")
def ring6():
    return build_reference_ring(6)


@pytest.fixture(scope="session")
def rm(topo):
    return restrict(topo)


@pytest.fixture(scope="session")
def pairs(topo, rm):
    return region_pairs(topo, rm)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
