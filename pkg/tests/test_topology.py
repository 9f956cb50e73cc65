import json

import pytest
from hypothesis import given, strategies as st

from netwitness.topology import (
    Topology,
    TopologyParseError,
    TopologyValidationError,
    build_6p4s,
    build_reference_ring,
    format_strategy,
    load_topology,
    parse_topology,
    serialize_topology,
    validate,
)


def rules(t):
    return {rule for rule, _ in validate(t).violations}


def test_6p4s_target_lists(topo):
    assert topo.targets == ((0, 1, 2), (1, 3, 4), (2, 3, 5), (0, 4, 5))
    assert topo.n_sources == 4
    assert topo.targets[1] == (1, 3, 4)
    assert topo.sources_of(0) == (0, 3)
    assert validate(topo).ok


def test_default_wiring_puts_lower_source_on_mode_one(topo):
    assert topo.mode_wiring[0] == (0, 3)
    assert topo.input_mode(0, 0) == 0 and topo.input_mode(3, 0) == 1
    swapped = topo.with_mode_swap([0])
    assert swapped.mode_wiring[0] == (3, 0)


@pytest.mark.parametrize("n", [6, 9, 12, 15])
def test_reference_ring_valid(n):
    t = build_reference_ring(n)
    assert validate(t).ok
    assert t.n_sources == 2 * n // 3
    assert sum(len(tl) for tl in t.targets) == 3 * t.n_sources == 2 * n


@pytest.mark.parametrize("n", [3, 5, 7, 8])
def test_reference_ring_rejects_bad_n(n):
    with pytest.raises(ValueError):
        build_reference_ring(n)


def test_ring6_differs_from_6p4s(ring6, topo):
    # in the reference ring A3 and A6 share two sources; in 6p4s only one
    shared = lambda t: set(t.sources_of(2)) & set(t.sources_of(5))
    assert len(shared(ring6)) == 2
    assert len(shared(topo)) == 1


def test_validate_reports_source_count():
    t = Topology(6, ((0, 1, 2), (3, 4, 5), (0, 3, 4)))
    assert "source-count" in rules(t)


def test_validate_reports_three_lvs_at_one_party():
    t = Topology(6, ((0, 1, 2), (0, 3, 4), (0, 3, 5), (1, 4, 5)))
    assert "two-lvs-per-party" in rules(t)


def test_validate_reports_duplicate_and_tripartite():
    t = Topology(6, ((0, 1, 2), (0, 1, 2), (3, 4, 5), (3, 4, 5)))
    assert "duplicate-source" in rules(t)
    t = Topology(6, ((0, 0, 2), (1, 3, 4), (2, 3, 5), (1, 4, 5)))
    assert "distinct-targets" in rules(t)
    t = Topology(6, ((0, 1, 2, 3), (1, 3, 4), (2, 3, 5), (0, 4, 5)))
    assert "tripartite" in rules(t)


def test_roundtrip_6p4s(topo):
    assert parse_topology(serialize_topology(topo)) == topo
    swapped = topo.with_mode_swap([1, 4])
    assert parse_topology(serialize_topology(swapped)) == swapped


@given(st.sampled_from([6, 9, 12, 15]), st.sets(st.integers(0, 14)))
def test_roundtrip_property(n, swap):
    t = build_reference_ring(n).with_mode_swap(p for p in swap if p < n)
    assert parse_topology(serialize_topology(t)) == t


def test_parse_is_one_based(topo):
    doc = json.loads(serialize_topology(topo))
    assert doc["sources"][1] == [2, 4, 5]


def test_parse_errors_are_distinct():
    with pytest.raises(TopologyParseError):
        parse_topology("{not json")
    with pytest.raises(TopologyParseError):
        parse_topology(json.dumps({"n_parties": "six", "sources": []}))
    with pytest.raises(TopologyValidationError) as ei:
        parse_topology(json.dumps({"n_parties": 6, "sources": [[1, 2, 3, 4], [2, 4, 5], [3, 4, 6], [1, 5, 6]]}))
    assert ei.value.code == "topology-validation-error"
    with pytest.raises(TopologyValidationError):
        parse_topology(json.dumps({"n_parties": 6, "sources": [[1, 2, 3], [1, 2, 3], [4, 5, 6], [4, 5, 6]]}))


def test_load_topology_specs(tmp_path, topo):
    assert load_topology("6p4s") == topo
    assert load_topology("ring:9") == build_reference_ring(9)
    f = tmp_path / "t.json"
    f.write_text(serialize_topology(topo))
    assert load_topology(str(f)) == topo
    with pytest.raises(TopologyParseError):
        load_topology(str(tmp_path / "missing.json"))


def test_format_strategy():
    assert format_strategy((0, 3, 5, 4)) == "(A1,A4,A6,A5)"
