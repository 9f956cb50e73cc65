import pytest
from hypothesis import given, strategies as st

from netwitness.lv_model import (
    coarse_grain,
    enumerate_strategies,
    fine_grain,
    image,
    photon_counts,
    region_pairs,
    restrict,
    verify_image_coverage,
)
from netwitness.photonic import realizable_outcomes
from netwitness.topology import Topology, build_6p4s

from oracles import TABLE_ONE as TABLE


def zb(*parties):
    return tuple(p - 1 for p in parties)


def test_enumeration(topo):
    D = enumerate_strategies(topo)
    assert len(D) == 81 == len(set(D))
    assert D[0] == zb(1, 2, 3, 1)
    assert all(s[m] in topo.targets[m] for s in D for m in range(4))


def test_restricted_counts(rm):
    assert len(rm.strategies) == 30
    assert len(rm.patterns) == 15
    assert len(rm.outcomes) == 240
    assert all(len(rm.support[p]) == 2 for p in rm.patterns)


def test_table_one(rm):
    rows = [(tuple(p + 1 for p in s), rm.pattern_of[s]) for s in rm.strategies]
    assert rows == TABLE


def test_support_of_x00xxx(rm):
    assert set(rm.support["X00XXX"]) == {zb(1, 4, 6, 5), zb(1, 5, 4, 6)}
    assert rm.label(zb(1, 4, 6, 5)) == 10


def test_image_examples(topo):
    assert image(zb(3, 4, 6, 5), topo) == {"00XXXX"}
    # A1 receives sources 1 and 4, A2 and A3 receive sources 2 and 3
    assert image(zb(1, 2, 3, 1), topo) == {"2XX000", "XXX000"}


@given(st.sampled_from(enumerate_strategies(build_6p4s())))
def test_image_respects_photon_count(s):
    for pat in image(s, build_6p4s()):
        assert pat.count("X") + 2 * pat.count("2") <= 4


def test_fine_graining_count(rm):
    for pat in rm.patterns:
        outs = fine_grain(pat)
        assert len(outs) == 2 ** pat.count("X") == 16
        assert {coarse_grain(a) for a in outs} == {pat}


def test_os_membership(rm):
    for a in rm.outcomes:
        assert sum(c in "LR" for c in a) == 4 and a.count("0") == 2 and "2" not in a


def test_image_coverage(topo, ring6):
    assert verify_image_coverage(topo)
    assert verify_image_coverage(ring6)


def test_coverage_detects_missing_edge(topo):
    # drop the A6 edge of source 4; compare its image against the intact network
    cut = Topology(6, ((0, 1, 2), (1, 3, 4), (2, 3, 5), (0, 4)))
    assert not verify_image_coverage(cut, realizable_outcomes(topo))


def test_region_pair_for_a1_left(topo, rm, pairs):
    p = pairs[0]
    assert (p.party, p.click, p.sources) == (0, "L", (0, 3))
    assert p.o_p1 == ("L00XXX",) and p.o_p2 == ("LXXX00",)
    assert [rm.label(s) for s in p.s_p1] == [10, 11]
    assert [rm.label(s) for s in p.s_p2] == [28, 29]


def test_region_pairs_shape(topo, pairs):
    assert len(pairs) == 12
    assert [(p.party, p.click) for p in pairs] == [(n, c) for n in range(6) for c in "LR"]
    for p in pairs:
        assert not set(p.s_p1) & set(p.s_p2)
        assert p.sources[0] < p.sources[1]


def test_ring6_counts(ring6):
    rm = restrict(ring6)
    assert len(enumerate_strategies(ring6)) == 81
    assert all(photon_counts(s, 6).count(1) == 4 for s in rm.strategies)
    assert len(region_pairs(ring6, rm)) == 12
