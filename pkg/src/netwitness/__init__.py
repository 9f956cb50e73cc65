"""Linear-programming witness of network nonlocality for photonic ring networks."""
from .lv_model import RestrictedModel, enumerate_strategies, region_pairs, restrict
from .photonic import Behavior, behavior, marginal, read_behavior_csv, write_behavior_csv
from .topology import (
    Topology,
    build_6p4s,
    build_reference_ring,
    load_topology,
    parse_topology,
    serialize_topology,
    validate,
)
from .witness import assemble_lp, compute_mu

__all__ = [
    "Behavior",
    "RestrictedModel",
    "Topology",
    "assemble_lp",
    "behavior",
    "build_6p4s",
    "build_reference_ring",
    "compute_mu",
    "enumerate_strategies",
    "load_topology",
    "marginal",
    "parse_topology",
    "read_behavior_csv",
    "region_pairs",
    "restrict",
    "serialize_topology",
    "validate",
    "write_behavior_csv",
]
