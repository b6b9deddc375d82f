"""Observability and detectability analysis of coupled LTI arrays over
matrix-weighted graphs."""

from ._core import (
    ArraySystem,
    DisagreementError,
    EffectiveConductance,
    EigEntry,
    EigStructure,
    NGraph,
    Tolerance,
    Trajectory,
    ValidationError,
    __version__,
    analyze_json,
    effective_conductance,
    eig_structure,
    eigengraph,
    eigengraph_necessity_check,
    interconnection_graph,
    is_connected,
    is_detectable,
    is_observable,
    is_pair_connected,
    is_pair_detectable,
    is_pair_observable,
    observability_matrix,
    parse_array_document,
    serialize_array_document,
    simulate,
)

__all__ = [
    "ArraySystem",
    "DisagreementError",
    "EffectiveConductance",
    "EigEntry",
    "EigStructure",
    "NGraph",
    "Tolerance",
    "Trajectory",
    "ValidationError",
    "__version__",
    "analyze_json",
    "effective_conductance",
    "eig_structure",
    "eigengraph",
    "eigengraph_necessity_check",
    "interconnection_graph",
    "is_connected",
    "is_detectable",
    "is_observable",
    "is_pair_connected",
    "is_pair_detectable",
    "is_pair_observable",
    "observability_matrix",
    "parse_array_document",
    "serialize_array_document",
    "simulate",
]
