"""Berge girth of uniform hypergraphs: exact tools, encodings, censuses and random extraction."""

__version__ = "0.1.0"

from .hypercore import (  # noqa: E402
    BergeCycleWitness,
    Hypergraph,
    HypergraphError,
    complete,
    find_berge_cycle,
    from_json,
    girth,
    is_linear,
    shadow,
    to_json,
    validate,
)

__all__ = [
    "BergeCycleWitness",
    "Hypergraph",
    "HypergraphError",
    "complete",
    "find_berge_cycle",
    "from_json",
    "girth",
    "is_linear",
    "shadow",
    "to_json",
    "validate",
]
