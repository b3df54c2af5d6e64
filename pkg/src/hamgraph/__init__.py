"""Exact combinatorics of Hamiltonian circle actions on 4-manifolds."""

from .graph_model import (
    DullGraph,
    Edge,
    ExtendedGraph,
    Extreme,
    GraphError,
    Skeleton,
    build_extended,
    canonicalize,
    dull,
    enumerate_graphs,
    ephemeral_edges,
    extremal_self_intersections,
    isotropy_weights,
    make_graph,
    parse_graph,
    poincare_rank,
    validate,
)

__version__ = "0.1.0"
