"""ZX-diagrams with symbolic phases and their simplification."""

from .diagram import EdgeType, VertexType, ZXDiagram, circuit_to_graph_like, from_circuit, fuse, to_graph_like
from .simplify import IdentityResult, SimplifyReport, full_simplify, is_identity, measure
from .tensor import diagram_matrix, equal_up_to_scalar

__all__ = [
    "EdgeType",
    "IdentityResult",
    "SimplifyReport",
    "VertexType",
    "ZXDiagram",
    "circuit_to_graph_like",
    "diagram_matrix",
    "equal_up_to_scalar",
    "from_circuit",
    "full_simplify",
    "fuse",
    "is_identity",
    "measure",
    "to_graph_like",
]
