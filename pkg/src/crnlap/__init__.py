"""Chemical reaction networks analysed through directed graph Laplacians."""

from .graph import DiGraph, Edge, GraphError, LaplacianMatrices, build_matrices, reverse
from .model import CrnSystem, ValidationError, effective_rate_matrix, psi, vector_field
from .parse import ParseError, load, parse, parse_json
from .reach import ReachStructure, coreaches, is_csc, reaches, strong_components, weak_components

__version__ = "0.1.0"

__all__ = [
    "CrnSystem",
    "DiGraph",
    "Edge",
    "GraphError",
    "LaplacianMatrices",
    "ParseError",
    "ReachStructure",
    "ValidationError",
    "build_matrices",
    "coreaches",
    "effective_rate_matrix",
    "is_csc",
    "load",
    "parse",
    "parse_json",
    "psi",
    "reaches",
    "reverse",
    "strong_components",
    "vector_field",
    "weak_components",
]
