"""Mass-action systems ``x' = -S L_out^T psi(x)`` on a complex graph."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graph import DiGraph, LaplacianMatrices, build_matrices
from .linalg import DEFAULT_TOL, Subspace, nullspace, project


class ValidationError(ValueError):
    """Raised when a network violates the structural requirements."""


def complex_label(column, species) -> str:
    terms = []
    for name, coef in zip(species, column):
        if coef == 0:
            continue
        if coef == 1:
            terms.append(name)
        elif float(coef).is_integer():
            terms.append(f"{int(coef)} {name}")
        else:
            terms.append(f"{coef:g} {name}")
    return " + ".join(terms) if terms else "0"


@dataclass(frozen=True, eq=False)
class CrnSystem:
    """Species, complexes (columns of ``stoich``) and the weighted reaction graph.

    ``stoich[j, i]`` is the count of species ``j`` in complex ``i``.  Repeated
    columns are rejected unless ``distinct_complexes`` is False, which is only
    useful for toy systems such as star graphs whose leaves share a complex.
    """

    species_names: tuple[str, ...]
    stoich: np.ndarray
    graph: DiGraph
    complex_labels: tuple[str, ...] = ()
    distinct_complexes: bool = True

    def __post_init__(self):
        S = np.array(self.stoich, dtype=float)
        if S.ndim != 2:
            raise ValidationError("stoichiometric matrix must be 2-D")
        c, v = S.shape
        if len(self.species_names) != c:
            raise ValidationError(f"{len(self.species_names)} species names for {c} rows of S")
        if v != self.graph.vertex_count:
            raise ValidationError(f"S has {v} columns but the graph has {self.graph.vertex_count} vertices")
        if np.any(S < 0) or not np.all(np.isfinite(S)):
            raise ValidationError("S entries must be finite and nonnegative")
        zero_rows = [self.species_names[j] for j in range(c) if not np.any(S[j])]
        if zero_rows:
            raise ValidationError(f"species appear in no complex: {', '.join(zero_rows)}")
        if self.distinct_complexes:
            seen: dict[bytes, int] = {}
            for i in range(v):
                key = S[:, i].tobytes()
                if key in seen:
                    raise ValidationError(f"complexes {seen[key]} and {i} are identical")
                seen[key] = i
        S.setflags(write=False)
        object.__setattr__(self, "stoich", S)
        object.__setattr__(self, "species_names", tuple(self.species_names))
        labels = tuple(self.complex_labels) or tuple(
            complex_label(S[:, i], self.species_names) for i in range(v)
        )
        if len(labels) != v:
            raise ValidationError("one label per complex required")
        object.__setattr__(self, "complex_labels", labels)

    @property
    def n_species(self) -> int:
        return self.stoich.shape[0]

    @property
    def n_complexes(self) -> int:
        return self.stoich.shape[1]

    @property
    def n_reactions(self) -> int:
        return self.graph.edge_count

    @cached_property
    def matrices(self) -> LaplacianMatrices:
        return build_matrices(self.graph)

    @property
    def lap_out(self) -> np.ndarray:
        return self.matrices.lap_out

    @cached_property
    def rate_matrix(self) -> np.ndarray:
        """``-S L_out^T`` (species x complexes)."""
        M = -(self.stoich @ self.lap_out.T) + 0.0
        M.setflags(write=False)
        return M

    def conservation_space(self, tol: float = DEFAULT_TOL) -> Subspace:
        """``Ker(L_out S^T)``: directions whose projection is a constant of motion."""
        return nullspace(self.lap_out @ self.stoich.T, tol)

    def with_rates(self, rates) -> "CrnSystem":
        rates = list(rates)
        if len(rates) != self.n_reactions:
            raise ValidationError(f"expected {self.n_reactions} rate constants, got {len(rates)}")
        g = DiGraph.from_edges(
            self.graph.vertex_count, [(e.tail, e.head, k) for e, k in zip(self.graph.edges, rates)]
        )
        return CrnSystem(self.species_names, self.stoich, g, self.complex_labels, self.distinct_complexes)


def psi(sys: CrnSystem, x) -> np.ndarray:
    """Mass-action monomials ``psi_i = prod_j x_j ** S[j, i]`` with ``0**0 = 1``."""
    x = np.asarray(x, dtype=float)
    S = sys.stoich
    if np.all(x > 0):
        return np.exp(S.T @ np.log(x))
    # factors with zero exponent are skipped, which is the 0**0 = 1 convention
    powers = np.where(S > 0, x[:, None] ** S, 1.0)
    return np.prod(powers, axis=0)


def vector_field(sys: CrnSystem, x) -> np.ndarray:
    return sys.rate_matrix @ psi(sys, x)


def effective_rate_matrix(sys: CrnSystem) -> np.ndarray:
    return np.array(sys.rate_matrix)


def jacobian(sys: CrnSystem, x) -> np.ndarray:
    """``d x'/dx = -S L_out^T diag(psi) S^T diag(1/x)``, valid for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("jacobian requires a strictly positive state")
    return sys.rate_matrix @ (psi(sys, x)[:, None] * sys.stoich.T) / x[None, :]


def class_projection(sys: CrnSystem, x, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection of ``x`` onto ``Ker(L_out S^T)``."""
    return project(sys.conservation_space(tol), x)
