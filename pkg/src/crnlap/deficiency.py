"""Laplacian and classical deficiencies, and the zero-deficiency diagnosis."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, is_integral, nullspace, rational_rank
from .model import CrnSystem
from .reach import is_csc


class Verdict(str, enum.Enum):
    POSITIVE_EQUILIBRIUM_EXISTS = "PositiveEquilibriumExists"
    NO_POSITIVE_EQUILIBRIUM = "NoPositiveEquilibrium"
    INCONCLUSIVE = "Inconclusive"


# Stable identifiers for the results each verdict rests on.
THEOREM_ZERO_DEFICIENCY = "zero-laplacian-deficiency"
THEOREM_BOUNDED_ORBITS = "zero-laplacian-deficiency/bounded-log-orbits"
THEOREM_KERNEL_INCLUSION = "kernel-inclusion"


@dataclass(frozen=True)
class DeficiencyReport:
    delta_L: int
    delta_classical: int
    csc: bool
    dim_ker_SLT: int  # Ker S L_out^T, in vertex space
    dim_ker_LT: int  # Ker L_out^T
    dim_ker_dTST: int  # Ker d^T S^T, in species space
    dim_ker_LST: int  # Ker L_out S^T
    verdict: Verdict
    classical_exact: bool = True
    # (smallest kept, largest dropped) relative singular values of S L_out^T and L_out^T
    gap_SLT: tuple[float, float] = (float("inf"), 0.0)
    gap_LT: tuple[float, float] = (float("inf"), 0.0)

    @property
    def citation(self) -> str:
        if self.verdict is Verdict.NO_POSITIVE_EQUILIBRIUM:
            return THEOREM_BOUNDED_ORBITS
        return THEOREM_ZERO_DEFICIENCY

    def explain(self) -> str:
        if self.verdict is Verdict.POSITIVE_EQUILIBRIUM_EXISTS:
            return (
                "Laplacian deficiency is zero and the graph is CSC: there is a unique positive "
                f"equilibrium in every invariant class [{THEOREM_ZERO_DEFICIENCY}]"
            )
        if self.verdict is Verdict.NO_POSITIVE_EQUILIBRIUM:
            return (
                "Laplacian deficiency is zero but the graph is not CSC: no positive equilibrium, "
                f"and no positive orbit keeps every ln x_i bounded [{THEOREM_BOUNDED_ORBITS}]"
            )
        return (
            f"Laplacian deficiency is {self.delta_L} > 0: the zero-deficiency results do not apply "
            f"[{THEOREM_ZERO_DEFICIENCY}]"
        )


def _kernel_dim(M: np.ndarray, tol: float) -> tuple[int, tuple[float, float]]:
    sub = nullspace(M, tol)
    return sub.dim, sub.gap


def laplacian_deficiency(sys: CrnSystem, tol: float = DEFAULT_TOL) -> int:
    """``dim Ker(S L_out^T) - dim Ker(L_out^T)``."""
    LT = sys.lap_out.T
    return nullspace(sys.stoich @ LT, tol).dim - nullspace(LT, tol).dim


def classical_deficiency(sys: CrnSystem, tol: float = DEFAULT_TOL) -> int:
    """``dim Ker(S d) - dim Ker(d)`` with ``d`` the incidence matrix.

    Exact over the rationals when ``S`` is integral, floating rank otherwise.
    """
    return _classical(sys, tol)[0]


def _classical(sys: CrnSystem, tol: float) -> tuple[int, bool]:
    D = sys.matrices.incidence
    if sys.n_reactions == 0:
        return 0, True
    if is_integral(sys.stoich):
        S = np.round(sys.stoich).astype(np.int64)
        return rational_rank(D) - rational_rank(S @ D), True
    SD = sys.stoich @ D.astype(float)
    e = sys.n_reactions
    return (e - nullspace(D.astype(float), tol).dim) - (e - nullspace(SD, tol).dim), False


def kernel_inclusion_check(sys: CrnSystem, tol: float = DEFAULT_TOL) -> bool:
    """Every vector of ``Ker(d^T S^T)`` is annihilated by ``L_out S^T``.

    This always holds mathematically; False means the tolerance is inconsistent
    with the data.
    """
    A = sys.matrices.incidence.T.astype(float) @ sys.stoich.T
    LS = sys.lap_out @ sys.stoich.T
    scale = max(1.0, float(np.linalg.norm(LS, 2)))
    for q in nullspace(A, tol).vectors():
        if np.linalg.norm(LS @ q) > 10 * tol * scale:
            return False
    return True


def diagnose(sys: CrnSystem, tol: float = DEFAULT_TOL) -> DeficiencyReport:
    LT = sys.lap_out.T
    S = sys.stoich
    ker_SLT, gap_SLT = _kernel_dim(S @ LT, tol)
    ker_LT, gap_LT = _kernel_dim(LT, tol)
    ker_LST, _ = _kernel_dim(sys.lap_out @ S.T, tol)
    ker_dTST, _ = _kernel_dim(sys.matrices.incidence.T.astype(float) @ S.T, tol)
    delta_L = ker_SLT - ker_LT
    delta, exact = _classical(sys, tol)
    csc = is_csc(sys.graph)
    if delta_L > 0:
        verdict = Verdict.INCONCLUSIVE
    elif csc:
        verdict = Verdict.POSITIVE_EQUILIBRIUM_EXISTS
    else:
        verdict = Verdict.NO_POSITIVE_EQUILIBRIUM
    return DeficiencyReport(
        delta_L=delta_L,
        delta_classical=delta,
        csc=csc,
        dim_ker_SLT=ker_SLT,
        dim_ker_LT=ker_LT,
        dim_ker_dTST=ker_dTST,
        dim_ker_LST=ker_LST,
        verdict=verdict,
        classical_exact=exact,
        gap_SLT=gap_SLT,
        gap_LT=gap_LT,
    )
