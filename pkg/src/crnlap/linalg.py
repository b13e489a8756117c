"""Rank, nullspace and subspace utilities, structured Laplacian kernels.

Floating-point rank decisions use singular values relative to the largest
one.  Integer matrices (incidence, stoichiometry) can instead go through
exact fraction elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import optimize

from .reach import ReachStructure

DEFAULT_TOL = 1e-9


class KernelDimensionError(RuntimeError):
    """Numeric kernel dimension disagrees with the reach count."""


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of R^n stored as an orthonormal basis (columns of ``basis``).

    ``gap`` is ``(smallest kept, largest dropped)`` singular value relative to
    the largest singular value of the matrix the subspace was derived from;
    it tells how clear-cut the rank decision was.
    """

    basis: np.ndarray
    ambient_dim: int
    tolerance: float = DEFAULT_TOL
    gap: tuple[float, float] = (math.inf, 0.0)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float).reshape(self.ambient_dim, -1)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def vectors(self) -> list[np.ndarray]:
        return [self.basis[:, i].copy() for i in range(self.dim)]

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.linalg.norm(x - project(self, x)) <= tol * (1.0 + np.linalg.norm(x)))


def _singular_values(M: np.ndarray):
    if M.size == 0:
        return np.zeros(0), np.eye(M.shape[1]), np.eye(M.shape[0])
    U, s, Vt = np.linalg.svd(M, full_matrices=True)
    return s, Vt.T, U


def _canonical_signs(Q: np.ndarray) -> np.ndarray:
    """Flip columns so the first entry of non-negligible size is positive."""
    Q = Q.copy()
    for j in range(Q.shape[1]):
        col = Q[:, j]
        big = np.flatnonzero(np.abs(col) > 1e-8 * np.abs(col).max())
        if big.size and col[big[0]] < 0:
            Q[:, j] = -col
    return Q


def _rank_from_sv(s: np.ndarray, tol: float) -> tuple[int, tuple[float, float]]:
    if s.size == 0 or s[0] == 0.0:
        return 0, (math.inf, 0.0)
    rel = s / s[0]
    rank = int(np.sum(rel > tol))
    kept = float(rel[rank - 1]) if rank > 0 else math.inf
    dropped = float(rel[rank]) if rank < rel.size else 0.0
    return rank, (kept, dropped)


def numeric_rank(M, tol: float = DEFAULT_TOL) -> int:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    s, _, _ = _singular_values(M)
    return _rank_from_sv(s, tol)[0]


def nullspace(M, tol: float = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of ``{x : M x = 0}``.

    Singular values at or below ``tol * max singular value`` count as zero.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("nullspace expects a 2-D matrix")
    n = M.shape[1]
    s, V, _ = _singular_values(M)
    rank, gap = _rank_from_sv(s, tol)
    return Subspace(_canonical_signs(V[:, rank:]), n, tol, gap)


def image(M, tol: float = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the column space of ``M``."""
    M = np.asarray(M, dtype=float)
    m = M.shape[0]
    s, _, U = _singular_values(M)
    rank, gap = _rank_from_sv(s, tol)
    return Subspace(_canonical_signs(U[:, :rank]), m, tol, gap)


def span(vectors: Sequence, n: int, tol: float = DEFAULT_TOL) -> Subspace:
    if len(vectors) == 0:
        return Subspace(np.zeros((n, 0)), n, tol)
    return image(np.column_stack([np.asarray(v, dtype=float) for v in vectors]), tol)


def subspace_sum(a: Subspace, b: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    return image(np.hstack([a.basis, b.basis]), tol) if a.dim + b.dim else a


def orthogonal_complement(a: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    if a.dim == 0:
        return Subspace(np.eye(a.ambient_dim), a.ambient_dim, tol)
    return nullspace(a.basis.T, tol)


def intersection(a: Subspace, b: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    """``a ∩ b`` as the complement of the sum of complements."""
    return orthogonal_complement(
        subspace_sum(orthogonal_complement(a, tol), orthogonal_complement(b, tol), tol), tol
    )


def project(sub: Subspace, x) -> np.ndarray:
    """Orthogonal projection of ``x`` onto ``sub``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sub.ambient_dim,):
        raise ValueError(f"vector of shape {x.shape} does not live in R^{sub.ambient_dim}")
    Q = sub.basis
    return Q @ (Q.T @ x)


# -- exact arithmetic -------------------------------------------------------------


def is_integral(M) -> bool:
    M = np.asarray(M)
    if M.dtype.kind in "iub":
        return True
    return bool(np.all(np.isfinite(M)) and np.all(M == np.round(M)))


def _to_fraction_rows(M) -> list[list[Fraction]]:
    M = np.asarray(M)
    return [[Fraction(int(a)) if M.dtype.kind in "iub" else Fraction(float(a)) for a in row] for row in M]


def rational_rref(M) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals, plus pivot columns."""
    A = _to_fraction_rows(M)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        A[r] = [a / p for a in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rational_rank(M) -> int:
    M = np.atleast_2d(np.asarray(M))
    if M.size == 0:
        return 0
    return len(rational_rref(M)[1])


def rational_nullspace(M) -> list[list[Fraction]]:
    """Exact nullspace basis (one list of Fractions per basis vector)."""
    M = np.atleast_2d(np.asarray(M))
    n = M.shape[1]
    R, pivots = rational_rref(M)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -R[i][f]
        basis.append(vec)
    return basis


# -- Laplacian kernels ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KernelBases:
    """Right basis ``gamma_m`` and left basis ``gamma_bar_m`` of an in-degree Laplacian.

    ``gamma_m`` is 1 on the exclusive part of reach m, in (0, 1) on its common
    part and 0 outside the reach.  ``gamma_bar_m`` is positive exactly on the
    cabal of reach m and sums to 1.
    """

    right_basis: tuple[np.ndarray, ...]
    left_basis: tuple[np.ndarray, ...]
    reach_count: int
    structure: ReachStructure | None = field(default=None, repr=False)


def structured_kernel(lap, rs: ReachStructure, tol: float = DEFAULT_TOL) -> KernelBases:
    """Kernel bases of ``lap`` with the support pattern dictated by ``rs``.

    ``lap`` must be the in-degree Laplacian of the graph ``rs`` was computed
    on (or the out-degree Laplacian together with co-reaches).
    """
    L = np.asarray(lap, dtype=float)
    n = L.shape[0]
    k = rs.count
    numeric_dim = nullspace(L, tol).dim
    if numeric_dim != k:
        raise KernelDimensionError(
            f"numeric kernel has dimension {numeric_dim} but the graph has {k} reaches"
        )

    right = []
    for m in range(k):
        g = np.zeros(n)
        H = sorted(rs.exclusive[m])
        C = sorted(rs.common[m])
        g[H] = 1.0
        if C:
            # rows of C: L[C,C] g_C = -L[C,H] 1
            g[C] = np.linalg.solve(L[np.ix_(C, C)], -L[np.ix_(C, H)].sum(axis=1))
        right.append(g)

    left = []
    for m in range(k):
        B = sorted(rs.cabals[m])
        sub = L[np.ix_(B, B)]
        if len(B) == 1:
            w = np.ones(1)
        else:
            w = nullspace(sub.T, tol).basis[:, 0]
            w = np.abs(w)
        g = np.zeros(n)
        g[B] = w / w.sum()
        left.append(g)

    return KernelBases(tuple(right), tuple(left), k, rs)


def zero_multiplicity_check(lap, k: int, tol: float = 1e-8) -> bool:
    """Check that 0 is an eigenvalue of ``-lap`` of algebraic multiplicity ``k``
    and that every other eigenvalue of ``-lap`` has real part below ``-tol``.

    Eigenvalues are compared on the scale ``max(1, ||lap||)``; the geometric
    multiplicity is confirmed with an SVD nullspace.
    """
    L = np.asarray(lap, dtype=float)
    scale = max(1.0, float(np.linalg.norm(L, ord=2))) if L.size else 1.0
    eig = np.linalg.eigvals(-L) / scale
    near_zero = np.abs(eig) <= tol
    if int(near_zero.sum()) != k:
        return False
    if np.any(eig[~near_zero].real >= -tol):
        return False
    return nullspace(L, tol).dim == k


# -- scalar helpers -----------------------------------------------------------------


def _check_positive(*vals):
    for v in vals:
        if not v > 0:
            raise ValueError(f"arguments must be strictly positive, got {v!r}")


def log_gap(a: float, b: float) -> float:
    """``a (ln a - ln b) - (a - b)``; nonnegative, zero iff ``a == b``."""
    _check_positive(a, b)
    return a * (math.log(a) - math.log(b)) - (a - b)


def monotone_gap(a: float, b: float) -> float:
    """``(a - b)(ln a - ln b)``; nonnegative, zero iff ``a == b``."""
    _check_positive(a, b)
    return (a - b) * (math.log(a) - math.log(b))


def coercive_bounds(a: float, b: float) -> tuple[float, float]:
    """Interval ``[x_lo, x_hi]`` outside of which ``b e^x - a x > b``.

    ``f(x) = b e^x - a x`` is convex with minimum at ``ln a - ln b`` and minimum
    value at most ``b``.  The returned endpoints are the two roots of
    ``f(x) = a + b``, a level strictly above the minimum, so they are distinct.
    """
    _check_positive(a, b)
    x_min = math.log(a) - math.log(b)
    level = a + b

    def f(x):
        return b * math.exp(x) - a * x - level

    step = 1.0
    lo = x_min - step
    while f(lo) <= 0:
        step *= 2
        lo = x_min - step
    step = 1.0
    hi = x_min + step
    while f(hi) <= 0:
        step *= 2
        hi = x_min + step
    x_lo = optimize.brentq(f, lo, x_min)
    x_hi = optimize.brentq(f, x_min, hi)
    return x_lo, x_hi
