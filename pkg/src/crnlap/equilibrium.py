"""Positive equilibria of CSC networks with zero Laplacian deficiency.

A base equilibrium comes from a linear solve in log space; the equilibrium of
any other invariant class is ``x* * exp(mu)`` with ``mu`` in ``Ker(L_out S^T)``,
found by minimising the convex function

    h(alpha) = <x*, exp(Q alpha)> - <z, Q alpha>

over coordinates ``alpha`` of an orthonormal kernel basis ``Q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .deficiency import THEOREM_ZERO_DEFICIENCY, laplacian_deficiency
from .linalg import DEFAULT_TOL, orthogonal_complement, span, structured_kernel
from .model import CrnSystem, psi
from .reach import coreaches, is_csc


class PreconditionViolated(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


class NonConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class NewtonOptions:
    max_iter: int = 60
    armijo: float = 1e-4
    max_halvings: int = 60
    grad_rtol: float = 1e-12
    residual_tol: float = 1e-8


@dataclass(frozen=True, eq=False)
class EquilibriumResult:
    x_star: np.ndarray
    psi_star: np.ndarray
    reach_coefficients: np.ndarray
    residual: float  # ||S L_out^T psi(x*)|| / (||S L_out^T|| ||psi*||)
    class_tag: np.ndarray  # projection of x* onto Ker(L_out S^T)
    iterations: int = 0


def check_preconditions(sys: CrnSystem, tol: float = DEFAULT_TOL) -> None:
    if not is_csc(sys.graph):
        raise PreconditionViolated(f"network is not CSC [{THEOREM_ZERO_DEFICIENCY}]")
    d = laplacian_deficiency(sys, tol)
    if d != 0:
        raise PreconditionViolated(f"Laplacian deficiency is {d}, not 0 [{THEOREM_ZERO_DEFICIENCY}]")


def equilibrium_residual(sys: CrnSystem, x) -> float:
    p = psi(sys, x)
    M = sys.rate_matrix
    scale = max(np.linalg.norm(M, 2) * np.linalg.norm(p), np.finfo(float).tiny)
    return float(np.linalg.norm(M @ p) / scale)


def _result(sys: CrnSystem, x: np.ndarray, tol: float, iterations: int = 0) -> EquilibriumResult:
    p = psi(sys, x)
    comps = coreaches(sys.graph).reaches
    coeffs = np.array([p[sorted(c)].sum() for c in comps])
    Q = sys.conservation_space(tol).basis
    return EquilibriumResult(x, p, coeffs, equilibrium_residual(sys, x), Q @ (Q.T @ x), iterations)


def _min_norm_solve(A: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    if A.size == 0:
        return np.zeros(A.shape[1])
    U, sv, Vt = np.linalg.svd(A, full_matrices=False)
    keep = sv > tol * sv[0] if sv.size and sv[0] > 0 else np.zeros(sv.size, bool)
    return Vt[keep].T @ ((U[:, keep].T @ b) / sv[keep])


def base_equilibrium(
    sys: CrnSystem, tol: float = DEFAULT_TOL, opts: NewtonOptions = NewtonOptions()
) -> EquilibriumResult:
    """A positive equilibrium with ``psi(x*) = sum_m a_m gamma_bar_m``.

    Solves ``S^T u - sum_m (ln a_m) 1_{R_m} = Ln sum_m gamma_bar_m``.  Among all
    solutions the one with smallest ``||u||`` is returned, so ``x* = exp(u)``
    is as close to the all-ones state as the log-linear constraints allow.
    """
    check_preconditions(sys, tol)
    rs = coreaches(sys.graph)
    kb = structured_kernel(sys.lap_out, rs, tol)
    rhs = np.log(np.sum(kb.left_basis, axis=0))
    v = sys.n_complexes
    R = np.column_stack([rs.indicator(m, v) for m in range(rs.count)])
    # eliminate the reach indicators, then take the minimum-norm u
    N = orthogonal_complement(span(list(R.T), v, tol), tol).basis
    u = _min_norm_solve(N.T @ sys.stoich.T, N.T @ rhs, tol)
    log_a = np.linalg.lstsq(R, sys.stoich.T @ u - rhs, rcond=None)[0]
    lin_res = np.linalg.norm(sys.stoich.T @ u - R @ log_a - rhs)
    if lin_res > 1e-8 * (1.0 + np.linalg.norm(rhs)):
        raise NumericalFailure(f"log-linear system not solvable to tolerance (residual {lin_res:.3e})")
    x = np.exp(u)
    res = _result(sys, x, tol)
    if res.residual > opts.residual_tol:
        raise NumericalFailure(f"equilibrium residual {res.residual:.3e} exceeds {opts.residual_tol:g}")
    return res


@dataclass(frozen=True, eq=False)
class ClassObjective:
    """``h(alpha) = <x*, exp(Q alpha)> - <z, Q alpha>`` and its derivatives."""

    x_star: np.ndarray
    Q: np.ndarray
    z: np.ndarray

    def value(self, alpha) -> float:
        mu = self.Q @ alpha
        with np.errstate(over="ignore"):  # trial points may overflow; the line search rejects inf
            return float(self.x_star @ np.exp(mu) - self.z @ mu)

    def gradient(self, alpha) -> np.ndarray:
        return self.Q.T @ (self.x_star * np.exp(self.Q @ alpha) - self.z)

    def hessian(self, alpha) -> np.ndarray:
        d = self.x_star * np.exp(self.Q @ alpha)
        return self.Q.T @ (d[:, None] * self.Q)


def minimize_class_objective(obj: ClassObjective, opts: NewtonOptions = NewtonOptions(), alpha0=None):
    """Damped Newton with Armijo backtracking; returns ``(alpha, iterations)``.

    The iteration starts at ``alpha0`` (default 0, i.e. at ``x*`` itself).
    """
    alpha = np.zeros(obj.Q.shape[1]) if alpha0 is None else np.array(alpha0, dtype=float)
    stop = opts.grad_rtol * (1.0 + np.linalg.norm(obj.z))
    f = obj.value(alpha)
    for it in range(opts.max_iter + 1):
        g = obj.gradient(alpha)
        if np.linalg.norm(g) <= stop:
            return alpha, it
        if it == opts.max_iter:
            break
        step = -np.linalg.solve(obj.hessian(alpha), g)
        slope = float(g @ step)
        if -slope <= 4 * np.finfo(float).eps * max(1.0, abs(f)):
            # predicted decrease is below the resolution of h: the line search
            # cannot discriminate, and the full Newton step is the right one
            alpha = alpha + step
            f = obj.value(alpha)
            continue
        t = 1.0
        for _ in range(opts.max_halvings):
            trial = alpha + t * step
            f_trial = obj.value(trial)
            if np.isfinite(f_trial) and f_trial <= f + opts.armijo * t * slope:
                break
            t *= 0.5
        else:
            # no decrease representable in floating point: we are at the minimiser
            # up to rounding unless the gradient is still large
            if np.linalg.norm(g) <= 1e-8 * (1.0 + np.linalg.norm(obj.z)):
                return alpha, it
            break
        alpha, f = trial, f_trial
    raise NonConvergence(
        f"Newton iteration stopped with gradient norm {np.linalg.norm(obj.gradient(alpha)):.3e}"
    )


def equilibrium_in_class(
    sys: CrnSystem,
    x0,
    tol: float = DEFAULT_TOL,
    opts: NewtonOptions = NewtonOptions(),
    base: EquilibriumResult | None = None,
) -> EquilibriumResult:
    """The unique positive equilibrium sharing ``x0``'s projection onto ``Ker(L_out S^T)``."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.n_species,):
        raise ValueError(f"x0 must have {sys.n_species} components")
    if np.any(x0 <= 0):
        raise PreconditionViolated("x0 must be strictly positive")
    base = base if base is not None else base_equilibrium(sys, tol, opts)
    Q = sys.conservation_space(tol).basis
    if Q.shape[1] == 0:
        return base
    z = Q @ (Q.T @ x0)
    obj = ClassObjective(base.x_star, Q, z)
    alpha, iters = minimize_class_objective(obj, opts)
    x = base.x_star * np.exp(Q @ alpha)
    res = _result(sys, x, tol, iters)
    if res.residual > opts.residual_tol:
        raise NumericalFailure(f"equilibrium residual {res.residual:.3e} exceeds {opts.residual_tol:g}")
    return res


def verify_equilibrium_pair(sys: CrnSystem, x1, x2, tol: float = 1e-9) -> bool:
    """For an equilibrium ``x1 > 0``: is ``x2 > 0`` an equilibrium too?

    Decided by ``Ln(x2 / x1)`` lying in ``Ker(L_out S^T)``.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any(x1 <= 0) or np.any(x2 <= 0):
        raise ValueError("both states must be strictly positive")
    w = np.log(x2 / x1)
    A = sys.lap_out @ sys.stoich.T
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    return bool(np.linalg.norm(A @ w) <= tol * scale * (1.0 + np.linalg.norm(w)))
