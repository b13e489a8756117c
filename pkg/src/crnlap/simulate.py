"""Forward integration of mass-action dynamics with Lyapunov monitoring.

The integrator is a Dormand-Prince 5(4) embedded pair with standard error
control.  A step that leaves the nonnegative orthant by more than
``clip_floor`` is rejected and retried at half the step size; components
within ``clip_floor`` of zero that are still decreasing are set to zero,
which is safe because the vector field points inward on every face.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.special import xlogy

from .linalg import DEFAULT_TOL
from .model import CrnSystem, psi, vector_field


class StepSizeUnderflow(RuntimeError):
    def __init__(self, t: float, state: np.ndarray, h: float):
        self.t = t
        self.state = state
        self.h = h
        super().__init__(f"step size {h:.3e} underflow at t={t:.6g}, state={np.array2string(state, precision=6)}")


class InvalidReference(ValueError):
    """The reference state is not complex balanced."""


class DissipationViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorOptions:
    rtol: float = 1e-7
    atol: float = 1e-9
    first_step: float | None = None
    max_step: float = math.inf
    clip_floor: float = 1e-14
    max_steps: int = 1_000_000
    safety: float = 0.9
    min_factor: float = 0.2
    max_factor: float = 5.0


@dataclass
class StepStats:
    accepted: int = 0
    rejected_error: int = 0
    rejected_negative: int = 0
    clamped: int = 0
    min_raw_component: float = math.inf
    boundary_violations: int = 0
    rhs_evals: int = 0

    @property
    def rejected(self) -> int:
        return self.rejected_error + self.rejected_negative


@dataclass(eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_times, c)
    derivatives: np.ndarray  # vector field at each state, used for Hermite sampling
    conserved: np.ndarray  # (n_times, d) coordinates of the projection onto Ker(L_out S^T)
    conserved_basis: np.ndarray  # (c, d)
    lyapunov: np.ndarray | None = None
    x_star: np.ndarray | None = None
    step_stats: StepStats = field(default_factory=StepStats)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def conservation_drift(self) -> float:
        if self.conserved.shape[1] == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.conserved - self.conserved[0], axis=1)))

    def lyapunov_increase(self) -> float:
        """Largest step-to-step increase of V (0 when V never increases)."""
        if self.lyapunov is None or len(self.lyapunov) < 2:
            return 0.0
        return float(max(0.0, np.max(np.diff(self.lyapunov))))

    def sample(self, t) -> np.ndarray:
        """States at arbitrary times by cubic Hermite interpolation between steps."""
        spline = CubicHermiteSpline(self.times, self.states, self.derivatives, axis=0)
        out = spline(np.asarray(t, dtype=float))
        return np.maximum(out, 0.0)

    def to_csv(self, path, species_names=None) -> None:
        """Columns ``t, x_1..x_c, V, z_1..z_d`` (V empty without a reference)."""
        c = self.states.shape[1]
        d = self.conserved.shape[1]
        header = ["t"] + [f"x_{i + 1}" for i in range(c)] + ["V"] + [f"z_{i + 1}" for i in range(d)]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for n, t in enumerate(self.times):
                V = "" if self.lyapunov is None else repr(float(self.lyapunov[n]))
                w.writerow(
                    [repr(float(t))]
                    + [repr(float(a)) for a in self.states[n]]
                    + [V]
                    + [repr(float(a)) for a in self.conserved[n]]
                )


# Dormand-Prince 5(4)
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _initial_step(f, y0, f0, opts: IntegratorOptions, span: float) -> float:
    scale = opts.atol + opts.rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h, span, opts.max_step)


def lyapunov_terms(x, x_star) -> np.ndarray:
    """``x (ln x - ln x*) - (x - x*)`` per component, continuous at ``x = 0``."""
    x = np.asarray(x, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    return xlogy(x, x) - x * np.log(x_star) - (x - x_star)


def lyapunov_value(x, x_star) -> float:
    """``V(x) = sum_i x_i (ln x_i - ln x*_i) - (x_i - x*_i)``; zero only at ``x*``."""
    x = np.asarray(x, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    if np.any(x <= 0) or np.any(x_star <= 0):
        raise ValueError("lyapunov_value needs strictly positive states")
    return float(np.sum(lyapunov_terms(x, x_star)))


def integrate(
    sys: CrnSystem,
    x0,
    t_end: float,
    opts: IntegratorOptions = IntegratorOptions(),
    x_star=None,
    tol: float = DEFAULT_TOL,
) -> Trajectory:
    """Integrate ``x' = -S L_out^T psi(x)`` from ``x0`` over ``[0, t_end]``."""
    y = np.array(x0, dtype=float)
    if y.shape != (sys.n_species,):
        raise ValueError(f"x0 must have {sys.n_species} components")
    if np.any(y < 0):
        raise ValueError("x0 must be nonnegative")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if x_star is not None:
        x_star = np.asarray(x_star, dtype=float)
        if np.any(x_star <= 0):
            raise ValueError("reference state must be strictly positive")

    stats = StepStats()
    M = sys.rate_matrix

    def f(x):
        stats.rhs_evals += 1
        return M @ psi(sys, x)

    t = 0.0
    fy = f(y)
    times, states, derivs = [t], [y.copy()], [fy.copy()]
    h = opts.first_step or _initial_step(f, y, fy, opts, t_end)
    h_floor_rel = 4 * np.finfo(float).eps
    K = np.empty((7, y.size))

    while t < t_end:
        if stats.accepted + stats.rejected > opts.max_steps:
            raise StepSizeUnderflow(t, y, h)
        h = min(h, opts.max_step, t_end - t)
        if h <= h_floor_rel * max(1.0, abs(t)):
            raise StepSizeUnderflow(t, y, h)
        K[0] = fy
        for s in range(1, 7):
            K[s] = f(y + h * (np.asarray(_A[s]) @ K[:s]))
        y_new = y + h * (_B5 @ K)
        err_vec = h * (_E @ K)
        scale = opts.atol + opts.rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2))) if y.size else 0.0

        if not np.all(np.isfinite(y_new)) or not np.isfinite(err):
            stats.rejected_error += 1
            h *= 0.5
            continue
        if err > 1.0:
            stats.rejected_error += 1
            h *= max(opts.min_factor, opts.safety * err ** -0.2)
            continue
        raw_min = float(y_new.min()) if y_new.size else math.inf
        if raw_min < -opts.clip_floor:
            stats.rejected_negative += 1
            h *= 0.5
            continue

        stats.min_raw_component = min(stats.min_raw_component, raw_min)
        f_new = K[6].copy()  # first-same-as-last: K[6] = f(y_new)
        small = (y_new < opts.clip_floor) & ((f_new < 0) | (y_new < 0))
        if np.any(small):
            y_new = np.where(small, 0.0, y_new)
            f_new = f(y_new)
            stats.clamped += int(small.sum())
            stats.boundary_violations += int(np.sum(f_new[small] < -1e-12 * max(1.0, np.abs(f_new).max())))

        t = t + h
        y, fy = y_new, f_new
        times.append(t)
        states.append(y.copy())
        derivs.append(fy.copy())
        stats.accepted += 1
        factor = opts.max_factor if err == 0 else min(opts.max_factor, max(opts.min_factor, opts.safety * err ** -0.2))
        h *= factor

    states_arr = np.array(states)
    Q = sys.conservation_space(tol).basis
    lyap = None
    if x_star is not None:
        lyap = np.array([np.sum(lyapunov_terms(x, x_star)) for x in states_arr])
    return Trajectory(
        times=np.array(times),
        states=states_arr,
        derivatives=np.array(derivs),
        conserved=states_arr @ Q,
        conserved_basis=Q,
        lyapunov=lyap,
        x_star=x_star,
        step_stats=stats,
    )


def lyapunov_rate(sys: CrnSystem, x, x_star) -> float:
    """``dV/dt = x' . Ln(x / x*)`` evaluated analytically."""
    x = np.asarray(x, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    if np.any(x <= 0) or np.any(x_star <= 0):
        raise ValueError("lyapunov_rate needs strictly positive states")
    return float(vector_field(sys, x) @ np.log(x / x_star))


def check_reference(sys: CrnSystem, x_star, rtol: float = 1e-8) -> None:
    """Raise :class:`InvalidReference` unless ``psi(x*)`` is a left null vector of ``L_out``."""
    p = psi(sys, x_star)
    L = sys.lap_out
    if np.linalg.norm(L.T @ p) > rtol * max(np.linalg.norm(L, 2), 1.0) * np.linalg.norm(p):
        raise InvalidReference("psi(x*) is not in the left kernel of L_out")


def dissipation_check(sys: CrnSystem, x, x_star, tol: float = 1e-10) -> float:
    """Return ``dV/dt`` at ``x`` after checking it is not positive."""
    x_star = np.asarray(x_star, dtype=float)
    check_reference(sys, x_star)
    rate = lyapunov_rate(sys, x, x_star)
    x = np.asarray(x, dtype=float)
    scale = max(1.0, np.linalg.norm(vector_field(sys, x)) * np.linalg.norm(np.log(x / x_star)))
    if rate > tol * scale:
        raise DissipationViolation(f"dV/dt = {rate:.3e} > 0")
    return rate


def psi_ratio_constant_on_components(sys: CrnSystem, x, x_star, rtol: float = 1e-9) -> bool:
    """Is ``psi(x) / psi(x*)`` constant on every strong component?"""
    from .reach import strong_components

    r = psi(sys, x) / psi(sys, x_star)
    for comp in strong_components(sys.graph):
        vals = r[sorted(comp)]
        if np.ptp(vals) > rtol * np.max(np.abs(vals)):
            return False
    return True


@dataclass(frozen=True, eq=False)
class PsiAverage:
    mean: np.ndarray
    residual: float  # ||L_out^T mean||


def time_average_psi(traj: Trajectory, sys: CrnSystem) -> PsiAverage:
    """Trapezoidal time average of ``psi`` along the trajectory."""
    P = np.array([psi(sys, x) for x in traj.states])
    if len(traj.times) == 1:
        mean = P[0]
    else:
        mean = np.trapezoid(P, traj.times, axis=0) / (traj.times[-1] - traj.times[0])
    return PsiAverage(mean, float(np.linalg.norm(sys.lap_out.T @ mean)))
