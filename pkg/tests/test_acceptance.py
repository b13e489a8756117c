"""Acceptance criteria, one test each, with the stated tolerances and time budgets.

Each test records a PASS/FAIL line that pytest prints in its terminal summary.
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from crnlap import networks
from crnlap.deficiency import (
    Verdict,
    classical_deficiency,
    diagnose,
    kernel_inclusion_check,
    laplacian_deficiency,
)
from crnlap.equilibrium import (
    ClassObjective,
    base_equilibrium,
    equilibrium_in_class,
    minimize_class_objective,
    verify_equilibrium_pair,
)
from crnlap.graph import build_matrices, reverse
from crnlap.linalg import coercive_bounds, log_gap, monotone_gap, nullspace, structured_kernel
from crnlap.model import CrnSystem, jacobian, vector_field
from crnlap.parse import parse
from crnlap.random_networks import random_csc_graph, random_csc_zero_deficiency, random_digraph, random_stoich, random_system
from crnlap.reach import coreaches, is_csc, reaches
from crnlap.simulate import IntegratorOptions, integrate, lyapunov_value

from test_graph import FIG_LAP_IN, FIG_LAP_OUT
from test_model import EQ_7_2

pytestmark = pytest.mark.acceptance

CASES = 1000
SEED = 20240611


def logistic(t, x0, r, K):
    return K / (1 + (K / x0 - 1) * np.exp(-r * t))


def test_ac1_example1_golden_run(criterion):
    with criterion("AC1", "logistic pair (ex1) golden run", 1.0) as notes:
        sys = parse("X1 -> 2 X1 ; k=1\n2 X1 -> X1 ; k=2\nX2 -> 2 X2 ; k=3\n2 X2 -> X2 ; k=4")
        rep = diagnose(sys)
        assert rep.delta_L == 0 and rep.csc
        assert rep.verdict is Verdict.POSITIVE_EQUILIBRIUM_EXISTS
        x_star = base_equilibrium(sys).x_star
        assert np.max(np.abs(x_star - [0.5, 0.75])) <= 1e-8
        # unique: every class (there is only one) returns the same point
        for x0 in ([0.1, 0.1], [3.0, 0.2], [1.0, 9.0]):
            assert np.max(np.abs(equilibrium_in_class(sys, x0).x_star - [0.5, 0.75])) <= 1e-8
        traj = integrate(sys, [0.1, 0.1], 20.0)
        err = np.max(np.abs(traj.final - [0.5, 0.75]))
        assert err <= 1e-6
        closed = np.array([logistic(20.0, 0.1, 1, 0.5), logistic(20.0, 0.1, 3, 0.75)])
        assert np.max(np.abs(traj.final - closed)) <= 1e-6
        notes.append(f"|x(20) - x*| = {err:.1e}")


def test_ac2_example2_golden_run(criterion):
    with criterion("AC2", "seven-complex network (ex2) golden run", 1.0) as notes:
        sys = networks.shipped("ex2.crn")
        m = build_matrices(sys.graph)
        assert np.array_equal(m.lap_in, FIG_LAP_IN) and np.array_equal(m.lap_out, FIG_LAP_OUT)
        kb = structured_kernel(sys.lap_out, coreaches(sys.graph))
        gamma = np.array([0, 0, 1, 1, 1, 1 / 3, 2 / 3])
        right = sorted(kb.right_basis, key=lambda v: v[0])
        assert np.max(np.abs(right[0] - gamma)) <= 1e-9
        assert np.max(np.abs(right[1] - (1 - gamma))) <= 1e-9
        assert np.max(np.abs(sys.lap_out @ gamma)) <= 1e-9
        left = sorted(kb.left_basis, key=lambda v: -v[0])
        assert np.max(np.abs(left[0] - np.eye(7)[0])) <= 1e-9
        assert np.max(np.abs(left[1] - [0, 0, 1 / 3, 1 / 3, 1 / 3, 0, 0])) <= 1e-9
        assert np.array_equal(sys.rate_matrix, EQ_7_2)
        rep = diagnose(sys)
        assert rep.delta_L == 0 and not rep.csc
        assert rep.verdict is Verdict.NO_POSITIVE_EQUILIBRIUM
        cons = sys.conservation_space()
        assert cons.dim == 1 and cons.contains(np.eye(6)[0])
        assert rep.dim_ker_dTST == 0
        notes.append("verdict NoPositiveEquilibrium, Ker L_out S^T = span{e1}")


def test_ac3_star_family(criterion):
    with criterion("AC3", "star-graph family k=3..8", 5.0) as notes:
        for k in range(3, 9):
            sys = networks.star(k)
            rep = diagnose(sys)
            assert rep.classical_exact
            assert laplacian_deficiency(sys) == 0 and rep.delta_L == 0
            assert classical_deficiency(sys) == k - 1 and rep.delta_classical == k - 1
        notes.append("delta_L = 0, delta = k - 1 (exact rational rank)")


def _graph_properties(rng):
    for _ in range(CASES):
        g = random_digraph(rng)
        m = build_matrices(g)
        n = g.vertex_count
        assert np.abs(m.lap_in.sum(axis=1)).max() <= 1e-12
        assert np.abs(m.lap_out.sum(axis=1)).max() <= 1e-12
        assert np.array_equal(m.lap_out, build_matrices(reverse(g)).lap_in)
        rs = reaches(g)
        assert nullspace(m.lap_in).dim == rs.count
        kb = structured_kernel(m.lap_in, rs)
        for mm in range(rs.count):
            gam, gbar = kb.right_basis[mm], kb.left_basis[mm]
            for v in range(n):
                if v in rs.exclusive[mm]:
                    assert gam[v] == 1.0
                elif v in rs.common[mm]:
                    assert 0 < gam[v] < 1
                else:
                    assert gam[v] == 0.0
                assert (gbar[v] > 0) == (v in rs.cabals[mm])
            assert abs(gbar.sum() - 1) <= 1e-9
        assert np.abs(np.sum(kb.right_basis, axis=0) - 1).max() <= 1e-9


def _deficiency_properties(rng):
    csc_count = 0
    for _ in range(CASES):
        sys = random_system(rng)
        dL, d = laplacian_deficiency(sys), classical_deficiency(sys)
        assert dL <= d
        if is_csc(sys.graph):
            csc_count += 1
            assert dL == d
        assert kernel_inclusion_check(sys)
    for _ in range(CASES):
        g = random_csc_graph(rng)
        S = random_stoich(rng, int(rng.integers(2, 5)), g.vertex_count, max_coef=4)
        sys = CrnSystem(tuple(f"X{i}" for i in range(S.shape[0])), S, g)
        assert laplacian_deficiency(sys) == classical_deficiency(sys)
        assert kernel_inclusion_check(sys)
    return csc_count + CASES


def _scalar_properties(rng):
    a = np.exp(rng.uniform(-8, 8, CASES))
    b = np.exp(rng.uniform(-8, 8, CASES))
    b[: CASES // 10] = a[: CASES // 10]  # include exact ties
    for x, y in zip(a, b):
        lg, mg = log_gap(x, y), monotone_gap(x, y)
        if abs(x - y) <= 1e-12:
            assert abs(lg) <= 1e-12 * max(1, x) and abs(mg) <= 1e-12 * max(1, x)
        else:
            assert lg > 0 and mg > 0
        lo, hi = coercive_bounds(x, y)
        for t in (lo - 1.0, hi + 1.0, lo - 10 * rng.random(), hi + 10 * rng.random()):
            assert y * math.exp(t) - x * t > y


def test_ac4_property_suite(criterion):
    with criterion("AC4", f"property suite ({CASES} cases each, seed {SEED})", 30.0) as notes:
        rng = np.random.default_rng(SEED)
        _graph_properties(rng)
        csc_cases = _deficiency_properties(rng)
        _scalar_properties(rng)
        notes.append(f"{csc_cases} CSC networks with delta_L = delta")


def _restart_check(obj, alpha_ref, rng, restarts):
    for _ in range(restarts):
        alpha0 = alpha_ref + rng.normal(scale=1.0, size=alpha_ref.shape)
        alpha, _ = minimize_class_objective(obj, alpha0=alpha0)
        assert np.max(np.abs(obj.Q @ (alpha - alpha_ref))) <= 1e-8


def test_ac5_equilibrium_solver(criterion):
    n_networks = 120
    with criterion("AC5", f"equilibrium solver on {n_networks} random CSC zero-deficiency networks", 60.0) as notes:
        rng = np.random.default_rng(SEED + 5)
        worst_res = worst_indep = worst_grad = worst_ode = 0.0
        ode_checked = 0
        for i in range(n_networks):
            sys = random_csc_zero_deficiency(rng, max_coef=2 if i % 3 == 0 else 3)
            base = base_equilibrium(sys)
            x0 = rng.uniform(0.2, 3.0, sys.n_species)
            res = equilibrium_in_class(sys, x0, base=base)
            worst_res = max(worst_res, base.residual, res.residual)
            assert res.residual <= 1e-8 and base.residual <= 1e-8
            Q = sys.conservation_space().basis
            if Q.shape[1] == 0:
                continue
            # another representative of the same class: move along Im S L_out^T
            y = sys.rate_matrix @ rng.normal(size=sys.n_complexes)
            y -= Q @ (Q.T @ y)
            t = 0.5 * np.min(x0 / np.maximum(np.abs(y), 1e-300))
            res2 = equilibrium_in_class(sys, x0 + t * y * rng.choice([-1, 1]), base=base)
            indep = np.max(np.abs(res2.x_star - res.x_star))
            worst_indep = max(worst_indep, indep)
            assert indep <= 1e-8
            # gradient of h against central differences
            obj = ClassObjective(base.x_star, Q, Q @ (Q.T @ x0))
            alpha = rng.normal(scale=0.3, size=Q.shape[1])
            g = obj.gradient(alpha)
            h = 1e-6
            fd = np.array([(obj.value(alpha + h * e) - obj.value(alpha - h * e)) / (2 * h) for e in np.eye(Q.shape[1])])
            rel = np.linalg.norm(fd - g) / max(np.linalg.norm(g), 1e-12)
            worst_grad = max(worst_grad, rel)
            assert rel <= 1e-6 or np.linalg.norm(fd - g) <= 1e-9
            # uniqueness across restarts: 100 restarts on the first networks, 5 afterwards
            alpha_ref = Q.T @ np.log(res.x_star / base.x_star)
            _restart_check(obj, alpha_ref, rng, 100 if i < 10 else 5)
            assert verify_equilibrium_pair(sys, base.x_star, res.x_star, tol=1e-8)
            # independent oracle: long-time limit of a stiff reference integrator
            if ode_checked < 15 and i % 3 == 0:
                sol = solve_ivp(lambda t, x: vector_field(sys, x), (0, 2000), x0, method="LSODA", rtol=1e-10, atol=1e-12)
                ode_err = np.max(np.abs(sol.y[:, -1] - res.x_star)) / max(1.0, np.max(res.x_star))
                worst_ode = max(worst_ode, ode_err)
                assert ode_err <= 1e-5
                ode_checked += 1
        notes.append(
            f"residual <= {worst_res:.1e}, independence {worst_indep:.1e}, FD gradient {worst_grad:.1e}, "
            f"ODE oracle {worst_ode:.1e} on {ode_checked}"
        )


def _dynamics_case(rng, max_radius=200.0):
    """Random CSC zero-deficiency system and positive start in the non-stiff regime.

    The integrator is explicit, so the ensemble is restricted to cases whose
    class equilibrium lies in [0.01, 10] and whose Jacobian spectral radius at
    the start, at the equilibrium and at their componentwise maximum is at most
    ``max_radius``.
    """
    while True:
        sys = random_csc_zero_deficiency(rng, max_components=2, max_species=4, max_coef=2)
        x0 = rng.uniform(0.05, 2.0, sys.n_species)
        p = equilibrium_in_class(sys, x0).x_star
        if p.max() > 10 or p.min() < 0.01:
            continue
        rho = max(np.abs(np.linalg.eigvals(jacobian(sys, x))).max() for x in (x0, p, np.maximum(x0, p)))
        if rho <= max_radius:
            return sys, x0, p


def _basin_sample(sys, rng, sampler, tries=200):
    """Draw x0 with V(x0) < min_i x*_i for x* the equilibrium of its own class."""
    for _ in range(tries):
        x0 = sampler()
        p = equilibrium_in_class(sys, x0).x_star
        if lyapunov_value(x0, p) < np.min(p):
            return x0, p
    raise RuntimeError("no basin sample found")


def test_ac6_dynamics(criterion):
    with criterion("AC6", "dynamics suite", 60.0) as notes:
        rng = np.random.default_rng(SEED + 6)
        # forward invariance on randomized systems and initial conditions, including faces
        n_inv, min_raw, clamped = 1000, math.inf, 0
        for _ in range(n_inv):
            sys, x0, _ = _dynamics_case(rng)
            x0[rng.random(sys.n_species) < 0.3] = 0.0
            traj = integrate(sys, x0, 1.0)
            st = traj.step_stats
            assert np.all(traj.states >= 0)
            assert st.min_raw_component >= -1e-12 and st.boundary_violations == 0
            min_raw = min(min_raw, st.min_raw_component)
            clamped += st.clamped
        notes.append(f"invariance: {n_inv} runs, min raw component {min_raw:.1e}, {clamped} clamps")

        # conservation and Lyapunov monotonicity with the solver's reference point
        tight = IntegratorOptions(rtol=1e-9, atol=1e-12)
        worst_drift = worst_dV = 0.0
        for _ in range(100):
            sys, x0, x_star = _dynamics_case(rng)
            traj = integrate(sys, x0, 5.0, tight, x_star=x_star)
            drift = traj.conservation_drift()
            assert drift <= 1e-6 * (1 + np.linalg.norm(x0))
            assert traj.lyapunov_increase() <= 1e-8
            worst_drift, worst_dV = max(worst_drift, drift), max(worst_dV, traj.lyapunov_increase())
        notes.append(f"drift {worst_drift:.1e}, max V increase {worst_dV:.1e}")

        # convergence from the basin estimate: A <-> B family and the logistic pair
        worst_conv = 0.0
        for _ in range(20):
            k1, k2 = np.exp(rng.uniform(-1, 1, 2))
            sys = networks.two_state(k1, k2)
            x0, p = _basin_sample(sys, rng, lambda: rng.uniform(0.2, 3.0, 2))
            traj = integrate(sys, x0, 40.0 / min(k1 + k2, 1.0), tight)
            worst_conv = max(worst_conv, np.max(np.abs(traj.final - p)))
        ex1 = networks.example1()
        for _ in range(10):
            x0, p = _basin_sample(ex1, rng, lambda: np.array([0.5, 0.75]) * np.exp(rng.uniform(-0.7, 0.7, 2)))
            traj = integrate(ex1, x0, 40.0, tight)
            worst_conv = max(worst_conv, np.max(np.abs(traj.final - p)))
        assert worst_conv <= 1e-6
        notes.append(f"basin convergence error {worst_conv:.1e}")

        # no-positive-equilibrium verdict: orbits leave every compact subset of the open orthant
        ex2 = networks.example2()
        for _ in range(5):
            x0 = rng.uniform(0.5, 2.0, 6)
            traj = integrate(ex2, x0, 50.0)
            assert traj.states[-1, 1] > 10 * x0[1] or np.min(traj.states[-1]) < 0.2 * np.min(x0)
