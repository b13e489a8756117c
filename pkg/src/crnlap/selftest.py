"""Randomized structural checks, runnable from the command line."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .deficiency import classical_deficiency, kernel_inclusion_check, laplacian_deficiency
from .graph import build_matrices, reverse
from .linalg import (
    DEFAULT_TOL,
    coercive_bounds,
    log_gap,
    monotone_gap,
    nullspace,
    numeric_rank,
    structured_kernel,
)
from .model import CrnSystem, psi, vector_field
from .random_networks import random_digraph, random_system
from .reach import dim_image_incidence, is_csc, reaches


@dataclass
class CheckResult:
    name: str
    cases: int
    failures: int
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _run(name: str, cases: int, check: Callable[[int], bool]) -> CheckResult:
    failures = 0
    first = ""
    for i in range(cases):
        try:
            ok = check(i)
        except Exception as exc:  # a crash counts as a failed case
            ok = False
            first = first or f"case {i}: {type(exc).__name__}: {exc}"
        if not ok:
            failures += 1
            first = first or f"first failure at case {i}"
    return CheckResult(name, cases, failures, first if failures else "")


def graph_checks(rng: np.random.Generator, cases: int, tol: float) -> list[CheckResult]:
    graphs = [random_digraph(rng) for _ in range(cases)]

    def row_sums(i):
        m = build_matrices(graphs[i])
        return (
            np.abs(m.lap_in.sum(axis=1)).max(initial=0) <= 1e-12
            and np.abs(m.lap_out.sum(axis=1)).max(initial=0) <= 1e-12
            and np.allclose(m.lap_in + m.lap_out, m.undirected, atol=1e-12)
        )

    def duality(i):
        g = graphs[i]
        return np.array_equal(build_matrices(g).lap_out, build_matrices(reverse(g)).lap_in)

    def kernel_dim(i):
        g = graphs[i]
        return nullspace(build_matrices(g).lap_in, tol).dim == reaches(g).count

    def patterns(i):
        g = graphs[i]
        rs = reaches(g)
        kb = structured_kernel(build_matrices(g).lap_in, rs, tol)
        L = build_matrices(g).lap_in
        n = g.vertex_count
        if not np.allclose(np.sum(kb.right_basis, axis=0), np.ones(n), atol=1e-9):
            return False
        for m in range(rs.count):
            r, l = kb.right_basis[m], kb.left_basis[m]
            if np.abs(L @ r).max() > 1e-9 or np.abs(l @ L).max() > 1e-9:
                return False
            H, C, R, B = (sorted(s) for s in (rs.exclusive[m], rs.common[m], rs.reaches[m], rs.cabals[m]))
            outside = sorted(set(range(n)) - set(R))
            if np.any(r[H] != 1.0) or np.any(r[outside] != 0.0):
                return False
            if C and not (np.all(r[C] > 0) and np.all(r[C] < 1)):
                return False
            if not (np.all(l[B] > 0) and abs(l.sum() - 1) <= 1e-9):
                return False
            if np.any(l[sorted(set(range(n)) - set(B))] != 0):
                return False
        return True

    def csc(i):
        g = graphs[i]
        rs = reaches(g)
        cabal_union = set().union(*rs.cabals)
        return is_csc(g) == is_csc(reverse(g)) and (len(cabal_union) == g.vertex_count) == is_csc(g)

    def incidence_rank(i):
        g = graphs[i]
        return numeric_rank(build_matrices(g).incidence, tol) == dim_image_incidence(g) if g.edge_count else dim_image_incidence(g) == 0

    return [
        _run("laplacian row sums", cases, row_sums),
        _run("out-degree/in-degree duality", cases, duality),
        _run("kernel dimension = reach count", cases, kernel_dim),
        _run("kernel support patterns", cases, patterns),
        _run("CSC symmetry and cabal cover", cases, csc),
        _run("incidence rank", cases, incidence_rank),
    ]


def network_checks(rng: np.random.Generator, cases: int, tol: float) -> list[CheckResult]:
    systems = [random_system(rng) for _ in range(cases)]

    def order(i):
        s = systems[i]
        dl, d = laplacian_deficiency(s, tol), classical_deficiency(s, tol)
        return dl <= d and (dl == d or not is_csc(s.graph))

    return [
        _run("Laplacian deficiency <= classical, equal when CSC", cases, order),
        _run("Ker d^T S^T inside Ker L_out S^T", cases, lambda i: kernel_inclusion_check(systems[i], tol)),
    ]


def scalar_checks(rng: np.random.Generator, cases: int) -> list[CheckResult]:
    pairs = np.exp(rng.uniform(-5, 5, size=(cases, 2)))

    def lemmas(i):
        a, b = pairs[i]
        lo, hi = coercive_bounds(a, b)
        xs = np.concatenate([lo - np.abs(rng.exponential(3, 5)) - 1e-9, hi + np.abs(rng.exponential(3, 5)) + 1e-9])
        return log_gap(a, b) >= 0 and monotone_gap(a, b) >= 0 and lo < hi and np.all(b * np.exp(xs) - a * xs > b)

    return [_run("scalar inequalities", cases, lemmas)]


def single_network_checks(sys: CrnSystem, rng: np.random.Generator, cases: int) -> list[CheckResult]:
    c = sys.n_species
    xs = np.exp(rng.uniform(-2, 2, size=(cases, c)))

    def monomials(i):
        return np.allclose(np.log(psi(sys, xs[i])), sys.stoich.T @ np.log(xs[i]), atol=1e-10)

    def boundary(i):
        x = xs[i].copy()
        j = i % c
        x[j] = 0.0
        return vector_field(sys, x)[j] >= -1e-12

    return [
        _run("monomial log-linearity", cases, monomials),
        _run("inward field on orthant faces", cases, boundary),
    ]


def run_selftest(seed: int = 0, cases: int = 200, network: CrnSystem | None = None, tol: float = DEFAULT_TOL):
    rng = np.random.default_rng(seed)
    out = graph_checks(rng, cases, tol) + network_checks(rng, cases, tol) + scalar_checks(rng, cases)
    if network is not None:
        out += single_network_checks(network, rng, cases)
    return out
