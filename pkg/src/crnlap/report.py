"""Analysis reports: assembly, stable JSON serialisation and text rendering."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .deficiency import THEOREM_KERNEL_INCLUSION, Verdict, diagnose, kernel_inclusion_check
from .equilibrium import (
    EquilibriumResult,
    NonConvergence,
    NumericalFailure,
    PreconditionViolated,
    base_equilibrium,
    equilibrium_in_class,
)
from .linalg import DEFAULT_TOL, KernelDimensionError, structured_kernel
from .model import CrnSystem
from .reach import ReachStructure, coreaches, reaches, strong_components, weak_components

SCHEMA_VERSION = "crnlap.report/1"
SIGNIFICANT_DIGITS = 12
# magnitudes below this are rounding noise (residuals, dropped singular values,
# zero entries of bases) and are written as 0 so reports do not depend on BLAS
NOISE_FLOOR = 1e-14
# rank decisions closer than this many decades to the cutoff are flagged
BORDERLINE_DECADES = 3


def num(x) -> float | None:
    """Round to a fixed number of significant digits so reports are byte-stable."""
    x = float(x)
    if not math.isfinite(x):
        return None
    if abs(x) < NOISE_FLOOR:
        return 0.0
    r = float(f"{x:.{SIGNIFICANT_DIGITS}g}")
    return 0.0 if r == 0 else r


def vec(a) -> list:
    return [num(x) for x in np.asarray(a, dtype=float).ravel()]


def _sets(sets) -> list[list[int]]:
    return [sorted(int(i) for i in s) for s in sets]


@dataclass
class NetworkSummary:
    species: list[str]
    complexes: list[str]
    edges: list[list]  # [tail, head, k]
    n_species: int
    n_complexes: int
    n_reactions: int


@dataclass
class ReachSection:
    reaches: list[list[int]]
    exclusive: list[list[int]]
    common: list[list[int]]
    cabals: list[list[int]]

    @classmethod
    def from_structure(cls, rs: ReachStructure) -> "ReachSection":
        return cls(_sets(rs.reaches), _sets(rs.exclusive), _sets(rs.common), _sets(rs.cabals))


@dataclass
class KernelSection:
    """Kernel bases of ``L_out``: right basis over co-reaches, left basis on co-cabals."""

    right_basis: list[list]
    left_basis: list[list]
    conservation_basis: list[list]  # orthonormal basis of Ker(L_out S^T)


@dataclass
class DeficiencySection:
    delta_L: int
    delta_classical: int
    classical_exact: bool
    csc: bool
    dim_ker_SLT: int
    dim_ker_LT: int
    dim_ker_dTST: int
    dim_ker_LST: int
    kernel_inclusion: bool
    gap_SLT: list
    gap_LT: list


@dataclass
class VerdictSection:
    verdict: str
    theorem: str
    explanation: str


@dataclass
class EquilibriumSection:
    x0: list | None
    x_star: list
    psi_star: list
    reach_coefficients: list
    residual: float
    class_tag: list

    @classmethod
    def from_result(cls, res: EquilibriumResult, x0=None) -> "EquilibriumSection":
        return cls(
            None if x0 is None else vec(x0),
            vec(res.x_star),
            vec(res.psi_star),
            vec(res.reach_coefficients),
            num(res.residual),
            vec(res.class_tag),
        )


@dataclass
class AnalysisReport:
    network: NetworkSummary
    strong_components: list[list[int]]
    weak_components: list[list[int]]
    reaches: ReachSection
    coreaches: ReachSection
    kernel: KernelSection | None
    deficiency: DeficiencySection
    verdict: VerdictSection
    equilibria: list[EquilibriumSection] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    tolerance: float = DEFAULT_TOL
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema_version')!r}")
        return cls(
            network=NetworkSummary(**d["network"]),
            strong_components=d["strong_components"],
            weak_components=d["weak_components"],
            reaches=ReachSection(**d["reaches"]),
            coreaches=ReachSection(**d["coreaches"]),
            kernel=None if d["kernel"] is None else KernelSection(**d["kernel"]),
            deficiency=DeficiencySection(**d["deficiency"]),
            verdict=VerdictSection(**d["verdict"]),
            equilibria=[EquilibriumSection(**e) for e in d["equilibria"]],
            warnings=list(d["warnings"]),
            tolerance=d["tolerance"],
            schema_version=d["schema_version"],
        )

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))


def _borderline(gap, tol: float) -> bool:
    kept, dropped = gap
    margin = 10.0**BORDERLINE_DECADES
    return kept < tol * margin or (dropped > 0 and dropped > tol / margin)


def analyze(sys: CrnSystem, tol: float = DEFAULT_TOL, x0_list=()) -> AnalysisReport:
    """Run every analysis on ``sys``; equilibria are added for each ``x0``
    (or just the base equilibrium when none are given and one exists)."""
    warnings: list[str] = []
    g = sys.graph
    rs = reaches(g)
    crs = coreaches(g)

    try:
        kb = structured_kernel(sys.lap_out, crs, tol)
        kernel = KernelSection(
            [vec(x) for x in kb.right_basis],
            [vec(x) for x in kb.left_basis],
            [vec(q) for q in sys.conservation_space(tol).vectors()],
        )
    except KernelDimensionError as exc:
        kernel = None
        warnings.append(f"kernel basis: {exc}")

    rep = diagnose(sys, tol)
    inclusion = kernel_inclusion_check(sys, tol)
    if not inclusion:
        warnings.append(f"Ker d^T S^T not contained in Ker L_out S^T at this tolerance [{THEOREM_KERNEL_INCLUSION}]")
    for name, gap in (("S L_out^T", rep.gap_SLT), ("L_out^T", rep.gap_LT)):
        if _borderline(gap, tol):
            warnings.append(
                f"rank of {name} is borderline: relative singular values {gap[0]:.3e} kept, "
                f"{gap[1]:.3e} dropped at tolerance {tol:g}"
            )

    equilibria = []
    if rep.verdict is Verdict.POSITIVE_EQUILIBRIUM_EXISTS:
        try:
            base = base_equilibrium(sys, tol)
            if not x0_list:
                equilibria.append(EquilibriumSection.from_result(base))
            for x0 in x0_list:
                equilibria.append(EquilibriumSection.from_result(equilibrium_in_class(sys, x0, tol, base=base), x0))
        except (NonConvergence, NumericalFailure, PreconditionViolated, KernelDimensionError) as exc:
            warnings.append(f"equilibrium: {exc}")

    return AnalysisReport(
        network=NetworkSummary(
            list(sys.species_names),
            list(sys.complex_labels),
            [[e.tail, e.head, num(e.weight)] for e in g.edges],
            sys.n_species,
            sys.n_complexes,
            sys.n_reactions,
        ),
        strong_components=_sets(strong_components(g)),
        weak_components=_sets(weak_components(g)),
        reaches=ReachSection.from_structure(rs),
        coreaches=ReachSection.from_structure(crs),
        kernel=kernel,
        deficiency=DeficiencySection(
            delta_L=rep.delta_L,
            delta_classical=rep.delta_classical,
            classical_exact=rep.classical_exact,
            csc=rep.csc,
            dim_ker_SLT=rep.dim_ker_SLT,
            dim_ker_LT=rep.dim_ker_LT,
            dim_ker_dTST=rep.dim_ker_dTST,
            dim_ker_LST=rep.dim_ker_LST,
            kernel_inclusion=inclusion,
            gap_SLT=[num(x) for x in rep.gap_SLT],
            gap_LT=[num(x) for x in rep.gap_LT],
        ),
        verdict=VerdictSection(rep.verdict.value, rep.citation, rep.explain()),
        equilibria=equilibria,
        warnings=warnings,
        tolerance=tol,
    )


_CHEMIST = {
    "CSC": "CSC (weakly reversible)",
    "weak components": "weak components (linkage classes)",
    "vertices": "vertices (complexes)",
}


def _fmt_vec(v) -> str:
    return "(" + ", ".join("nan" if x is None else f"{x:.6g}" for x in v) + ")"


def render_text(report: AnalysisReport, chemist: bool = False) -> str:
    def term(t):
        return _CHEMIST.get(t, t) if chemist else t

    net = report.network
    labels = net.complexes

    def names(sets):
        return "; ".join("{" + ", ".join(labels[i] for i in s) + "}" for s in sets)

    d = report.deficiency
    lines = [
        f"species ({net.n_species}): {', '.join(net.species)}",
        f"{term('vertices')} ({net.n_complexes}): {' | '.join(labels)}",
        f"reactions: {net.n_reactions}",
        f"strong components: {names(report.strong_components)}",
        f"{term('weak components')}: {names(report.weak_components)}",
        f"reaches: {names(report.reaches.reaches)}   cabals: {names(report.reaches.cabals)}",
        f"co-reaches: {names(report.coreaches.reaches)}   co-cabals: {names(report.coreaches.cabals)}",
        f"{term('CSC')}: {'yes' if d.csc else 'no'}",
        f"Laplacian deficiency: {d.delta_L}   (dim Ker S L_out^T = {d.dim_ker_SLT}, dim Ker L_out^T = {d.dim_ker_LT})",
        f"classical deficiency: {d.delta_classical}{'' if d.classical_exact else ' (floating rank)'}",
        f"dim Ker L_out S^T = {d.dim_ker_LST}   dim Ker d^T S^T = {d.dim_ker_dTST}   inclusion holds: {d.kernel_inclusion}",
    ]
    if report.kernel is not None:
        for i, q in enumerate(report.kernel.conservation_basis):
            lines.append(f"conserved direction {i + 1}: {_fmt_vec(q)}")
        for i, (r, l) in enumerate(zip(report.kernel.right_basis, report.kernel.left_basis)):
            lines.append(f"kernel of L_out, co-reach {i + 1}: right {_fmt_vec(r)}  left {_fmt_vec(l)}")
    lines.append(f"verdict: {report.verdict.verdict}")
    lines.append(f"  {report.verdict.explanation}")
    for e in report.equilibria:
        head = "equilibrium" if e.x0 is None else f"equilibrium in class of x0={_fmt_vec(e.x0)}"
        lines.append(f"{head}: x* = {_fmt_vec(e.x_star)}")
        lines.append(f"  psi* = {_fmt_vec(e.psi_star)}   a = {_fmt_vec(e.reach_coefficients)}")
        lines.append(f"  residual = {e.residual:.3e}   class tag z = {_fmt_vec(e.class_tag)}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


