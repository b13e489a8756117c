"""Command line front end: ``crnlap analyze|equilibrium|simulate|selftest``."""

from __future__ import annotations

import argparse
import sys as _sys
import warnings
from pathlib import Path

import numpy as np

from .equilibrium import (
    EquilibriumResult,
    NonConvergence,
    NumericalFailure,
    PreconditionViolated,
    base_equilibrium,
    equilibrium_in_class,
)
from .graph import GraphError
from .linalg import DEFAULT_TOL, KernelDimensionError
from .model import ValidationError
from .parse import ParseError, load
from .report import EquilibriumSection, analyze, render_text

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_STRICT = 3


def _vector(text: str, n: int) -> np.ndarray:
    if text.strip().lower() in ("ones", "all-ones", "1"):
        return np.ones(n)
    try:
        vals = [float(a) for a in text.replace(";", ",").split(",") if a.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read vector {text!r}") from None
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"vector {text!r} has {len(vals)} entries, expected {n}")
    return np.array(vals)


def _load(path: str):
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            sys = load(path)
        for w in caught:
            print(f"{path}: warning: {w.message}", file=_sys.stderr)
        return sys
    except FileNotFoundError:
        print(f"{path}: no such file", file=_sys.stderr)
    except (ParseError, ValidationError, GraphError) as exc:
        print(f"{path}: {exc}", file=_sys.stderr)
    return None


def _print_equilibrium(res: EquilibriumResult, fmt: str, x0=None) -> None:
    sec = EquilibriumSection.from_result(res, x0)
    if fmt == "json":
        import json
        from dataclasses import asdict

        print(json.dumps(asdict(sec), indent=2, sort_keys=True))
        return
    f = lambda v: ", ".join(f"{a:.10g}" for a in v)  # noqa: E731
    print(f"x* = ({f(sec.x_star)})")
    print(f"psi* = ({f(sec.psi_star)})")
    print(f"a = ({f(sec.reach_coefficients)})")
    print(f"residual = {sec.residual:.3e}")
    print(f"class tag z = ({f(sec.class_tag)})")


def cmd_analyze(args) -> int:
    sys = _load(args.file)
    if sys is None:
        return EXIT_PARSE
    x0_list = [_vector(x, sys.n_species) for x in (args.x0 or [])]
    report = analyze(sys, args.tol, x0_list)
    out = report.to_json() if args.format == "json" else render_text(report, chemist=args.chemist)
    _sys.stdout.write(out)
    if args.strict and report.warnings:
        return EXIT_STRICT
    return EXIT_OK


def cmd_equilibrium(args) -> int:
    sys = _load(args.file)
    if sys is None:
        return EXIT_PARSE
    try:
        if args.x0 is not None:
            x0 = _vector(args.x0, sys.n_species)
            res = equilibrium_in_class(sys, x0, args.tol)
        elif args.all_ones:
            x0 = np.ones(sys.n_species)
            res = equilibrium_in_class(sys, x0, args.tol)
        else:
            x0 = None
            res = base_equilibrium(sys, args.tol)
    except PreconditionViolated as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_FAILURE
    except (NonConvergence, NumericalFailure, KernelDimensionError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_FAILURE
    _print_equilibrium(res, args.format, x0)
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .simulate import IntegratorOptions, StepSizeUnderflow, integrate

    sys = _load(args.file)
    if sys is None:
        return EXIT_PARSE
    x0 = _vector(args.x0, sys.n_species)
    x_star = None
    if args.ref_equilibrium is not None:
        try:
            if args.ref_equilibrium == "auto":
                x_star = equilibrium_in_class(sys, np.maximum(x0, 1e-300), args.tol).x_star
            else:
                x_star = _vector(args.ref_equilibrium, sys.n_species)
        except (PreconditionViolated, NonConvergence, NumericalFailure, KernelDimensionError) as exc:
            print(f"error: no reference equilibrium: {exc}", file=_sys.stderr)
            return EXIT_FAILURE
    opts = IntegratorOptions(rtol=args.rtol, atol=args.atol)
    try:
        traj = integrate(sys, x0, args.t_end, opts, x_star=x_star, tol=args.tol)
    except StepSizeUnderflow as exc:
        print(f"error: integration failed: {exc}", file=_sys.stderr)
        return EXIT_FAILURE
    if args.out:
        traj.to_csv(args.out)
    final = ", ".join(f"{a:.8g}" for a in traj.final)
    if traj.lyapunov is None:
        trend = "V not monitored"
    else:
        inc = traj.lyapunov_increase()
        trend = f"V {traj.lyapunov[0]:.6g} -> {traj.lyapunov[-1]:.6g} (max step increase {inc:.2e})"
    print(
        f"t={traj.times[-1]:g} final=({final}); {trend}; conservation drift {traj.conservation_drift():.2e}; "
        f"steps {traj.step_stats.accepted} accepted, {traj.step_stats.rejected} rejected"
    )
    if args.strict and (traj.conservation_drift() > 1e-6 * (1 + np.linalg.norm(x0)) or traj.lyapunov_increase() > 1e-8):
        return EXIT_STRICT
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    sys = None
    if args.file:
        sys = _load(args.file)
        if sys is None:
            return EXIT_PARSE
    results = run_selftest(seed=args.seed, cases=args.cases, network=sys, tol=args.tol)
    ok = True
    for r in results:
        ok &= r.passed
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.cases} cases, {r.failures} failures{'' if not r.detail else ' (' + r.detail + ')'}")
    return EXIT_OK if ok else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crnlap", description="Reaction network analysis with directed graph Laplacians")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative rank tolerance")
    common.add_argument("--strict", action="store_true", help="exit with code 3 on numerical warnings")
    common.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="structure, deficiencies, verdict, equilibria")
    a.add_argument("file")
    a.add_argument("--x0", action="append", help="comma separated initial state; repeatable")
    a.add_argument("--chemist", action="store_true", help="show chemical names next to graph terms")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("equilibrium", parents=[common], help="positive equilibrium (in the class of --x0)")
    e.add_argument("file")
    g = e.add_mutually_exclusive_group()
    g.add_argument("--x0")
    g.add_argument("--all-ones", action="store_true")
    e.set_defaults(func=cmd_equilibrium)

    s = sub.add_parser("simulate", parents=[common], help="integrate the mass-action dynamics")
    s.add_argument("file")
    s.add_argument("--x0", required=True, help="initial state, e.g. 0.1,0.1 or ones")
    s.add_argument("--t-end", type=float, required=True)
    s.add_argument(
        "--ref-equilibrium",
        nargs="?",
        const="auto",
        help="monitor V against this state (default: the equilibrium in the class of x0)",
    )
    s.add_argument("--out", type=Path, help="CSV output path")
    s.add_argument("--rtol", type=float, default=1e-7)
    s.add_argument("--atol", type=float, default=1e-9)
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("selftest", parents=[common], help="randomized property checks")
    t.add_argument("file", nargs="?")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--cases", type=int, default=200)
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())
