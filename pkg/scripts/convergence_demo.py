"""Lyapunov decay and convergence inside invariant classes.

For the two-state family A <-> B with random rates and for the decoupled logistic pair (ex1),
starts inside the basin estimate V(x0) < min_i x*_i are integrated and
the Lyapunov value, the distance to the class equilibrium and the drift of
the conserved coordinates are written to CSV.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from crnlap import networks
from crnlap.equilibrium import equilibrium_in_class
from crnlap.simulate import IntegratorOptions, integrate, lyapunov_value


def basin_start(sys, rng, draw, tries=500):
    for _ in range(tries):
        x0 = draw()
        x_star = equilibrium_in_class(sys, x0).x_star
        if lyapunov_value(x0, x_star) < x_star.min():
            return x0, x_star
    raise RuntimeError("no start inside the basin estimate")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--t-end", type=float, default=30.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("results/convergence.csv"))
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    opts = IntegratorOptions(rtol=1e-9, atol=1e-12)
    args.out.parent.mkdir(parents=True, exist_ok=True)

    cases = []
    for i in range(args.runs):
        k1, k2 = np.exp(rng.uniform(-1, 1, 2))
        cases.append((f"ab[{k1:.3g},{k2:.3g}]", networks.two_state(k1, k2), lambda: rng.uniform(0.2, 3.0, 2)))
    ex1 = networks.example1()
    for i in range(args.runs):
        cases.append(("example1", ex1, lambda: np.array([0.5, 0.75]) * np.exp(rng.uniform(-0.7, 0.7, 2))))

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["run", "network", "t", "V", "distance", "drift"])
        for run, (label, sys, draw) in enumerate(cases):
            x0, x_star = basin_start(sys, rng, draw)
            traj = integrate(sys, x0, args.t_end, opts, x_star=x_star)
            dist = np.max(np.abs(traj.states - x_star), axis=1)
            drift = np.linalg.norm(traj.conserved - traj.conserved[0], axis=1)
            for t, V, d, z in zip(traj.times, traj.lyapunov, dist, drift):
                w.writerow([run, label, f"{t:.6g}", f"{V:.6e}", f"{d:.6e}", f"{z:.3e}"])
            print(f"{run:>2} {label:<20} V(0)={traj.lyapunov[0]:.3e} V(T)={traj.lyapunov[-1]:.3e} "
                  f"|x(T)-x*|={dist[-1]:.1e} max V increase={traj.lyapunov_increase():.1e}")


if __name__ == "__main__":
    main()
