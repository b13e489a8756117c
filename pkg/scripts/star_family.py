"""Laplacian versus classical deficiency on star graphs.

One complex 2A reacts to k distinct copies of A (a multigraph of
reactions with repeated complexes).  The Laplacian deficiency stays 0
while the classical one grows like k - 1; rates are drawn at random to
show that neither number depends on them.
"""

import argparse

import numpy as np

from crnlap import networks
from crnlap.deficiency import diagnose


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    print(f"{'k':>3} {'delta_L':>8} {'delta':>6} {'random-rate delta_L':>20}")
    for k in range(args.k_min, args.k_max + 1):
        unit = diagnose(networks.star(k))
        rand = diagnose(networks.star(k, weights=rng.uniform(0.1, 10.0, k)))
        print(f"{k:>3} {unit.delta_L:>8} {unit.delta_classical:>6} {rand.delta_L:>20}")


if __name__ == "__main__":
    main()
