"""Survey of Laplacian vs classical deficiency over random networks.

Counts how often each (delta_L, delta) pair occurs, separately for CSC and
non-CSC graphs, and how many networks land in each verdict class.
"""

import argparse
from collections import Counter

import numpy as np

from crnlap.deficiency import diagnose
from crnlap.random_networks import random_system


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--cases", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    pairs = {True: Counter(), False: Counter()}
    verdicts = Counter()
    violations = 0
    for _ in range(args.cases):
        rep = diagnose(random_system(rng))
        pairs[rep.csc][(rep.delta_L, rep.delta_classical)] += 1
        verdicts[rep.verdict.value] += 1
        violations += rep.delta_L > rep.delta_classical or (rep.csc and rep.delta_L != rep.delta_classical)

    for csc in (True, False):
        print(f"{'CSC' if csc else 'not CSC'}: {sum(pairs[csc].values())} networks")
        for (dl, d), n in sorted(pairs[csc].items()):
            print(f"  delta_L={dl} delta={d}: {n}")
    print("verdicts:", dict(sorted(verdicts.items())))
    print(f"networks violating delta_L <= delta (equality under CSC): {violations}")


if __name__ == "__main__":
    main()
