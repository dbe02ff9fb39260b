"""Track the Clark measures of a random atomic measure around the circle.

Prints one CSV row per alpha: the eigenvalue angles of U_alpha, their masses,
and the gap to the measure at the previous alpha.

    python scripts/spectral_flow.py --atoms 5 --steps 64 --seed 0
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from clarkmodel.clark import ClarkFamilyHandle
from clarkmodel.instances import random_atomic
from clarkmodel.measure import min_atom_distance


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--atoms", type=int, default=5)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    fam = ClarkFamilyHandle(random_atomic(np.random.default_rng(args.seed), args.atoms))
    n = fam.mu.n_atoms
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["alpha_angle"] + ["angle_%d" % (k + 1) for k in range(n)]
               + ["mass_%d" % (k + 1) for k in range(n)] + ["separation_from_previous"])
    prev = None
    for t in 2 * np.pi * np.arange(args.steps) / args.steps:
        m = fam.measure(np.exp(1j * t))
        sep = "" if prev is None else "%.3e" % min_atom_distance(prev, m)
        w.writerow(["%.6f" % t] + ["%.12f" % a for a in m.angles] + ["%.12f" % x for x in m.masses] + [sep])
        prev = m
    return 0


if __name__ == "__main__":
    sys.exit(main())
