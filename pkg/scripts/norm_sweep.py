"""Operator norms of the radial Cauchy operators T_r against the weight v_gamma.

The norms stay below 4 for every r != 1.  Prints a CSV table for a few atomic
and smooth instances together with the exterior-transform norm.

    python scripts/norm_sweep.py --gamma 0.3+0.4j --target-n 512
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from clarkmodel.boundary import exterior_transform_matrix, norm_sweep
from clarkmodel.instances import SMOOTH_DENSITIES, random_atomic, smooth_density
from clarkmodel.opmatrix import operator_norm

RADII = [0.5, 0.7, 0.9, 0.99, 1.01, 1.1, 1.5, 2.0]


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--gamma", type=complex, default=0.3 + 0.4j)
    p.add_argument("--target-n", type=int, default=512)
    p.add_argument("--grid", type=int, default=512, help="grid size of the smooth densities")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    instances = {"atomic_%d" % n: random_atomic(rng, n) for n in (4, 12)}
    instances.update({k: smooth_density(k, args.grid) for k in SMOOTH_DENSITIES})
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["instance"] + ["r=%g" % r for r in RADII] + ["exterior"])
    for name, mu in instances.items():
        norms = [row.norm for row in norm_sweep(mu, args.gamma, RADII, target_n=args.target_n)]
        ext = "" if mu.is_atomic else "%.6f" % operator_norm(exterior_transform_matrix(mu))
        w.writerow([name] + ["%.6f" % x for x in norms] + [ext])
    return 0


if __name__ == "__main__":
    sys.exit(main())
