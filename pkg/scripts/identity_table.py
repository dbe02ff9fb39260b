"""Maximal pointwise errors of the boundary identities on grid measures.

    python scripts/identity_table.py --grid 4096 --gamma 0 --gamma 0.3+0.4j
"""

from __future__ import annotations

import argparse
import sys

from clarkmodel.identities import identity_suite
from clarkmodel.instances import grid_measures


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--gamma", type=complex, action="append")
    args = p.parse_args(argv)
    gammas = args.gamma or [0j, 0.3 + 0.4j]

    table = {}
    for name, mu in grid_measures(args.grid).items():
        for g in gammas:
            table[(name, g)] = {r.name: r.max_error for r in identity_suite(mu, g, grid_n=args.grid)}
    names = list(next(iter(table.values())))
    print("| measure | gamma | " + " | ".join(names) + " |")
    print("|---" * (len(names) + 2) + "|")
    for (name, g), errs in table.items():
        print("| %s | %s | " % (name, g) + " | ".join("%.1e" % errs[k] for k in names) + " |")
    return 0


if __name__ == "__main__":
    sys.exit(main())
