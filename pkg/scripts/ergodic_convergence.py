"""Ergodic averages of f(x) = e(x) for an irrational and a rational rotation family."""
import argparse
import sys
from fractions import Fraction

import numpy as np

from kspheres.ergodic import TorusSystem, TrigObservable, convergence_scan, strongly_ergodic
from kspheres.io import dumps_csv
from kspheres.lattice import admissible_levels


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--level-max", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    primes = [2, 3, 5, 7, 11, 13, 17][: args.d]
    systems = {
        "irrational": TorusSystem(1, tuple((float(np.sqrt(p) % 1),) for p in primes)),
        "rational": TorusSystem(1, tuple((Fraction(1, 2),) for _ in primes)),
    }
    f = TrigObservable(((1,),), (1,))
    levels = admissible_levels(args.k, args.d, 1, args.level_max)
    rows = []
    for name, sys_ in systems.items():
        scan = convergence_scan(sys_, f, args.k, args.d, levels, seed=args.seed)
        verdict = strongly_ergodic(sys_)
        print(f"{name}: strongly ergodic = {verdict.status}, deviation slope {scan.slope:.4f}", file=sys.stderr)
        stride = max(1, len(levels) // 200)
        rows += [{"system": name, "level": int(n), "max_deviation": float(v)}
                 for n, v in zip(scan.levels[::stride], scan.max_deviation[::stride])]
    sys.stdout.write(dumps_csv(rows))


if __name__ == "__main__":
    main()
