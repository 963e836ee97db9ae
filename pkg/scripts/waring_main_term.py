"""Main term at frequency 0 against the exact count N_{k,d}(r) for a range of radii."""
import argparse
import sys

import numpy as np

from kspheres.approx import main_term
from kspheres.io import dumps_csv
from kspheres.lattice import SphereSpec, count_sphere


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--d", type=int, default=5)
    ap.add_argument("--Q", type=int, default=30)
    ap.add_argument("--r-min", type=int, default=10)
    ap.add_argument("--r-max", type=int, default=20)
    args = ap.parse_args(argv)
    rows = []
    for r in range(args.r_min, args.r_max + 1):
        spec = SphereSpec(args.k, args.d, r**args.k)
        N = count_sphere(spec).count
        mt = main_term(spec, np.zeros(args.d), Q=args.Q)
        rows.append({"r": r, "count": N, "main_term": mt.value.real, "ratio": mt.value.real / N})
    sys.stdout.write(dumps_csv(rows))


if __name__ == "__main__":
    main()
