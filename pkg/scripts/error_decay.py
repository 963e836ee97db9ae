"""Normalized l2 approximation error over a list of levels, with the fitted log-slope in r."""
import argparse
import sys

import numpy as np

from kspheres._common import loglog_slope
from kspheres.approx import error_scan
from kspheres.io import dumps_csv
from kspheres.lattice import SphereSpec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--d", type=int, default=5)
    ap.add_argument("--Q", type=int, default=30)
    ap.add_argument("--levels", default="25,100,400")
    ap.add_argument("--mode", default="auto")
    args = ap.parse_args(argv)
    levels = [int(v) for v in args.levels.split(",")]
    rows = []
    for n in levels:
        rep = error_scan(SphereSpec(args.k, args.d, n), Q=args.Q, mode=args.mode)
        rows.append({"level": n, "M": rep.M, "sup_error": rep.sup_error, "l2_error": rep.l2_error,
                     "normalized_error": rep.normalized_error, "normalized_sup": rep.normalized_sup})
        print(f"level {n}: normalized l2 error {rep.normalized_error:.4g}", file=sys.stderr, flush=True)
    sys.stdout.write(dumps_csv(rows))
    radii = np.asarray(levels, dtype=float) ** (1 / args.k)
    print(f"slope {loglog_slope(radii, [r['normalized_error'] for r in rows]):.4f}", file=sys.stderr)


if __name__ == "__main__":
    main()
