"""Decay exponents of the surface-measure transform along the first axis, against -(d-1)/k."""
import argparse
import sys

from kspheres.io import dumps_csv
from kspheres.surface import decay_fit


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", default="2:2,2:3,3:2,4:2,3:3", help="comma list of k:d")
    ap.add_argument("--T-max", type=float, default=400.0)
    args = ap.parse_args(argv)
    rows = []
    for case in args.cases.split(","):
        k, d = (int(v) for v in case.split(":"))
        fit = decay_fit(k, d, [1.0] + [0.0] * (d - 1), args.T_max)
        rows.append({"k": k, "d": d, "gamma_hat": fit.gamma_hat, "predicted": fit.predicted,
                     "inconclusive": fit.inconclusive})
    sys.stdout.write(dumps_csv(rows))


if __name__ == "__main__":
    main()
