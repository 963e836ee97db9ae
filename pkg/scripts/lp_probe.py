"""Partial sums of ||A_* delta||_p^p and their growth slopes across a range of p."""
import argparse
import sys

from kspheres.io import dumps_csv
from kspheres.operators import lp_threshold_probe


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--d", type=int, default=5)
    ap.add_argument("--p-list", default="1.5,1.6,1.6667,1.75,1.9,2.5")
    ap.add_argument("--r-max", type=float, default=400.0)
    args = ap.parse_args(argv)
    ps = [float(v) for v in args.p_list.split(",")]
    tab = lp_threshold_probe(args.k, args.d, ps, args.r_max)
    rows = [{"k": args.k, "d": args.d, "p": row.p, "r_max": args.r_max, "partial_sum": row.partial[-1],
             "slope": row.slope} for row in tab.rows]
    sys.stdout.write(dumps_csv(rows))
    print(f"threshold d/(d-k) = {tab.threshold:.4f}, first flat p = {tab.crossover}", file=sys.stderr)


if __name__ == "__main__":
    main()
