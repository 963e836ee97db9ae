"""Scaled Gauss-sum suprema sup_{a,m} |G(a,q,m)| q^{d/k} for q up to q_max."""
import argparse
import sys

from kspheres.expsums import hua_diagnostic
from kspheres.io import dumps_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--q-max", type=int, default=100)
    args = ap.parse_args(argv)
    h = hua_diagnostic(args.k, args.d, args.q_max)
    sys.stdout.write(dumps_csv([{"q": int(q), "sup": s, "sup_scaled": ss} for q, s, ss in zip(h.q, h.sup, h.sup_scaled)]))
    print(f"max scaled value {h.max_scaled:.6f}, scaled slope {h.scaled_slope:.4f}", file=sys.stderr)


if __name__ == "__main__":
    main()
