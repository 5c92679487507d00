"""Iteration counts of the iterative methods as one outlier grows.

Cutting-plane iteration counts stay flat while bisection and Brent grow with
log(range). The largest magnitude forces the log transform.

    python3 scripts/outlier_sweep.py --n 100000
"""
import argparse
import sys

from cpselect.bench import SWEEP_FIELDS, run_outlier_sweep, to_csv
from cpselect.cli import csv_list, parse_size


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--magnitudes", type=csv_list(float), default=[1e3, 1e6, 1e9, 1e12, 1e20])
    ap.add_argument("--n", type=parse_size, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    rows = run_outlier_sweep(args.magnitudes, n=args.n, seed=args.seed)
    text = to_csv(rows, SWEEP_FIELDS)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    methods = list(dict.fromkeys(r["method"] for r in rows))
    print(f"{'magnitude':>10} " + " ".join(f"{m:>11}" for m in methods))
    for mag in args.magnitudes:
        its = {r["method"]: r["iterations"] for r in rows if r["magnitude"] == mag}
        print(f"{mag:>10.0e} " + " ".join(f"{its[m]:>11d}" for m in methods))
    return 0 if all(r["correct"] for r in rows) else 2


if __name__ == "__main__":
    sys.exit(main())
