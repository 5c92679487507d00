"""Timing table: mean ms per method and n, averaged over all distributions.

Every cell is verified against the sort oracle before it is timed. Writes the
per-distribution CSV and plot series next to the printed summary.

    python3 scripts/reproduce_tables.py --sizes 2^16,2^18,2^20 --precision f64
"""
import argparse
import statistics
import sys
from collections import defaultdict
from pathlib import Path

from cpselect.bench import BenchPlan, diff_report, run_plan, to_csv, write_plot_series
from cpselect.cli import METHOD_IDS, csv_list, parse_size


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sizes", type=csv_list(parse_size), default=[1 << 16, 1 << 18, 1 << 20])
    ap.add_argument("--methods", type=csv_list(str, METHOD_IDS),
                    default=["hybrid", "cp", "bisection", "brent-min", "brent-root", "quickselect", "sort"])
    ap.add_argument("--precision", choices=["f32", "f64"], default="f64")
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--instances", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args(argv)

    plan = BenchPlan(methods=args.methods, sizes=args.sizes, reps=args.reps, instances=args.instances,
                     precision=args.precision, seed=args.seed)
    report = run_plan(plan)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / f"bench_{args.precision}.csv").write_text(to_csv(report.rows))
    write_plot_series(report.rows, args.out_dir / "plots")

    cells = defaultdict(list)
    for r in report.rows:
        cells[(r["method"], r["n"])].append(r["mean_ms"])
    width = max(len(m) for m in args.methods)
    print(f"{'method':<{width}} " + " ".join(f"{n:>12}" for n in args.sizes))
    for m in args.methods:
        line = [f"{statistics.fmean(cells[(m, n)]):12.3f}" if cells[(m, n)] else f"{'-':>12}"
                for n in args.sizes]
        print(f"{m:<{width}} " + " ".join(line))
    if not report.ok:
        print(diff_report(report.mismatches), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
