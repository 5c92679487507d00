"""Wall time of hybrid selection against full-sort selection at one large n.

Informational only: the ratio depends heavily on core count and on how fast
the local sort is.

    CPSEL_WORKERS=8 python3 scripts/perf_trend.py --n 2^24
"""
import argparse
import os
import statistics
import sys
import time

from cpselect import Sample, select, sort_select
from cpselect.datagen import Dist, DistributionSpec, generate_array
from cpselect.cli import parse_size


def best_of(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=parse_size, default=1 << 24)
    ap.add_argument("--dist", default="normal", choices=[d.value for d in Dist])
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args(argv)

    x = generate_array(DistributionSpec(Dist(args.dist), args.n, seed=1))
    warm = Sample.from_array(x, workers=args.workers, copy=False)
    select(warm)
    j = (args.n + 1) // 2
    v, th = best_of(lambda: select(Sample.from_array(x, reducer=warm.reducer, copy=False)).value, args.reps)
    w, ts = best_of(lambda: sort_select(x, j), args.reps)
    assert v == w, (v, w)
    print(f"n={args.n} workers={warm.reducer.workers} cpus={os.cpu_count()}")
    print(f"hybrid {th * 1e3:.1f} ms, sort {ts * 1e3:.1f} ms, ratio {th / ts:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
