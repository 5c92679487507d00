"""Command-line entry point: ``cpselect {bench,sweep,gen,select,fit}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench, datagen, robust
from .errors import CpSelectError, InvalidArgumentError, InvalidSpecError
from .hybrid import HybridConfig, select
from .solvers import SolverConfig
from .types import Method, SelectionSpec

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_INVALID = 3

METHOD_IDS = [m.value for m in Method]
DIST_IDS = [d.value for d in datagen.Dist]


def csv_list(kind, choices=None):
    def parse(text: str):
        items = [t.strip() for t in text.split(",") if t.strip()]
        if choices is not None:
            bad = [t for t in items if t not in choices]
            if bad:
                raise argparse.ArgumentTypeError(
                    f"unknown value(s) {', '.join(bad)}; choose from {', '.join(choices)}"
                )
        try:
            return [kind(t) for t in items]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return parse


def parse_size(text: str) -> int:
    # accepts 1000, 1e5 and 2^20
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    value = float(text)
    if value != int(value):
        raise ValueError(f"size {text!r} is not an integer")
    return int(value)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_bench(args) -> int:
    try:
        plan = bench.BenchPlan(
            methods=args.methods,
            distributions=args.dists,
            sizes=args.sizes,
            reps=args.reps,
            instances=args.instances,
            precision=args.precision,
            seed=args.seed,
            workers=args.workers,
            tolerance_f=args.tol,
            maxit=args.maxit,
            cp_iterations=args.cp_iters,
            verify_only=args.verify_only,
        )
    except (InvalidArgumentError, ValueError) as exc:
        print(f"invalid plan: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = bench.run_plan(plan)
    _write(bench.to_csv(report.rows), args.out)
    if args.plot_dir:
        bench.write_plot_series(report.rows, args.plot_dir)
    if not report.ok:
        print(bench.diff_report(report.mismatches), file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_sweep(args) -> int:
    rows = bench.run_outlier_sweep(
        args.magnitudes,
        methods=args.methods,
        n=args.n,
        dist=datagen.Dist(args.dist),
        seed=args.seed,
        precision=args.precision,
        maxit=args.maxit,
        tolerance_f=args.tol,
        workers=args.workers,
        transform=args.transform,
    )
    _write(bench.to_csv(rows, bench.SWEEP_FIELDS), args.out)
    return EXIT_OK if all(r["correct"] for r in rows) else EXIT_MISMATCH


def cmd_gen(args) -> int:
    outliers = tuple((1, m) for m in args.outlier)
    spec = datagen.DistributionSpec(datagen.Dist(args.dist), args.n, args.seed, outliers)
    x = datagen.generate_array(spec, bench.DTYPES[args.precision])
    datagen.dump(args.out, x)
    return EXIT_OK


def cmd_select(args) -> int:
    x = datagen.load(args.file)
    if args.rank is not None:
        spec = SelectionSpec.kth_smallest(args.rank)
    elif args.largest is not None:
        spec = SelectionSpec.kth_largest(args.largest)
    else:
        spec = SelectionSpec.median()
    r = select(
        x,
        spec,
        args.method,
        solver_cfg=SolverConfig(maxit=args.maxit, tolerance_f=args.tol),
        hybrid_cfg=HybridConfig(cp_iterations=args.cp_iters),
        transform=args.transform,
        workers=args.workers,
    )
    print(f"value={r.value!r} rank={r.rank} iterations={r.iterations} "
          f"reductions={r.reductions} method={r.method.value}")
    return EXIT_OK


def cmd_fit(args) -> int:
    problem = robust.load_csv(args.file, intercept=args.intercept, h=args.h)
    fit = robust.fit_elemental(problem, subsets=args.subsets, seed=args.seed, estimator=args.estimator)
    ols = robust.least_squares(problem)
    print(f"estimator={fit.estimator.value} h={problem.h} objective={fit.objective!r}")
    print(f"theta={fit.theta.tolist()}")
    print(f"subset={fit.subset_index} evaluated={fit.evaluated}")
    print(f"ols_theta={ols.tolist()}")
    return EXIT_OK


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precision", choices=sorted(bench.DTYPES), default="f64")
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (default: $CPSEL_WORKERS, else CPU count)")
    p.add_argument("--tol", type=float, default=1e-12, help="bracket width tolerance")
    p.add_argument("--maxit", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpselect", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="verify and time selection methods")
    b.add_argument("--methods", type=csv_list(str, METHOD_IDS), default=["hybrid", "quickselect", "sort"])
    b.add_argument("--dists", type=csv_list(str, DIST_IDS), default=DIST_IDS)
    b.add_argument("--sizes", type=csv_list(parse_size), default=[1 << 16])
    b.add_argument("--reps", type=int, default=10)
    b.add_argument("--instances", type=int, default=10)
    b.add_argument("--cp-iters", type=int, default=7)
    b.add_argument("--out", default=None, help="CSV path (default stdout)")
    b.add_argument("--plot-dir", default=None, help="write n/mean_ms series per method here")
    b.add_argument("--verify-only", action="store_true", help="check correctness, skip timing")
    _common(b)
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("sweep", help="iteration counts against one growing outlier")
    s.add_argument("--magnitudes", type=csv_list(float), default=[1e3, 1e6, 1e9])
    s.add_argument("--methods", type=csv_list(str, METHOD_IDS),
                   default=["cp", "bisection", "brent-min", "brent-root"])
    s.add_argument("--n", type=parse_size, default=100_000)
    s.add_argument("--dist", choices=DIST_IDS, default="normal")
    s.add_argument("--transform", choices=["auto", "on", "off"], default="auto")
    s.add_argument("--out", default=None)
    _common(s)
    s.set_defaults(func=cmd_sweep, maxit=200)

    g = sub.add_parser("gen", help="write a generated dataset file")
    g.add_argument("--dist", choices=DIST_IDS, required=True)
    g.add_argument("--n", type=parse_size, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--precision", choices=sorted(bench.DTYPES), default="f64")
    g.add_argument("--outlier", type=float, action="append", default=[],
                   help="plant one element of this value (repeatable)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    q = sub.add_parser("select", help="select from a dataset file")
    q.add_argument("file")
    which = q.add_mutually_exclusive_group()
    which.add_argument("--rank", type=int, help="k-th smallest (1-based)")
    which.add_argument("--largest", type=int, help="k-th largest (1-based)")
    q.add_argument("--method", choices=METHOD_IDS, default="hybrid")
    q.add_argument("--cp-iters", type=int, default=7)
    q.add_argument("--transform", choices=["auto", "on", "off"], default="auto")
    _common(q)
    q.set_defaults(func=cmd_select)

    f = sub.add_parser("fit", help="robust line fit of a CSV with a 'y' column")
    f.add_argument("file")
    f.add_argument("--estimator", choices=[e.value for e in robust.Estimator], default="lts")
    f.add_argument("--subsets", type=int, default=500)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--h", type=int, default=None, help="trimming count (default (n+p)//2)")
    f.add_argument("--no-intercept", dest="intercept", action="store_false")
    f.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InvalidSpecError, InvalidArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CpSelectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
