"""Benchmark harness: verify every method against the sort oracle, then time it."""
from __future__ import annotations

import csv
import io
import logging
import statistics
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from . import baselines
from .datagen import Dist, DistributionSpec, generate_array, inject_extremes
from .errors import InvalidArgumentError
from .hybrid import HybridConfig, select
from .reduce import Reducer
from .solvers import SolverConfig
from .types import Method, Sample, SelectionSpec, resolve_rank

log = logging.getLogger(__name__)

DTYPES = {"f32": np.float32, "f64": np.float64}

CSV_FIELDS = [
    "method",
    "distribution",
    "n",
    "precision",
    "mean_ms",
    "min_ms",
    "max_ms",
    "median_ms",
    "iterations_mean",
    "reductions_mean",
    "z_fraction_mean",
]
TIMING_FIELDS = {"mean_ms", "min_ms", "max_ms", "median_ms"}


@dataclass
class BenchPlan:
    methods: list = field(default_factory=lambda: [Method.HYBRID, Method.QUICKSELECT, Method.SORT])
    distributions: list = field(default_factory=lambda: list(Dist))
    sizes: list = field(default_factory=lambda: [1 << 16])
    reps: int = 10
    instances: int = 10
    precision: str = "f64"
    seed: int = 0
    workers: int | None = None
    tolerance_f: float = 1e-12
    maxit: int = 100
    cp_iterations: int = 7
    verify_only: bool = False

    def __post_init__(self):
        self.methods = [Method(m) for m in self.methods]
        self.distributions = [Dist(d) for d in self.distributions]
        if not self.methods or not self.distributions or not self.sizes:
            raise InvalidArgumentError("plan needs at least one method, distribution and size")
        if list(self.sizes) != sorted(self.sizes) or min(self.sizes) < 1:
            raise InvalidArgumentError("sizes must be positive and sorted ascending")
        if self.reps < 1 or self.instances < 1:
            raise InvalidArgumentError("reps and instances must be >= 1")
        if self.precision not in DTYPES:
            raise InvalidArgumentError(f"precision must be one of {sorted(DTYPES)}")


@dataclass
class Mismatch:
    method: Method
    distribution: Dist
    n: int
    instance: int
    expected: float
    got: float


@dataclass
class Report:
    rows: list
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches


def instance_seed(seed: int, dist: Dist, n: int, instance: int) -> int:
    order = list(Dist).index(dist)
    return int(np.random.SeedSequence([seed, order, n, instance]).generate_state(1, np.uint64)[0])


def _runner(method: Method, plan: BenchPlan, reducer: Reducer, spec: SelectionSpec):
    if method is Method.SORT:
        return lambda x, j: (baselines.sort_select(x, j), 0, 0, 0)
    if method in (Method.QUICKSELECT, Method.QUICKSELECT_SERIAL_DEVICE):
        return lambda x, j: (baselines.quickselect(x, j), 0, 0, 0)
    cfg = SolverConfig(maxit=plan.maxit, tolerance_f=plan.tolerance_f)
    hcfg = HybridConfig(cp_iterations=plan.cp_iterations)

    def run(x, j):
        sample = Sample.from_array(x, reducer=reducer, copy=False)
        r = select(sample, spec, method, solver_cfg=cfg, hybrid_cfg=hcfg)
        return r.value, r.iterations, r.reductions, r.z_size

    return run


def run_plan(plan: BenchPlan, spec: SelectionSpec | None = None) -> Report:
    """Run every (distribution, n, instance, method) cell.

    A method's timings for an instance are recorded only after its answer
    matched ``sort_select``; mismatching cells are reported and left untimed.
    """
    spec = spec or SelectionSpec.median()
    dtype = DTYPES[plan.precision]
    reducer = Reducer(workers=plan.workers)
    runners = {m: _runner(m, plan, reducer, spec) for m in plan.methods}
    acc: dict = defaultdict(lambda: defaultdict(list))
    mismatches = []
    for dist in plan.distributions:
        for n in plan.sizes:
            for inst in range(plan.instances):
                ds = DistributionSpec(dist, n, instance_seed(plan.seed, dist, n, inst))
                x = generate_array(ds, dtype)
                x.flags.writeable = False
                j = resolve_rank(spec, n)
                expected = baselines.sort_select(x, j)
                for method, run in runners.items():
                    value, its, reds, z = run(x, j)
                    if value != expected:
                        mismatches.append(Mismatch(method, dist, n, inst, expected, value))
                        log.error("%s on %s n=%d #%d: got %r, expected %r",
                                  method.value, dist.value, n, inst, value, expected)
                        continue
                    cell = acc[(method, dist, n)]
                    cell["iterations"].append(its)
                    cell["reductions"].append(reds)
                    cell["z_fraction"].append(z / n)
                    if not plan.verify_only:
                        run(x, j)  # warm-up, discarded
                        for _ in range(plan.reps):
                            t0 = time.perf_counter()
                            run(x, j)
                            cell["ms"].append((time.perf_counter() - t0) * 1e3)
    rows = []
    for dist in plan.distributions:
        for n in plan.sizes:
            for method in plan.methods:
                cell = acc.get((method, dist, n))
                if not cell:
                    continue
                ms = cell["ms"]
                rows.append({
                    "method": method.value,
                    "distribution": dist.value,
                    "n": n,
                    "precision": plan.precision,
                    "mean_ms": statistics.fmean(ms) if ms else None,
                    "min_ms": min(ms) if ms else None,
                    "max_ms": max(ms) if ms else None,
                    "median_ms": statistics.median(ms) if ms else None,
                    "iterations_mean": statistics.fmean(cell["iterations"]),
                    "reductions_mean": statistics.fmean(cell["reductions"]),
                    "z_fraction_mean": statistics.fmean(cell["z_fraction"]),
                })
    return Report(rows, mismatches)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def to_csv(rows: Iterable[dict], fields=CSV_FIELDS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_fmt(r[f]) for f in fields])
    return buf.getvalue()


def write_plot_series(rows: list, plot_dir: str | Path) -> list[Path]:
    """One whitespace-separated ``n mean_ms`` file per method and precision,
    averaged over distributions, for log-log plotting."""
    out = Path(plot_dir)
    out.mkdir(parents=True, exist_ok=True)
    series: dict = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if r["mean_ms"] is not None:
            series[(r["method"], r["precision"])][r["n"]].append(r["mean_ms"])
    paths = []
    for (method, prec), by_n in sorted(series.items()):
        p = out / f"{method}_{prec}.dat"
        with open(p, "w") as fh:
            fh.write(f"# {method} {prec}: n mean_ms (averaged over distributions)\n")
            for n in sorted(by_n):
                fh.write(f"{n} {statistics.fmean(by_n[n]):.6g}\n")
        paths.append(p)
    return paths


def diff_report(mismatches: list) -> str:
    lines = ["method distribution n instance expected got"]
    for m in mismatches:
        lines.append(f"{m.method.value} {m.distribution.value} {m.n} {m.instance} {m.expected!r} {m.got!r}")
    return "\n".join(lines)


SWEEP_FIELDS = ["method", "magnitude", "iterations", "reductions", "ms", "correct", "transformed"]


def run_outlier_sweep(
    magnitudes,
    methods=(Method.CUTTING_PLANE, Method.BISECTION, Method.BRENT_MIN, Method.BRENT_ROOT),
    n: int = 100_000,
    dist: Dist = Dist.NORMAL01,
    seed: int = 0,
    precision: str = "f64",
    maxit: int = 200,
    tolerance_f: float = 1e-12,
    workers: int | None = None,
    transform: str = "auto",
) -> list[dict]:
    """Iteration counts as one injected outlier grows, on a fixed base sample."""
    reducer = Reducer(workers=workers)
    base = Sample.from_array(generate_array(DistributionSpec(dist, n, seed), DTYPES[precision]),
                             reducer=reducer, copy=False)
    cfg = SolverConfig(maxit=maxit, tolerance_f=tolerance_f)
    rows = []
    for mag in magnitudes:
        sample = inject_extremes(base, [mag], seed=seed)
        expected = baselines.sort_select(sample.values, (sample.n + 1) // 2)
        for method in methods:
            method = Method(method)
            t0 = time.perf_counter()
            r = select(sample, SelectionSpec.median(), method, solver_cfg=cfg, transform=transform)
            ms = (time.perf_counter() - t0) * 1e3
            rows.append({
                "method": method.value,
                "magnitude": float(mag),
                "iterations": r.iterations,
                "reductions": r.reductions,
                "ms": ms,
                "correct": r.value == expected,
                "transformed": r.transformed,
            })
    return rows
