"""Chunked, deterministic parallel reductions.

Every full pass over a sample goes through :class:`Reducer`. The array is cut
into fixed-size chunks, a fused kernel runs on each chunk (in a thread pool;
the numba kernels release the GIL), and the per-chunk partials are combined in
a left-to-right pairwise tree. Chunk boundaries and tree shape depend only on
``chunk_size``, never on the worker count, so floating-point results are
bit-reproducible across ``workers`` settings.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, Sequence, TypeVar

import numba
import numpy as np

DEFAULT_CHUNK = 1 << 16
WORKERS_ENV = "CPSEL_WORKERS"

T = TypeVar("T")


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            w = int(env)
        except ValueError:
            w = 0
        if w >= 1:
            return w
    return os.cpu_count() or 1


@lru_cache(maxsize=None)
def _pool(workers: int) -> ThreadPoolExecutor:
    return ThreadPoolExecutor(max_workers=workers, thread_name_prefix="cpsel")


def tree_reduce(items: Sequence[T], combine: Callable[[T, T], T]) -> T:
    """Pairwise left-to-right tree fold: ((a b)(c d))(e ...)."""
    if not items:
        raise ValueError("tree_reduce of an empty sequence")
    level = list(items)
    while len(level) > 1:
        nxt = [combine(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


class Reducer:
    """Runs chunk kernels over an array and folds the partials.

    ``passes`` counts full passes (logical parallel reductions) issued through
    this instance; solvers read it for their reduction accounting.
    """

    def __init__(self, workers: int | None = None, chunk_size: int = DEFAULT_CHUNK):
        if chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        self.workers = workers if workers is not None else default_workers()
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.chunk_size = chunk_size
        self.passes = 0

    def bounds(self, n: int) -> list[tuple[int, int]]:
        c = self.chunk_size
        return [(i, min(i + c, n)) for i in range(0, max(n, 1), c)]

    def map_chunks(self, fn: Callable[..., T], arrays: Sequence[np.ndarray], *args) -> list[T]:
        """Apply ``fn(*chunk_slices, *args)`` to every chunk, in chunk order."""
        self.passes += 1
        n = len(arrays[0])
        spans = self.bounds(n)

        def run(span):
            lo, hi = span
            return fn(*(a[lo:hi] for a in arrays), *args)

        if self.workers == 1 or len(spans) == 1:
            return [run(s) for s in spans]
        return list(_pool(self.workers).map(run, spans))

    def reduce(self, fn, arrays, combine, *args):
        return tree_reduce(self.map_chunks(fn, arrays, *args), combine)


# ---------------------------------------------------------------- kernels


@numba.njit(nogil=True, cache=True, inline="always")
def _acc(s, c, v):
    # Neumaier compensated add; c collects the rounding error of s
    t = s + v
    if abs(s) >= abs(v):
        c += (s - t) + v
    else:
        c += (v - t) + s
    return t, c


def _dd_combine(a_hi, a_lo, b_hi, b_lo):
    s = a_hi + b_hi
    bb = s - a_hi
    e = (a_hi - (s - bb)) + (b_hi - bb)
    return s, e + a_lo + b_lo


@numba.njit(nogil=True, cache=True)
def extremes_kernel(x):
    """min with multiplicity, max with multiplicity, compensated sum (hi, lo)."""
    mn = x[0]
    mx = x[0]
    cmn = 0
    cmx = 0
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        v = x[i]
        s, c = _acc(s, c, float(v))
        if v < mn:
            mn = v
            cmn = 1
        elif v == mn:
            cmn += 1
        if v > mx:
            mx = v
            cmx = 1
        elif v == mx:
            cmx += 1
    return float(mn), cmn, float(mx), cmx, s, c


def combine_extremes(a, b):
    mn_a, cmn_a, mx_a, cmx_a = a[:4]
    mn_b, cmn_b, mx_b, cmx_b = b[:4]
    if mn_a < mn_b:
        mn, cmn = mn_a, cmn_a
    elif mn_b < mn_a:
        mn, cmn = mn_b, cmn_b
    else:
        mn, cmn = mn_a, cmn_a + cmn_b
    if mx_a > mx_b:
        mx, cmx = mx_a, cmx_a
    elif mx_b > mx_a:
        mx, cmx = mx_b, cmx_b
    else:
        mx, cmx = mx_a, cmx_a + cmx_b
    return (mn, cmn, mx, cmx) + _dd_combine(a[4], a[5], b[4], b[5])


@numba.njit(nogil=True, cache=True)
def objective_kernel(x, y):
    """One fused pass: compensated sums of x over x>y and over x<y, plus counts.

    Returns ``(above_hi, above_lo, below_hi, below_lo, count_lt, count_eq)``.
    """
    ah = 0.0
    al = 0.0
    bh = 0.0
    bl = 0.0
    lt = 0
    eq = 0
    for i in range(x.shape[0]):
        v = float(x[i])
        if v > y:
            ah, al = _acc(ah, al, v)
        elif v < y:
            bh, bl = _acc(bh, bl, v)
            lt += 1
        else:
            eq += 1
    return ah, al, bh, bl, lt, eq


def combine_objective(a, b):
    return (
        _dd_combine(a[0], a[1], b[0], b[1])
        + _dd_combine(a[2], a[3], b[2], b[3])
        + (a[4] + b[4], a[5] + b[5])
    )


@numba.njit(nogil=True, cache=True)
def max_le_kernel(keys, values, y):
    """Largest value whose key is <= y; count of such keys."""
    best = -np.inf
    cnt = 0
    for i in range(keys.shape[0]):
        if keys[i] <= y:
            cnt += 1
            v = float(values[i])
            if v > best:
                best = v
    return best, cnt


def combine_max_le(a, b):
    return max(a[0], b[0]), a[1] + b[1]


def copy_between(keys: np.ndarray, values: np.ndarray, lo: float, hi: float):
    """Conditional copy of values whose key lies in the open interval (lo, hi)."""
    # float64 scalars keep float32 keys from being compared at float32 precision
    lo, hi = np.float64(lo), np.float64(hi)
    mask = (keys > lo) & (keys < hi)
    return values[mask], int(np.count_nonzero(keys <= lo))


def copy_equal(keys: np.ndarray, values: np.ndarray, at: float):
    return values[keys == np.float64(at)]
