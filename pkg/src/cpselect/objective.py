"""Convex piecewise-linear selection objectives and their subdifferentials.

The median of ``x`` minimizes ``f(y) = sum |x_i - y|``. A general order
statistic minimizes ``sum u(x_i - y)`` with the asymmetric penalty

    u(t) = w_pos * t     for t >= 0
    u(t) = -w_neg * t    for t < 0

where ``w_pos = n - k + 1/2`` and ``w_neg = k - 1/2``. Worked through on small
samples, that ``k`` counts from the largest element, so :class:`OsWeights`
offers both :meth:`OsWeights.for_rank` (k-th smallest) and
:meth:`OsWeights.for_largest`.

Subgradient sign convention: ``g(y)`` is the true subdifferential of ``f``,
``[lt - gt - eq, lt - gt + eq]`` for the median, so ``g < 0`` means the
minimizer lies to the right of ``y``. The representative value handed to
solvers is the right end of that interval, ``2 * count(x <= y) - n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import ddarith as dd
from .errors import InvalidArgumentError, ObjectiveOverflowError
from .reduce import combine_objective, objective_kernel
from .types import Sample, SubgradientInterval

#: ranges wider than this switch the solvers to the log transform
TRANSFORM_RANGE = 1e15


@dataclass(frozen=True)
class ObjectiveEval:
    f: float
    g: SubgradientInterval
    count_le: int
    count_lt: int
    count_eq: int
    d: float  # representative subgradient
    f_lo: float = 0.0  # low word: f + f_lo is the double-double objective value


@dataclass(frozen=True)
class OsWeights:
    w_pos: float  # weight on x_i > y
    w_neg: float  # weight on x_i < y

    @classmethod
    def for_largest(cls, k: int, n: int) -> "OsWeights":
        if not 1 <= k <= n:
            raise InvalidArgumentError(f"k={k} out of range 1..{n}")
        return cls(n - k + 0.5, k - 0.5)

    @classmethod
    def for_rank(cls, j: int, n: int) -> "OsWeights":
        """Weights whose unique minimizer is the j-th smallest element."""
        return cls.for_largest(n - j + 1, n)

    def check(self, n: int) -> None:
        if not (self.w_pos > 0 and self.w_neg > 0 and self.w_pos + self.w_neg == n):
            raise InvalidArgumentError(f"weights {self} invalid for n={n}")


def _fold(sample: Sample, y: float):
    if not math.isfinite(y):
        raise InvalidArgumentError(f"evaluation point must be finite, got {y!r}")
    return sample.reducer.reduce(objective_kernel, [sample.values], combine_objective, float(y))


def _checked(f: float) -> float:
    if not math.isfinite(f):
        raise ObjectiveOverflowError(
            "objective overflowed; enable the log transform (TransformSpec) for this range"
        )
    return f


def _pieces(sample: Sample, y: float):
    """Double-double sums of (x - y) over x > y and of (y - x) over x < y."""
    ah, al, bh, bl, lt, eq = _fold(sample, y)
    gt = sample.n - lt - eq
    above = dd.sub((ah, al), dd.mul(float(gt), y))
    below = dd.sub(dd.mul(float(lt), y), (bh, bl))
    return above, below, lt, eq, gt


def _eval(f, lo, hi, lt, eq, d) -> ObjectiveEval:
    f = dd.two_sum(*f)
    return ObjectiveEval(
        f=_checked(f[0]),
        g=SubgradientInterval(float(lo), float(hi)),
        count_le=lt + eq,
        count_lt=lt,
        count_eq=eq,
        d=float(d),
        f_lo=f[1],
    )


def eval_median_objective(sample: Sample, y: float) -> ObjectiveEval:
    above, below, lt, eq, gt = _pieces(sample, y)
    base = lt - gt
    return _eval(dd.add(above, below), base - eq, base + eq, lt, eq, 2 * (lt + eq) - sample.n)


def eval_os_objective(sample: Sample, y: float, weights: OsWeights) -> ObjectiveEval:
    weights.check(sample.n)
    above, below, lt, eq, gt = _pieces(sample, y)
    wp, wn = weights.w_pos, weights.w_neg
    f = dd.add(dd.scale(above, wp), dd.scale(below, wn))
    hi = wn * lt - wp * gt + wn * eq
    return _eval(f, wn * lt - wp * gt - wp * eq, hi, lt, eq, hi)


def bracket_init_dd(sample: Sample):
    """Like :func:`eval_bracket_init` but with double-double objective values."""
    n = sample.n
    total = (sample.sum, sample.sum_lo)
    f_l = dd.sub(total, dd.mul(float(n), sample.min))
    f_r = dd.sub(dd.mul(float(n), sample.max), total)
    _checked(f_l[0])
    _checked(f_r[0])
    g_l = float(2 * sample.count_min - n)
    g_r = float(n - 2 * sample.count_max)
    return sample.min, f_l, g_l, sample.max, f_r, g_r


def eval_bracket_init(sample: Sample):
    """Values and one-sided slopes of the median objective at min and max.

    Returns ``(y_L, f_L, g_L, y_R, f_R, g_R)``. No extra pass: everything
    comes from the extremes and sum cached on the sample. With unique extremes
    the slopes are ``-n + 2`` and ``n - 2``.
    """
    y_l, f_l, g_l, y_r, f_r, g_r = bracket_init_dd(sample)
    return y_l, dd.value(f_l), g_l, y_r, dd.value(f_r), g_r


class Objective:
    """The objective a solver minimizes for target rank ``j``.

    The median convention uses the plain absolute-deviation sum; every other
    rank uses the weighted penalty. Either way ``d < 0`` iff
    ``count(x <= y) < j``, which is what keeps solver brackets sound.
    """

    def __init__(self, sample: Sample, j: int, median: bool = False):
        self.sample = sample
        self.j = j
        n = sample.n
        if median and j != (n + 1) // 2:
            raise InvalidArgumentError("median objective only targets rank (n+1)//2")
        self.weights = None if median else OsWeights.for_rank(j, n)

    def __call__(self, y: float) -> ObjectiveEval:
        if self.weights is None:
            return eval_median_objective(self.sample, y)
        return eval_os_objective(self.sample, y, self.weights)

    def bracket_init(self):
        """``(y_L, f_L, g_L, y_R, f_R, g_R)`` with f values as (hi, lo) pairs."""
        y_l, f_l, g_l, y_r, f_r, g_r = bracket_init_dd(self.sample)
        if self.weights is None:
            return y_l, f_l, g_l, y_r, f_r, g_r
        n = self.sample.n
        wp, wn = self.weights.w_pos, self.weights.w_neg
        cmn, cmx = self.sample.count_min, self.sample.count_max
        return (
            y_l,
            dd.scale(f_l, wp),
            wn * cmn - wp * (n - cmn),
            y_r,
            dd.scale(f_r, wn),
            wn * (n - cmx) - wp * cmx,
        )


@dataclass(frozen=True)
class TransformSpec:
    enabled: bool
    shift: float = 0.0
    # power of two; 0.5 only when max - min itself overflows
    scale: float = 1.0

    @classmethod
    def for_sample(cls, sample: Sample) -> "TransformSpec":
        wide = not math.isfinite(sample.max - sample.min)
        return cls(True, sample.min, 0.5 if wide else 1.0)


def needs_transform(sample: Sample) -> bool:
    return (sample.max - sample.min) > TRANSFORM_RANGE


def forward(values: np.ndarray, spec: TransformSpec) -> np.ndarray:
    """``log(1 + scale * (x - shift))`` elementwise in double precision."""
    x = np.asarray(values, dtype=np.float64)
    if spec.scale == 1.0:
        return np.log1p(x - spec.shift)
    return np.log1p(x * spec.scale - spec.shift * spec.scale)


def apply_transform(sample: Sample, spec: TransformSpec) -> Sample:
    if not spec.enabled:
        return sample
    if sample.min < spec.shift:
        raise InvalidArgumentError(
            f"sample minimum {sample.min!r} is below transform shift {spec.shift!r}"
        )
    keys = forward(sample.values, spec)
    return Sample.from_array(keys, reducer=sample.reducer, copy=False)


def invert_transform(y: float, spec: TransformSpec) -> float:
    if not spec.enabled:
        return y
    return math.expm1(y) / spec.scale + spec.shift
