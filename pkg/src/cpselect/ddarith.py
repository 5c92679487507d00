"""Double-double helpers (unevaluated sums hi + lo) for objective bookkeeping.

Objective values carry the full magnitude of every outlier, so differences
like ``f(y_R) - f(y_L)`` cancel catastrophically in plain doubles. Keeping the
compensated low word lets those differences come out exact.
"""
from __future__ import annotations

_SPLIT = 134217729.0  # 2**27 + 1


def two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    t = _SPLIT * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def add(x: tuple[float, float], y: tuple[float, float]) -> tuple[float, float]:
    s, e = two_sum(x[0], y[0])
    e += x[1] + y[1]
    return two_sum(s, e)


def neg(x: tuple[float, float]) -> tuple[float, float]:
    return -x[0], -x[1]


def sub(x, y):
    return add(x, neg(y))


def scale(x: tuple[float, float], c: float) -> tuple[float, float]:
    p, e = two_prod(x[0], c)
    e += x[1] * c
    return two_sum(p, e)


def mul(a: float, b: float) -> tuple[float, float]:
    return two_prod(a, b)


def value(x: tuple[float, float]) -> float:
    return x[0] + x[1]
