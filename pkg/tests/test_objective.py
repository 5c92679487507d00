import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpselect import (
    InvalidArgumentError,
    ObjectiveOverflowError,
    OsWeights,
    Sample,
    TransformSpec,
    eval_bracket_init,
    eval_median_objective,
    eval_os_objective,
)
from cpselect.objective import Objective, apply_transform, invert_transform, needs_transform


def S(x):
    return Sample.from_array(np.asarray(x, dtype=np.float64))


def exact_f(x, y, wp=1, wn=1):
    # rational oracle for the weighted absolute-deviation sum
    y = Fraction(y)
    return sum(wp * (Fraction(v) - y) if v > y else wn * (y - Fraction(v)) for v in x)


def test_median_examples():
    ev = eval_median_objective(S([1, 2, 3]), 2.0)
    assert ev.f == 2 and (ev.g.lo, ev.g.hi) == (-1, 1) and 0 in ev.g

    ev = eval_median_objective(S([1, 2, 3]), 1.0)
    assert ev.f == 3 and ev.d == -1

    ev = eval_median_objective(S([5, 5, 5, 5]), 5.0)
    assert ev.f == 0 and (ev.g.lo, ev.g.hi) == (-4, 4)

    # flat stretch between the two middle elements of even n
    ev = eval_median_objective(S([0, 10]), 4.0)
    assert ev.f == float(exact_f([0, 10], 4)) == 10
    assert (ev.g.lo, ev.g.hi) == (0, 0)


def test_os_examples_count_from_largest():
    x = S([1, 2, 3])
    w = OsWeights.for_largest(1, 3)
    assert (w.w_pos, w.w_neg) == (2.5, 0.5)
    ev = eval_os_objective(x, 3.0, w)
    assert ev.f == 1.5 and (ev.g.lo, ev.g.hi) == (-1.5, 1.5)

    w = OsWeights.for_largest(3, 3)
    ev = eval_os_objective(x, 1.0, w)
    assert ev.f == 1.5 and 0 in ev.g


@pytest.mark.parametrize("n", [1, 2, 3, 6, 9])
def test_os_weights_brute_force_minimizer(n):
    x = np.random.default_rng(n).permutation(np.arange(1.0, n + 1))
    s = S(x)
    for j in range(1, n + 1):
        w = OsWeights.for_rank(j, n)
        fs = [eval_os_objective(s, float(y), w).f for y in range(1, n + 1)]
        assert int(np.argmin(fs)) + 1 == j


def test_middle_rank_weights_match_median():
    x = S([4.0, -1.0, 7.0, 2.0, 2.5])
    w = OsWeights.for_largest(3, 5)
    for y in (-1.0, 2.0, 2.5, 3.0, 7.0):
        assert eval_os_objective(x, y, w).f == pytest.approx(2.5 * eval_median_objective(x, y).f)


def test_bad_weights_rejected():
    with pytest.raises(InvalidArgumentError):
        eval_os_objective(S([1, 2]), 1.0, OsWeights(1.0, 0.5))
    with pytest.raises(InvalidArgumentError):
        OsWeights.for_largest(0, 3)


def test_bracket_init_examples():
    assert eval_bracket_init(S([0, 5, 10])) == (0, 15, -1, 10, 15, 1)
    yl, _, gl, yr, _, gr = eval_bracket_init(S([1, 2]))
    assert (gl, gr) == (0, 0)
    yl, fl, _, yr, fr, _ = eval_bracket_init(S([3, 3, 3]))
    assert yl == yr == 3 and fl == fr == 0


def test_bracket_init_matches_evaluation():
    x = S(np.random.default_rng(1).standard_normal(1001))
    yl, fl, gl, yr, fr, gr = eval_bracket_init(x)
    el, er = eval_median_objective(x, yl), eval_median_objective(x, yr)
    assert fl == pytest.approx(el.f, rel=1e-15) and fr == pytest.approx(er.f, rel=1e-15)
    assert gl == el.g.hi == -x.n + 2
    assert gr == er.g.lo == x.n - 2


def test_non_finite_point_rejected():
    with pytest.raises(InvalidArgumentError):
        eval_median_objective(S([1, 2]), math.nan)


def test_overflow_detected():
    with pytest.raises(ObjectiveOverflowError):
        eval_median_objective(S([-1e308, 1e308, 1e308]), 0.0)


def test_transform_round_trip():
    s = S([0.0, 1.0, 1e20])
    assert needs_transform(s)
    spec = TransformSpec.for_sample(s)
    keys = apply_transform(s, spec)
    assert keys.values[0] == 0.0 and keys.values[1] == math.log(2.0)
    assert keys.values[2] == pytest.approx(math.log(1e20), rel=1e-15)
    assert invert_transform(keys.values[1], spec) == 1.0
    assert not needs_transform(S([0.0, 1e15]))


finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(finite, min_size=1, max_size=40), finite)
def test_value_matches_rational_oracle(values, y):
    ev = eval_median_objective(S(values), y)
    assert ev.f == pytest.approx(float(exact_f(values, y)), rel=1e-14, abs=1e-9)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=40), st.integers(-60, 60))
def test_interval_width_is_twice_ties(values, y):
    ev = eval_median_objective(S(values), float(y))
    eq = values.count(y)
    assert ev.g.hi - ev.g.lo == 2 * eq
    lt = sum(v < y for v in values)
    gt = sum(v > y for v in values)
    assert ev.g.lo == lt - gt - eq
    assert ev.d == ev.g.hi


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=40), st.data())
def test_subgradient_brackets_finite_differences(values, data):
    # convexity: left slope <= g.lo <= g.hi <= right slope
    y = data.draw(st.integers(-60, 60))
    w = OsWeights.for_rank(data.draw(st.integers(1, len(values))), len(values))
    s = S(values)
    ev = eval_os_objective(s, float(y), w)
    fm = eval_os_objective(s, y - 0.25, w).f
    fp = eval_os_objective(s, y + 0.25, w).f
    assert (ev.f - fm) / 0.25 == pytest.approx(ev.g.lo, abs=1e-9)
    assert (fp - ev.f) / 0.25 == pytest.approx(ev.g.hi, abs=1e-9)


@given(st.lists(finite, min_size=2, max_size=40), st.lists(finite, min_size=2, max_size=6, unique=True))
def test_representative_is_monotone(values, ys):
    obj = Objective(S(values), (len(values) + 1) // 2, median=True)
    ds = [obj(y).d for y in sorted(ys)]
    assert ds == sorted(ds)
