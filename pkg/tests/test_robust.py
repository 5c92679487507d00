import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpselect import InvalidSpecError, NoFitError
from cpselect.robust import (
    Estimator,
    RegressionProblem,
    default_h,
    fit_elemental,
    half_h,
    knn_classify,
    knn_predict,
    least_squares,
    lms_objective,
    load_csv,
    lts_objective,
    neighbour_weights,
    residuals,
    trim_weights,
)


def problem_with_residuals(r, h=None):
    # X = I-like column of zeros except intercept, y = -r so r(theta=0) = r
    r = np.asarray(r, dtype=np.float64)
    X = np.column_stack([np.arange(len(r), dtype=np.float64)])
    return RegressionProblem(X, -r, h)


def sorted_oracle(r, h):
    return float(np.sum(np.sort(np.asarray(r, dtype=np.float64) ** 2)[:h]))


def test_residual_examples():
    p = RegressionProblem([[1.0], [2.0]], [1.0, 2.0])
    assert residuals(p, [1.0]).tolist() == [0.0, 0.0]
    assert residuals(p, [0.0]).tolist() == [-1.0, -2.0]


def test_residuals_match_rowwise_dot(rng):
    X, y, th = rng.standard_normal((50, 3)), rng.standard_normal(50), rng.standard_normal(3)
    p = RegressionProblem(X, y)
    loop = [sum(X[i, k] * th[k] for k in range(3)) - y[i] for i in range(50)]
    assert residuals(p, th) == pytest.approx(loop, rel=1e-14)


def test_lms_examples():
    assert lms_objective(problem_with_residuals([0, 0, 3]), [0.0]) == 0
    assert lms_objective(problem_with_residuals([1, -2, 3]), [0.0]) == 4


def test_lms_matches_sort(rng):
    X, y = rng.standard_normal((1000, 2)), rng.standard_normal(1000)
    p = RegressionProblem(X, y)
    th = rng.standard_normal(2)
    r2 = residuals(p, th) ** 2
    assert lms_objective(p, th) == np.sort(r2)[499]


def test_lts_examples():
    assert lts_objective(problem_with_residuals([1, 2, 3, 4], h=2), [0.0]) == 5
    assert lts_objective(problem_with_residuals([2, 2, 2, 2], h=2), [0.0]) == 8
    w = trim_weights(np.array([2.0, 2, 2, 2]), 2)
    assert (w.b_L, w.b, w.a) == (0, 4, 2)
    r = [1.0, -3.0, 0.5, 2.0]
    assert lts_objective(problem_with_residuals(r, h=4), [0.0]) == sum(v * v for v in r)


def test_h_conventions():
    assert default_h(200, 2) == 101
    assert half_h(200) == 100 and half_h(201) == 101
    with pytest.raises(InvalidSpecError):
        RegressionProblem(np.ones((3, 1)), np.ones(3), h=4)


@given(st.lists(st.integers(-5, 5), min_size=2, max_size=40), st.data())
def test_lts_tie_identity(r, data):
    h = data.draw(st.integers(1, len(r)))
    got = lts_objective(problem_with_residuals(r, h), [0.0])
    assert got == pytest.approx(sorted_oracle(r, h), rel=4 * np.finfo(float).eps, abs=0)


def _contaminated(n=200, frac=0.3, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 10, n)
    y = 2 * x + 1
    bad = rng.choice(n, int(frac * n), replace=False)
    y[bad] = 500 + rng.standard_normal(bad.size)
    return RegressionProblem.with_intercept(x, y)


@pytest.mark.parametrize("estimator", [Estimator.LMS, Estimator.LTS])
def test_fit_recovers_line(estimator):
    p = _contaminated()
    fit = fit_elemental(p, subsets=500, seed=1, estimator=estimator)
    assert np.abs(fit.theta - [2.0, 1.0]).max() < 1e-6
    assert fit.objective <= _objective(estimator)(p, [2.0, 1.0]) + 1e-9
    assert np.abs(least_squares(p) - [2.0, 1.0]).max() > 1


def _objective(estimator):
    return lms_objective if estimator is Estimator.LMS else lts_objective


def test_fit_small_example_and_determinism():
    x = np.arange(20.0)
    y = 2 * x + 1
    y[[2, 7, 11, 15, 19]] = 500.0
    p = RegressionProblem.with_intercept(x, y)
    a = fit_elemental(p, subsets=500, seed=3, estimator="lms")
    b = fit_elemental(p, subsets=500, seed=3, estimator="lms")
    assert np.abs(a.theta - [2, 1]).max() < 1e-6 and a.objective == 0
    assert np.array_equal(a.theta, b.theta)


def test_more_subsets_never_worse():
    p = _contaminated(frac=0.45, seed=4)
    scores = [fit_elemental(p, subsets=k, seed=5).objective for k in (1, 5, 25, 125)]
    assert scores == sorted(scores, reverse=True)


def test_trimming_ignores_outlier_size():
    p = _contaminated(seed=6)
    base = lts_objective(p, [2.0, 1.0])
    p.y[p.y > 100] *= 1e6
    assert lts_objective(p, [2.0, 1.0]) == base


def test_singular_subsets():
    p = RegressionProblem(np.ones((5, 2)), np.arange(5.0))
    with pytest.raises(NoFitError):
        fit_elemental(p, subsets=10)


def test_load_csv(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("x,y\n0,1\n1,3\n2,5\n")
    p = load_csv(f)
    assert p.X.tolist() == [[0, 1], [1, 1], [2, 1]]
    assert p.y.tolist() == [1, 3, 5]
    f.write_text("a,b\n0,1\n")
    with pytest.raises(ValueError):
        load_csv(f)


def test_knn_examples():
    pts, vals = [[0.0], [1.0], [10.0]], [1.0, 2.0, 99.0]
    assert knn_predict(pts, vals, [0.4], k=2) == 1.5
    assert knn_predict(pts, vals, [0.4], k=3) == pytest.approx(np.mean(vals))
    square = [[1, 0], [0, 1], [-1, 0], [0, -1]]
    w = neighbour_weights(square, [0, 0], k=2)
    assert w.tolist() == [0.5] * 4
    assert knn_predict(square, [1, 2, 3, 4], [0, 0], k=2) == 2.5


def test_knn_inverse_distance_and_classify():
    pts = [[0.0], [1.0], [3.0], [3.5]]
    w = neighbour_weights(pts, [0.5], 2, "inverse")
    assert w[2] == w[3] == 0 and w[0] == w[1] > 0
    assert knn_classify(pts, ["a", "b", "b", "b"], [3.2], k=3) == "b"
    assert knn_classify(pts, ["z", "a", "q", "q"], [0.5], k=2) == "a"  # tie: sorted-first
    with pytest.raises(InvalidSpecError):
        neighbour_weights(pts, [0.0], 5)
