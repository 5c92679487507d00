"""High-breakdown regression objectives (LMS, LTS) and order-statistic kNN.

LTS is evaluated without sorting the residuals. Find the trimming threshold
``m`` (the h-th smallest ``|r_i|``) by selection, then

    F = sum_{|r_i| < m} r_i^2 + (a / b) * sum_{|r_i| = m} r_i^2

with ``b_L = #{|r_i| < m}``, ``b = #{|r_i| = m}`` and ``a = h - b_L``. The
fractional weight on ties makes F equal the sum of the h smallest squares.
The same tie rule gives the kNN neighbourhood weights.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .datagen import Stream
from .errors import InvalidArgumentError, InvalidSpecError, NoFitError
from .hybrid import select
from .types import Method, SelectionSpec

COND_LIMIT = 1e12


class Estimator(enum.Enum):
    LMS = "lms"
    LTS = "lts"


class Weighting(enum.Enum):
    UNIFORM = "uniform"
    INVERSE_DISTANCE = "inverse"


def default_h(n: int, p: int) -> int:
    return (n + p) // 2


def half_h(n: int) -> int:
    """The n-parity alternative: (n+1)/2 for odd n, n/2 for even n."""
    return (n + 1) // 2


@dataclass
class RegressionProblem:
    X: np.ndarray
    y: np.ndarray
    h: int | None = None

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=np.float64))
        self.y = np.asarray(self.y, dtype=np.float64).reshape(-1)
        n, p = self.X.shape
        if self.y.size != n:
            raise InvalidArgumentError(f"X has {n} rows but y has {self.y.size} entries")
        if not n > p >= 1:
            raise InvalidArgumentError(f"need n > p >= 1, got n={n}, p={p}")
        if self.h is None:
            self.h = default_h(n, p)
        if not 1 <= self.h <= n:
            raise InvalidSpecError(f"h={self.h} out of range 1..{n}")

    @classmethod
    def with_intercept(cls, x, y, h: int | None = None) -> "RegressionProblem":
        x = np.asarray(x, dtype=np.float64)
        x = x.reshape(-1, 1) if x.ndim == 1 else x
        return cls(np.column_stack([x, np.ones(len(x))]), y, h)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class TrimWeights:
    b_L: int
    b: int
    a: int
    m: float


def residuals(problem: RegressionProblem, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if theta.size != problem.p:
        raise InvalidArgumentError(f"theta has {theta.size} entries, model has {problem.p}")
    if not np.all(np.isfinite(theta)):
        raise InvalidArgumentError("theta must be finite")
    return problem.X @ theta - problem.y


def lms_objective(problem: RegressionProblem, theta) -> float:
    """Median of squared residuals (lower median for even n)."""
    r = residuals(problem, theta)
    return select(r * r, SelectionSpec.median(), Method.HYBRID).value


def trim_weights(abs_r: np.ndarray, h: int) -> TrimWeights:
    m = select(abs_r, SelectionSpec.kth_smallest(h), Method.HYBRID).value
    b_l = int(np.count_nonzero(abs_r < m))
    b = int(np.count_nonzero(abs_r == m))
    return TrimWeights(b_l, b, h - b_l, m)


def lts_objective(problem: RegressionProblem, theta, h: int | None = None) -> float:
    """Sum of the h smallest squared residuals, via one selection and two reductions."""
    h = problem.h if h is None else h
    if not 1 <= h <= problem.n:
        raise InvalidSpecError(f"h={h} out of range 1..{problem.n}")
    r = residuals(problem, theta)
    abs_r = np.abs(r)
    w = trim_weights(abs_r, h)
    sq = r * r
    inside = math.fsum(sq[abs_r < w.m])
    tied = math.fsum(sq[abs_r == w.m])
    return inside + (w.a / w.b) * tied


def _objective_fn(estimator: Estimator) -> Callable:
    return lms_objective if estimator is Estimator.LMS else lts_objective


def _solve_subset(Xs: np.ndarray, ys: np.ndarray) -> np.ndarray | None:
    if np.linalg.cond(Xs) > COND_LIMIT:
        return None
    try:
        return np.linalg.solve(Xs, ys)
    except np.linalg.LinAlgError:
        return None


@dataclass(frozen=True)
class Fit:
    theta: np.ndarray
    objective: float
    estimator: Estimator
    subset_index: int
    evaluated: int


def fit_elemental(
    problem: RegressionProblem,
    subsets: int = 500,
    seed: int = 0,
    estimator: Estimator | str = Estimator.LTS,
) -> Fit:
    """Best exact-fit candidate over random p-point subsets.

    Subsets are drawn one after another from a single stream, so the first k
    subsets for a given seed are the same whatever ``subsets`` is. Ties keep
    the lowest subset index.
    """
    estimator = Estimator(estimator)
    if subsets < 1:
        raise InvalidArgumentError("subsets must be >= 1")
    objective = _objective_fn(estimator)
    st = Stream(seed)
    n, p = problem.n, problem.p
    best = None
    evaluated = 0
    for i in range(subsets):
        idx = _draw(st, n, p)
        theta = _solve_subset(problem.X[idx], problem.y[idx])
        if theta is None:
            continue
        evaluated += 1
        F = objective(problem, theta)
        if best is None or F < best.objective:
            best = Fit(theta, F, estimator, i, 0)
    if best is None:
        raise NoFitError(f"all {subsets} elemental subsets were singular")
    return Fit(best.theta, best.objective, estimator, best.subset_index, evaluated)


def _draw(st: Stream, n: int, p: int) -> np.ndarray:
    # p distinct indices; duplicates are redrawn
    chosen: list[int] = []
    while len(chosen) < p:
        for v in st.raw(p):
            k = int(v % np.uint64(n))
            if k not in chosen:
                chosen.append(k)
                if len(chosen) == p:
                    break
    return np.sort(np.array(chosen))


def least_squares(problem: RegressionProblem) -> np.ndarray:
    return np.linalg.lstsq(problem.X, problem.y, rcond=None)[0]


def load_csv(path: str | Path, intercept: bool = True, h: int | None = None) -> RegressionProblem:
    """Header row required; column ``y`` is the response, the rest are regressors."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "y" not in reader.fieldnames:
            raise InvalidArgumentError(f"{path}: header must contain a 'y' column")
        cols = [c for c in reader.fieldnames if c != "y"]
        rows = list(reader)
    try:
        y = np.array([float(r["y"]) for r in rows])
        X = np.array([[float(r[c]) for c in cols] for r in rows]).reshape(len(rows), len(cols))
    except ValueError as exc:
        raise InvalidArgumentError(f"{path}: non-numeric cell ({exc})") from None
    if intercept:
        X = np.column_stack([X, np.ones(len(rows))])
    return RegressionProblem(X, y, h)


# --------------------------------------------------------------------- kNN


def euclidean(points: np.ndarray, query: np.ndarray) -> np.ndarray:
    return np.sqrt(((points - query) ** 2).sum(axis=1))


def neighbour_weights(
    points,
    query,
    k: int,
    weighting: Weighting | str = Weighting.UNIFORM,
    metric: Callable = euclidean,
    delta: float = 1e-12,
) -> np.ndarray:
    """Per-point weights over the k nearest: full weight inside d_(k), a/b on ties."""
    weighting = Weighting(weighting)
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    n = pts.shape[0]
    if n == 0:
        raise InvalidArgumentError("empty training set")
    if not 1 <= k <= n:
        raise InvalidSpecError(f"k={k} out of range 1..{n}")
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    d = metric(pts, q)
    dk = select(d, SelectionSpec.kth_smallest(k), Method.HYBRID).value
    inside = d < dk
    tied = d == dk
    b_l = int(np.count_nonzero(inside))
    b = int(np.count_nonzero(tied))
    rho = inside.astype(np.float64)
    rho[tied] = (k - b_l) / b
    base = np.ones(n) if weighting is Weighting.UNIFORM else 1.0 / (d + delta)
    return rho * base


def knn_predict(points, values: Sequence[float], query, k: int, weighting="uniform", **kw) -> float:
    w = neighbour_weights(points, query, k, weighting, **kw)
    f = np.asarray(values, dtype=np.float64)
    return float(np.dot(w, f) / w.sum())


def knn_classify(points, labels: Sequence, query, k: int, weighting="uniform", **kw):
    """Weighted majority label; ties go to the label that sorts first."""
    w = neighbour_weights(points, query, k, weighting, **kw)
    votes: dict = {}
    for lab, wi in zip(labels, w):
        if wi > 0:
            votes[lab] = votes.get(lab, 0.0) + wi
    top = max(votes.values())
    return sorted(lab for lab, v in votes.items() if v == top)[0]
