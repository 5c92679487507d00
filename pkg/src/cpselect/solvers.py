"""Univariate nonsmooth solvers: cutting plane, bisection, Brent (min and root).

All four share one piece of bookkeeping, :class:`SolverState`. Every
objective evaluation at a point ``t`` also returns ``count(x <= t)`` and
``count(x < t)``, and the state uses those counts (not the sign of a rounded
float) to move the bracket. That keeps the invariant

    count(x <= y_L) < j <= count(x <= y_R)

exact, whatever the solver proposes, so the exact finish is always correct.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import ddarith as dd
from .errors import InvalidArgumentError
from .objective import Objective, ObjectiveEval
from .types import Convention, Method, Sample, SelectionSpec, resolve_rank

_EPS = 2.220446049250313e-16
_CGOLD = 0.3819660112501051


@dataclass
class SolverConfig:
    maxit: int = 30
    tolerance_f: float = 1e-12
    tolerance_g: float = 0.0
    method: Method = Method.CUTTING_PLANE

    def __post_init__(self):
        if self.maxit < 1:
            raise InvalidArgumentError("maxit must be >= 1")
        if self.tolerance_f < 0 or self.tolerance_g < 0:
            raise InvalidArgumentError("tolerances must be >= 0")


@dataclass
class SolverState:
    y_L: float
    y_R: float
    f_L: float
    f_R: float
    g_L: float
    g_R: float
    m: int  # count(x <= y_L)
    m_R: int  # count(x <= y_R)
    j: int
    iterations: int = 0
    reductions: int = 1  # the fused extremes/sum pass
    found: float | None = None
    converged: bool = False
    reason: str = ""
    trace: list = field(default_factory=list, repr=False)
    f_L_lo: float = 0.0
    f_R_lo: float = 0.0

    @property
    def width(self) -> float:
        return self.y_R - self.y_L

    @property
    def done(self) -> bool:
        return self.converged

    def absorb(self, t: float, ev: ObjectiveEval) -> None:
        """Fold one evaluation into the bracket."""
        self.iterations += 1
        self.reductions += 1
        if ev.count_le < self.j:
            if t > self.y_L:
                self.y_L, self.g_L, self.m = t, ev.d, ev.count_le
                self.f_L, self.f_L_lo = ev.f, ev.f_lo
        else:
            if t < self.y_R:
                self.y_R, self.g_R, self.m_R = t, ev.d, ev.count_le
                self.f_R, self.f_R_lo = ev.f, ev.f_lo
            if ev.count_lt < self.j:
                self.found = t
                self._stop("exact")
            elif ev.count_le == self.j and ev.d == 0:
                # flat stretch of the even-n median objective
                self._stop("zero-subgradient")
        self.trace.append((self.y_L, self.y_R, self.m, self.m_R))

    def check_stops(self, cfg: SolverConfig, gt: float | None = None) -> bool:
        if self.converged:
            return True
        if self.width <= cfg.tolerance_f:
            self._stop("tolerance")
        elif gt is not None and cfg.tolerance_g > 0 and abs(gt) <= cfg.tolerance_g:
            self._stop("tolerance-g")
        return self.converged

    def _stop(self, reason: str) -> None:
        self.converged = True
        self.reason = reason


def _objective(sample: Sample, spec: SelectionSpec | int) -> Objective:
    if isinstance(spec, SelectionSpec):
        j = resolve_rank(spec, sample.n)
        return Objective(sample, j, median=spec.convention is Convention.MEDIAN)
    j = resolve_rank(SelectionSpec.kth_smallest(spec), sample.n)
    return Objective(sample, j)


def start_state(obj: Objective) -> SolverState:
    """Bracket [min, max] from cached extremes; resolves rank ties at the ends."""
    s = obj.sample
    y_l, f_l, g_l, y_r, f_r, g_r = obj.bracket_init()
    st = SolverState(y_l, y_r, f_l[0], f_r[0], g_l, g_r, m=s.count_min, m_R=s.n, j=obj.j)
    st.f_L_lo, st.f_R_lo = f_l[1], f_r[1]
    if obj.j <= s.count_min:
        st.y_R, st.f_R, st.f_R_lo, st.g_R, st.m_R = y_l, f_l[0], f_l[1], g_l, s.count_min
        st.found = y_l
        st._stop("endpoint")
    elif obj.j > s.n - s.count_max:
        st.found = y_r
        st._stop("endpoint")
    st.trace.append((st.y_L, st.y_R, st.m, st.m_R))
    return st


def _interior(st: SolverState, t: float) -> float | None:
    """Clamp a proposed point into the open bracket; None if no float fits."""
    if st.y_L < t < st.y_R:
        return t
    mid = st.y_L + 0.5 * (st.y_R - st.y_L)
    if st.y_L < mid < st.y_R:
        return mid
    return None


def _tangent_numerator(st: SolverState):
    """``f_R - f_L + y_L*g_L - y_R*g_R`` in double-double.

    The f values share every far-away term (an outlier contributes the same
    huge amount to both), so the difference must be formed before rounding.
    """
    df = dd.sub((st.f_R, st.f_R_lo), (st.f_L, st.f_L_lo))
    return dd.add(df, dd.sub(dd.mul(st.y_L, st.g_L), dd.mul(st.y_R, st.g_R)))


def cutting_plane(sample: Sample, spec, cfg: SolverConfig | None = None):
    """Kelley's cutting-plane method in one dimension.

    Each iterate is where the two tangent lines at the bracket ends cross.
    Costs one fused pass per iteration plus the initial extremes pass, so at
    most ``maxit + 1`` reductions. Returns ``(state, approx_y)``.
    """
    cfg = cfg or SolverConfig()
    obj = _objective(sample, spec)
    st = start_state(obj)
    t = st.found if st.found is not None else st.y_L
    if st.check_stops(cfg):
        return st, t
    for _ in range(cfg.maxit):
        denom = st.g_L - st.g_R
        if denom == 0:
            st.reason = "flat-model"
            break
        t = dd.value(_tangent_numerator(st)) / denom
        t = _interior(st, t)  # NaN or out-of-bracket falls back to the midpoint
        if t is None:
            st._stop("resolution")
            break
        ev = obj(t)
        st.absorb(t, ev)
        if st.check_stops(cfg, ev.d):
            break
    if not st.converged and not st.reason:
        st.reason = "maxit"
    return st, t


def bisection(sample: Sample, spec, cfg: SolverConfig | None = None):
    """Halve the bracket on the side of the sign change of the subgradient."""
    cfg = cfg or SolverConfig(method=Method.BISECTION)
    obj = _objective(sample, spec)
    st = start_state(obj)
    t = st.found if st.found is not None else st.y_L
    if st.check_stops(cfg):
        return st, t
    for _ in range(cfg.maxit):
        t = _interior(st, math.nan)
        if t is None:
            st._stop("resolution")
            break
        ev = obj(t)
        st.absorb(t, ev)
        if st.check_stops(cfg, ev.d):
            break
    if not st.converged:
        st.reason = "maxit"
    return st, t


def brent_min(sample: Sample, spec, cfg: SolverConfig | None = None):
    """Brent's parabolic interpolation minimizer with golden-section fallback."""
    cfg = cfg or SolverConfig(method=Method.BRENT_MIN)
    obj = _objective(sample, spec)
    st = start_state(obj)
    if st.check_stops(cfg):
        return st, st.found if st.found is not None else st.y_L
    a, b = st.y_L, st.y_R
    x = w = v = a + _CGOLD * (b - a)
    ev = obj(x)
    st.absorb(x, ev)
    fx = fw = fv = ev.f
    d = e = 0.0
    while not st.check_stops(cfg) and st.iterations < cfg.maxit:
        xm = 0.5 * (a + b)
        tol1 = _EPS * abs(x) + 0.25 * cfg.tolerance_f
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (b - a):
            st._stop("tolerance")
            break
        golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            etemp = e
            e = d
            if not (abs(p) >= abs(0.5 * q * etemp) or p <= q * (a - x) or p >= q * (b - x)):
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = math.copysign(tol1, xm - x)
                golden = False
        if golden:
            e = (a - x) if x >= xm else (b - x)
            d = _CGOLD * e
        u = x + d if abs(d) >= tol1 else x + math.copysign(tol1, d)
        ev = obj(u)
        st.absorb(u, ev)
        fu = ev.f
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    if not st.converged:
        st.reason = "maxit"
    return st, (st.found if st.found is not None else x)


def brent_root(sample: Sample, spec, cfg: SolverConfig | None = None):
    """Brent-Dekker root finding on the representative subgradient.

    The sign-change bracket is the rank bracket itself: the representative
    is negative exactly when fewer than ``j`` elements lie at or below.
    """
    cfg = cfg or SolverConfig(method=Method.BRENT_ROOT)
    obj = _objective(sample, spec)
    st = start_state(obj)
    if st.check_stops(cfg):
        return st, st.found if st.found is not None else st.y_L
    n = sample.n
    a, fa = st.y_L, st.g_L
    # right-derivative at the maximum (every element lies at or below it)
    b = st.y_R
    fb = float(n) if obj.weights is None else obj.weights.w_neg * n
    c, fc = a, fa
    d = e = b - a
    while st.iterations < cfg.maxit:
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * cfg.tolerance_f
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0:
            st._stop("tolerance")
            break
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        b = b + d if abs(d) > tol1 else b + math.copysign(tol1, xm)
        t = _interior(st, b)
        if t is None:
            st._stop("resolution")
            break
        b = t
        ev = obj(b)
        st.absorb(b, ev)
        fb = ev.d
        if st.check_stops(cfg, ev.d):
            break
    if not st.converged:
        st.reason = "maxit"
    return st, (st.found if st.found is not None else b)


SOLVERS = {
    Method.CUTTING_PLANE: cutting_plane,
    Method.BISECTION: bisection,
    Method.BRENT_MIN: brent_min,
    Method.BRENT_ROOT: brent_root,
}


def solve(sample: Sample, spec, cfg: SolverConfig):
    try:
        fn = SOLVERS[cfg.method]
    except KeyError:
        raise InvalidArgumentError(f"{cfg.method} is not an iterative solver") from None
    return fn(sample, spec, cfg)
