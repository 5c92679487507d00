"""Hybrid selection (a few cutting-plane steps, then copy and sort) and the
exact finishes shared by every iterative method."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, ObjectiveOverflowError, PrecisionLossWarning
from .objective import TransformSpec, apply_transform, needs_transform
from .reduce import combine_max_le, copy_between, max_le_kernel
from .solvers import SolverConfig, SolverState, _objective, cutting_plane, solve, start_state
from .types import Method, Sample, SelectionResult, SelectionSpec, resolve_rank

log = logging.getLogger(__name__)


@dataclass
class HybridConfig:
    cp_iterations: int = 7
    # z above this fraction of n is selected with a partition instead of a sort
    fallback_full_sort_threshold: float = 0.5

    def __post_init__(self):
        if self.cp_iterations < 0:
            raise InvalidArgumentError("cp_iterations must be >= 0")


@dataclass(frozen=True)
class Finish:
    value: float
    z_size: int
    passes: int


def exact_finish(sample: Sample, approx_y: float, keys: Sample | None = None) -> float:
    """Largest element ``x_i <= approx_y`` in one reduction pass.

    With ``keys`` (a monotone image of the sample) the comparison is made on
    the keys and the original value is returned.
    """
    keys = keys or sample
    if approx_y < keys.min:
        raise InvalidArgumentError(f"{approx_y!r} is below the sample minimum {keys.min!r}")
    return _max_le(keys, sample.values, approx_y)


def _max_le(keys: Sample, values: np.ndarray, y: float) -> float:
    best, _ = keys.reducer.reduce(max_le_kernel, [keys.values, values], combine_max_le, float(y))
    return float(values.dtype.type(best))


def _pick(z: np.ndarray, idx: int, threshold: float, n: int) -> float:
    if z.size >= threshold * n:
        log.debug("pivot interval holds %d of %d elements; partitioning", z.size, n)
        return float(np.partition(z, idx)[idx])
    return float(np.sort(z)[idx])


def _rank_among_ties(keys: Sample, values: np.ndarray, at: float, offset: int) -> float:
    """``offset``-th smallest (1-based) value among elements whose key equals ``at``."""
    tied = np.sort(values[keys.values == np.float64(at)])
    return float(tied[offset - 1])


def finish_bracket(
    keys: Sample, values: np.ndarray, st: SolverState, threshold: float = 0.5
) -> Finish:
    """Exact answer from a sound rank bracket.

    ``keys`` is what the solver ran on; ``values`` holds the original data
    (the same array unless a monotone transform was applied).
    """
    j = st.j
    same = keys.values is values
    if st.found is not None:
        if same:
            return Finish(st.found, 0, 0)
        below = int(np.count_nonzero(keys.values < np.float64(st.found)))
        return Finish(_rank_among_ties(keys, values, st.found, j - below), 0, 1)
    if st.m_R == j:
        # exactly j elements at or below y_R: the answer is the largest of them
        return Finish(_max_le(keys, values, st.y_R), 0, 1)
    parts = keys.reducer.map_chunks(copy_between, [keys.values, values], st.y_L, st.y_R)
    z = np.concatenate([p[0] for p in parts]) if parts else np.empty(0, values.dtype)
    m = sum(p[1] for p in parts)
    idx = j - m
    if m != st.m or idx <= 0:
        raise AssertionError(f"unsound bracket: m={m}, recorded {st.m}, rank {j}")
    if idx <= z.size:
        return Finish(_pick(z, idx - 1, threshold, keys.n), int(z.size), 1)
    # target sits on the right endpoint, which the open interval excludes
    if same:
        return Finish(st.y_R, int(z.size), 1)
    return Finish(_rank_among_ties(keys, values, st.y_R, idx - z.size), int(z.size), 2)


def _cp_prefix(keys: Sample, spec, iterations: int, tol: float) -> SolverState:
    if iterations == 0:
        return start_state(_objective(keys, spec))
    st, _ = cutting_plane(keys, spec, SolverConfig(maxit=iterations, tolerance_f=tol))
    return st


def hybrid_select(
    sample: Sample, spec: SelectionSpec, cfg: HybridConfig | None = None, tolerance_f: float = 1e-12
) -> SelectionResult:
    """Selection by a few cutting-plane iterations, then sort of the pivot interval."""
    return select(sample, spec, Method.HYBRID, hybrid_cfg=cfg, solver_cfg=SolverConfig(tolerance_f=tolerance_f))


def select(
    x,
    spec: SelectionSpec | None = None,
    method: Method | str = Method.HYBRID,
    *,
    solver_cfg: SolverConfig | None = None,
    hybrid_cfg: HybridConfig | None = None,
    transform: str = "auto",
    workers: int | None = None,
) -> SelectionResult:
    """Select an order statistic of ``x``; always returns an element of ``x``.

    ``transform`` is ``"auto"`` (log transform when the data range exceeds
    1e15 or the objective overflows), ``"on"`` or ``"off"``. With ``"off"``
    a wide range raises :class:`PrecisionLossWarning`; the answer is still
    exact because the bracket is maintained by counts.
    """
    from . import baselines

    method = Method(method)
    spec = spec or SelectionSpec.median()
    if transform not in ("auto", "on", "off"):
        raise InvalidArgumentError(f"transform must be auto/on/off, not {transform!r}")
    sample = x if isinstance(x, Sample) else Sample.from_array(x, workers=workers)
    j = resolve_rank(spec, sample.n)

    if method is Method.SORT:
        return SelectionResult(baselines.sort_select(sample.values, j), j, 0, 0, method)
    if method in (Method.QUICKSELECT, Method.QUICKSELECT_SERIAL_DEVICE):
        return SelectionResult(baselines.quickselect(sample.values, j), j, 0, 0, method)

    hybrid_cfg = hybrid_cfg or HybridConfig()
    tol = solver_cfg.tolerance_f if solver_cfg else 1e-12
    if method is Method.HYBRID:
        cfg = None
    elif solver_cfg is None:
        cfg = SolverConfig(method=method)
    else:
        cfg = SolverConfig(solver_cfg.maxit, solver_cfg.tolerance_f, solver_cfg.tolerance_g, method)

    def run(keys: Sample) -> SolverState:
        if cfg is None:
            return _cp_prefix(keys, spec, hybrid_cfg.cp_iterations, tol)
        return solve(keys, spec, cfg)[0]

    wide = needs_transform(sample)
    use_transform = transform == "on" or (transform == "auto" and wide)
    if transform == "off" and wide:
        warnings.warn(
            f"data range {sample.max - sample.min:.3g} exceeds 1e15; objective sums lose "
            "precision (use transform='auto' or 'on')",
            PrecisionLossWarning,
            stacklevel=2,
        )
    extra = 0
    keys = sample
    if use_transform:
        keys = apply_transform(sample, TransformSpec.for_sample(sample))
        extra += 2
    try:
        st = run(keys)
    except ObjectiveOverflowError:
        if transform != "auto" or use_transform:
            raise
        keys = apply_transform(sample, TransformSpec.for_sample(sample))
        extra += 2
        use_transform = True
        st = run(keys)
    fin = finish_bracket(keys, sample.values, st, hybrid_cfg.fallback_full_sort_threshold)
    return SelectionResult(
        value=fin.value,
        rank=j,
        iterations=st.iterations,
        reductions=st.reductions + fin.passes + extra,
        method=method,
        z_size=fin.z_size,
        transformed=use_transform,
    )


def median(x, method: Method | str = Method.HYBRID, **kw) -> float:
    return select(x, SelectionSpec.median(), method, **kw).value


def kth_smallest(x, j: int, method: Method | str = Method.HYBRID, **kw) -> float:
    return select(x, SelectionSpec.kth_smallest(j), method, **kw).value
