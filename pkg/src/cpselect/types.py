"""Shared domain types: samples, rank specifications, results."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, InvalidSpecError
from .reduce import Reducer, combine_extremes, extremes_kernel


class Convention(enum.Enum):
    KTH_SMALLEST = "kth-smallest"
    KTH_LARGEST = "kth-largest"
    MEDIAN = "median"


class Method(enum.Enum):
    SORT = "sort"
    QUICKSELECT = "quickselect"
    QUICKSELECT_SERIAL_DEVICE = "quickselect-serial-device"
    BISECTION = "bisection"
    BRENT_MIN = "brent-min"
    BRENT_ROOT = "brent-root"
    CUTTING_PLANE = "cp"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class Sample:
    """Immutable 1-d float array with its extremes and sum from one fused pass.

    Build with :meth:`Sample.from_array`; the constructor does no validation.
    ``count_min``/``count_max`` are the multiplicities of the extremes, needed
    for the exact subgradients at the ends of the initial bracket.
    """

    values: np.ndarray
    min: float
    max: float
    sum: float
    count_min: int
    count_max: int
    sum_lo: float = field(compare=False, repr=False)
    reducer: Reducer = field(compare=False, repr=False)

    @classmethod
    def from_array(
        cls, x, reducer: Reducer | None = None, workers: int | None = None, copy: bool = True
    ) -> "Sample":
        arr = np.asarray(x)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float64)
        arr = np.ascontiguousarray(arr).reshape(-1)
        if arr.size == 0:
            raise InvalidArgumentError("sample must be nonempty")
        if reducer is None:
            reducer = Reducer(workers=workers)
        mn, cmn, mx, cmx, s, s_lo = reducer.reduce(extremes_kernel, [arr], combine_extremes)
        if not (np.isfinite(mn) and np.isfinite(mx)) or np.isnan(s):
            raise InvalidArgumentError("sample contains NaN or infinite values")
        if arr.flags.writeable:
            # copy=False trusts the caller not to mutate the buffer afterwards
            arr = arr.copy() if copy else arr.view()
            arr.flags.writeable = False
        return cls(arr, float(mn), float(mx), float(s), int(cmn), int(cmx), float(s_lo), reducer)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def dtype(self) -> np.dtype:
        return self.values.dtype

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class SelectionSpec:
    rank_k: int | None = None
    convention: Convention = Convention.MEDIAN

    @classmethod
    def median(cls) -> "SelectionSpec":
        return cls(None, Convention.MEDIAN)

    @classmethod
    def kth_smallest(cls, j: int) -> "SelectionSpec":
        return cls(j, Convention.KTH_SMALLEST)

    @classmethod
    def kth_largest(cls, k: int) -> "SelectionSpec":
        return cls(k, Convention.KTH_LARGEST)


def resolve_rank(spec: SelectionSpec, n: int) -> int:
    """1-based rank among the sorted values (smallest first).

    The median is the lower median ``(n + 1) // 2``.
    """
    if n < 1:
        raise InvalidSpecError("sample size must be >= 1")
    if spec.convention is Convention.MEDIAN:
        return (n + 1) // 2
    k = spec.rank_k
    if k is None or isinstance(k, bool) or int(k) != k or not 1 <= k <= n:
        raise InvalidSpecError(f"rank {k!r} out of range 1..{n}")
    k = int(k)
    if spec.convention is Convention.KTH_LARGEST:
        return n - k + 1
    return k


@dataclass(frozen=True)
class SubgradientInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidArgumentError(f"empty interval [{self.lo}, {self.hi}]")

    def __contains__(self, v: float) -> bool:
        return self.lo <= v <= self.hi

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class SelectionResult:
    value: float
    rank: int
    iterations: int
    reductions: int
    method: Method
    z_size: int = 0
    transformed: bool = False
