"""Reference selection methods: serial quickselect and full-sort selection."""
import numba
import numpy as np

from .errors import InvalidSpecError


def _check_rank(n: int, j: int) -> None:
    if not 1 <= j <= n:
        raise InvalidSpecError(f"rank {j} out of range 1..{n}")


@numba.njit(cache=True)
def _quickselect_inplace(a, k):
    # k is 0-based; Hoare partition around a median-of-three pivot
    lo = 0
    hi = a.shape[0] - 1
    while hi > lo:
        mid = (lo + hi) // 2
        if a[mid] < a[lo]:
            a[mid], a[lo] = a[lo], a[mid]
        if a[hi] < a[lo]:
            a[hi], a[lo] = a[lo], a[hi]
        if a[hi] < a[mid]:
            a[hi], a[mid] = a[mid], a[hi]
        pivot = a[mid]
        i = lo - 1
        j = hi + 1
        while True:
            i += 1
            while a[i] < pivot:
                i += 1
            j -= 1
            while a[j] > pivot:
                j -= 1
            if i >= j:
                break
            a[i], a[j] = a[j], a[i]
        # now a[lo..j] <= pivot <= a[j+1..hi]
        if k <= j:
            hi = j
        else:
            lo = j + 1
    return a[k]


def quickselect(values, j: int) -> float:
    """j-th smallest (1-based) by quickselect on a private copy."""
    a = np.array(values, copy=True)
    if a.dtype not in (np.float32, np.float64):
        a = a.astype(np.float64)
    _check_rank(a.size, j)
    return float(_quickselect_inplace(a.reshape(-1), j - 1))


def sort_select(values, j: int) -> float:
    """j-th smallest (1-based) by full sort; the correctness oracle."""
    a = np.sort(np.asarray(values).reshape(-1))
    _check_rank(a.size, j)
    return float(a[j - 1])
