"""Seeded test distributions, outlier injection, and a raw dataset file format.

Streams come from numpy's Philox4x64 counter-based generator keyed directly
by the seed (no seed hashing), turned into doubles with the top 53 bits of
each 64-bit word. Normals use Box-Muller (cosine half, then sine half) and
Beta(2, 5) is the gamma ratio G2 / (G2 + G5) with integer-shape gammas built
from sums of exponentials. Only these primitives are used, so streams can be
reproduced outside numpy.

Mixtures assign exact component counts to position blocks and then shuffle by
sorting random 64-bit keys.
"""
from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .types import Sample

_MASK64 = (1 << 64) - 1
_TWO53 = 2.0**-53


class Dist(enum.Enum):
    UNIFORM01 = "uniform"
    NORMAL01 = "normal"
    HALFNORMAL = "halfnormal"
    BETA25 = "beta"
    MIX1 = "mix1"
    MIX2 = "mix2"
    MIX3 = "mix3"
    MIX4 = "mix4"
    MIX5 = "mix5"


@dataclass(frozen=True)
class DistributionSpec:
    kind: Dist
    n: int
    seed: int = 0
    outliers: tuple = field(default=())  # (count, magnitude) pairs

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError("n must be >= 1")
        object.__setattr__(self, "kind", Dist(self.kind))


class Stream:
    """Sequential uniform draws from one Philox key."""

    def __init__(self, seed: int):
        self._bg = np.random.Philox(key=seed & _MASK64)

    def raw(self, size: int) -> np.ndarray:
        return self._bg.random_raw(size)

    def uniform(self, size: int) -> np.ndarray:
        """Doubles in [0, 1)."""
        return (self.raw(size) >> np.uint64(11)).astype(np.float64) * _TWO53

    def uniform_open(self, size: int) -> np.ndarray:
        """Doubles in (0, 1], safe under log."""
        return ((self.raw(size) >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * _TWO53

    def normal(self, size: int) -> np.ndarray:
        half = (size + 1) // 2
        r = np.sqrt(-2.0 * np.log(self.uniform_open(half)))
        theta = 2.0 * np.pi * self.uniform(half)
        return np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:size]

    def gamma_int(self, shape: int, size: int) -> np.ndarray:
        u = self.uniform_open(shape * size).reshape(shape, size)
        return -np.log(u).sum(axis=0)

    def beta(self, a: int, b: int, size: int) -> np.ndarray:
        ga = self.gamma_int(a, size)
        gb = self.gamma_int(b, size)
        return ga / (ga + gb)

    def permutation(self, size: int) -> np.ndarray:
        return np.argsort(self.raw(size), kind="stable")


# component share of the first block for each mixture
_MIX_SHARE = {
    Dist.MIX1: (2, 3),
    Dist.MIX2: (1, 2),
    Dist.MIX3: (9, 10),
    Dist.MIX4: (2, 3),
    Dist.MIX5: (1, 2),
}


def _mixture(kind: Dist, n: int, st: Stream) -> np.ndarray:
    num, den = _MIX_SHARE[kind]
    na = (n * num + den // 2) // den
    nb = n - na
    if kind in (Dist.MIX1, Dist.MIX2):
        a = st.normal(na)
    else:
        a = np.abs(st.normal(na))
    if kind in (Dist.MIX2, Dist.MIX5):
        a = a + 1.0
    b = np.full(nb, 10.0) if kind is Dist.MIX3 else 100.0 + st.normal(nb)
    return np.concatenate([a, b])


def generate_array(spec: DistributionSpec, dtype=np.float64) -> np.ndarray:
    st = Stream(spec.seed)
    n, kind = spec.n, spec.kind
    if kind is Dist.UNIFORM01:
        x = st.uniform(n)
    elif kind is Dist.NORMAL01:
        x = st.normal(n)
    elif kind is Dist.HALFNORMAL:
        x = np.abs(st.normal(n))
    elif kind is Dist.BETA25:
        x = st.beta(2, 5, n)
    elif kind in _MIX_SHARE:
        x = _mixture(kind, n, st)
    else:  # pragma: no cover - Dist() already rejects unknown kinds
        raise InvalidArgumentError(f"unsupported distribution {kind!r}")
    pos = n
    for count, magnitude in spec.outliers:
        if count < 0 or count > pos:
            raise InvalidArgumentError(f"cannot place {count} outliers in n={n}")
        x[pos - count:pos] = magnitude
        pos -= count
    if kind in _MIX_SHARE or spec.outliers:
        x = x[st.permutation(n)]
    with np.errstate(over="ignore"):
        x = x.astype(dtype)
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("generated non-finite values (magnitude too large for dtype?)")
    return x


def generate(spec: DistributionSpec, dtype=np.float64, workers: int | None = None) -> Sample:
    return Sample.from_array(generate_array(spec, dtype), workers=workers, copy=False)


def inject_extremes(sample: Sample, magnitudes, seed: int = 0) -> Sample:
    """Insert the given values at seeded positions (n grows by len(magnitudes))."""
    mags = np.asarray(list(magnitudes), dtype=sample.dtype)
    if mags.size == 0:
        return sample
    n_new = sample.n + mags.size
    slots = np.sort(Stream(seed).permutation(n_new)[: mags.size])
    out = np.empty(n_new, dtype=sample.dtype)
    mask = np.zeros(n_new, dtype=bool)
    mask[slots] = True
    out[mask] = mags
    out[~mask] = sample.values
    return Sample.from_array(out, reducer=sample.reducer, copy=False)


# ------------------------------------------------------------ dataset files

MAGIC = b"CPSL"
_HEADER = struct.Struct("<4sIQ")  # magic, bytes per value, n


def dump(path: str | Path, values: np.ndarray) -> None:
    """Write little-endian raw values after a 16-byte header."""
    arr = np.asarray(values)
    if arr.dtype == np.float32:
        width, le = 4, "<f4"
    elif arr.dtype == np.float64:
        width, le = 8, "<f8"
    else:
        raise InvalidArgumentError(f"unsupported dtype {arr.dtype}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, width, arr.size))
        fh.write(arr.reshape(-1).astype(le, copy=False).tobytes())


def load(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise InvalidArgumentError(f"{path}: truncated header")
        magic, width, n = _HEADER.unpack(head)
        if magic != MAGIC:
            raise InvalidArgumentError(f"{path}: bad magic {magic!r}")
        if width not in (4, 8):
            raise InvalidArgumentError(f"{path}: bad precision flag {width}")
        data = fh.read()
    if len(data) != n * width:
        raise InvalidArgumentError(f"{path}: expected {n * width} data bytes, found {len(data)}")
    arr = np.frombuffer(data, dtype="<f4" if width == 4 else "<f8")
    return arr.astype(np.float32 if width == 4 else np.float64)
