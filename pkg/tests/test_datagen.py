import struct

import numpy as np
import pytest

from cpselect import InvalidArgumentError, Sample
from cpselect.datagen import (
    MAGIC,
    Dist,
    DistributionSpec,
    Stream,
    dump,
    generate,
    generate_array,
    inject_extremes,
    load,
)


def test_uniform_stream_is_top_53_bits():
    raw = np.random.Philox(key=42).random_raw(4)
    expected = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53
    assert np.array_equal(Stream(42).uniform(4), expected)


def test_halfnormal_nonnegative():
    assert generate_array(DistributionSpec(Dist.HALFNORMAL, 100_000, seed=3)).min() >= 0


def test_mix3_has_one_ten_at_n10():
    x = generate_array(DistributionSpec(Dist.MIX3, 10, seed=1))
    assert np.count_nonzero(x == 10.0) == 1


def test_same_spec_is_bit_identical():
    spec = DistributionSpec(Dist.MIX4, 5000, seed=9)
    a, b = generate(spec), generate(spec)
    assert a.values.tobytes() == b.values.tobytes()
    assert generate_array(DistributionSpec(Dist.MIX4, 5000, seed=10)).tobytes() != a.values.tobytes()


@pytest.mark.parametrize(
    "kind,mean,sd",
    [
        (Dist.UNIFORM01, 0.5, 12**-0.5),
        (Dist.NORMAL01, 0.0, 1.0),
        (Dist.HALFNORMAL, (2 / np.pi) ** 0.5, (1 - 2 / np.pi) ** 0.5),
        (Dist.BETA25, 2 / 7, (10 / (49 * 8)) ** 0.5),
    ],
)
def test_moments(kind, mean, sd):
    x = generate_array(DistributionSpec(kind, 200_000, seed=11))
    assert abs(x.mean() - mean) < 5 * sd / len(x) ** 0.5
    assert x.std() == pytest.approx(sd, rel=0.02)


@pytest.mark.parametrize(
    "kind,share,low,high",
    [
        (Dist.MIX1, 2 / 3, None, 100.0),
        (Dist.MIX2, 1 / 2, 1.0, 100.0),
        (Dist.MIX3, 9 / 10, (2 / np.pi) ** 0.5, 10.0),
        (Dist.MIX4, 2 / 3, (2 / np.pi) ** 0.5, 100.0),
        (Dist.MIX5, 1 / 2, 1 + (2 / np.pi) ** 0.5, 100.0),
    ],
)
def test_mixture_blocks(kind, share, low, high):
    n = 30_000
    x = generate_array(DistributionSpec(kind, n, seed=2))
    hi = x > 50 if high == 100.0 else x == 10.0
    assert np.count_nonzero(~hi) == round(n * share)
    if low is not None:
        assert x[~hi].mean() == pytest.approx(low, abs=0.05)
    assert x[hi].mean() == pytest.approx(high, abs=0.05)
    assert not np.all(np.diff(hi.astype(int)) >= 0)  # shuffled, not block sorted


def test_planted_outliers():
    x = generate_array(DistributionSpec(Dist.UNIFORM01, 1000, seed=0, outliers=((3, 1e9),)))
    assert np.count_nonzero(x == 1e9) == 3
    with pytest.raises(InvalidArgumentError):
        generate_array(DistributionSpec(Dist.UNIFORM01, 2, outliers=((3, 1.0),)))


def test_float32_overflowing_magnitude_rejected():
    with pytest.raises(InvalidArgumentError):
        generate_array(DistributionSpec(Dist.UNIFORM01, 10, outliers=((1, 1e300),)), np.float32)


def test_inject_extremes():
    s = generate(DistributionSpec(Dist.UNIFORM01, 1000, seed=0))
    t = inject_extremes(s, [1e9])
    assert t.max == 1e9 and t.n == 1001
    assert np.array_equal(np.sort(t.values)[:-1], np.sort(s.values))
    assert inject_extremes(s, []) is s
    assert inject_extremes(s, [1e20]).max - s.min > 1e15


def test_dump_load_round_trip(tmp_path):
    for dtype in (np.float32, np.float64):
        x = generate_array(DistributionSpec(Dist.NORMAL01, 777, seed=5), dtype)
        p = tmp_path / f"d{np.dtype(dtype).itemsize}.bin"
        dump(p, x)
        raw = p.read_bytes()
        assert raw[:4] == MAGIC
        assert struct.unpack("<IQ", raw[4:16]) == (np.dtype(dtype).itemsize, 777)
        y = load(p)
        assert y.dtype == dtype and np.array_equal(x, y)


def test_load_rejects_corruption(tmp_path):
    p = tmp_path / "bad.bin"
    dump(p, np.arange(4.0))
    data = p.read_bytes()
    p.write_bytes(b"XXXX" + data[4:])
    with pytest.raises(InvalidArgumentError):
        load(p)
    p.write_bytes(data[:-3])
    with pytest.raises(InvalidArgumentError):
        load(p)
    with pytest.raises(InvalidArgumentError):
        dump(p, np.arange(3))


@pytest.mark.parametrize(
    "kind,lo,hi",
    [
        (Dist.UNIFORM01, 0.49, 0.51),
        (Dist.NORMAL01, -0.02, 0.02),
        (Dist.MIX1, -np.inf, 50.0),
        (Dist.MIX2, -np.inf, 100.0),
        (Dist.MIX5, -np.inf, 100.0),
    ],
)
def test_median_sanity_bands(kind, lo, hi):
    x = generate_array(DistributionSpec(kind, 100_000, seed=21))
    med = np.sort(x)[(len(x) - 1) // 2]
    assert lo <= med <= hi
