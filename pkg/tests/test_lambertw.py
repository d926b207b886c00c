import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from targetrate.errors import DomainError
from targetrate.lambertw import lambert_w0


def test_omega_constant():
    assert lambert_w0(1.0) == pytest.approx(0.5671432904097838, abs=1e-15)


def test_zero_and_e():
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(math.e) == pytest.approx(1.0, rel=1e-15)


def test_array_shape_preserved():
    w = np.array([[0.5, 1.0], [10.0, 1e6]])
    out = lambert_w0(w)
    assert out.shape == w.shape
    assert np.all(np.abs(out * np.exp(out) - w) <= 1e-13 * w)


def test_tiny_arguments_follow_series():
    for w in (1e-300, 1e-20, 1e-9, 1e-5):
        assert lambert_w0(w) == pytest.approx(w - w * w + 1.5 * w**3, rel=1e-14)


@pytest.mark.parametrize("bad", [-1e-12, -1.0, math.nan, math.inf])
def test_rejects_outside_domain(bad):
    with pytest.raises(DomainError) as info:
        lambert_w0(bad)
    assert info.value.field == "w"


@given(st.floats(1e-12, 1e12))
def test_round_trip(w):
    x = lambert_w0(w)
    assert abs(x * math.exp(x) - w) <= 1e-12 * w


@given(st.floats(1e-12, 1e12), st.floats(1e-12, 1e12))
def test_monotone(u, v):
    lo, hi = sorted((u, v))
    assert lambert_w0(lo) <= lambert_w0(hi)


@given(st.floats(1e6, 1e300))
def test_large_argument_asymptotics(w):
    # W(w) ~ ln w - ln ln w: the ratio to ln w sits strictly inside (0, 1)
    assert 0.0 < lambert_w0(w) / math.log(w) < 1.0
