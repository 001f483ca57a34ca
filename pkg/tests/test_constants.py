import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dwkinematics import ModelConstants, TrackGeometry, d1_from_drift, derive_k


def test_derive_k_all_ones():
    assert derive_k(1, 1, 1, 1, 1, 1) == (1, 2, 2, 2, 1)


def test_derive_k_no_current_damping():
    k = derive_k(2.0, 3.0, 5.0, 7.0, 0.25, 0.0)
    assert k == (0.5, 0.75, 1.25, 1.75, 0.0)


def test_derive_k_rejects_nonpositive_d1():
    with pytest.raises(ValueError):
        derive_k(1, 1, 1, 1, 0.0, 0.0)


finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
positive = st.floats(min_value=1e-6, max_value=1e3, allow_nan=False)


@given(c0=finite, c1=finite, c2=finite, c3=finite, d1=positive, d2=positive)
def test_k_identity_holds_exactly_on_construction(c0, c1, c2, c3, d1, d2):
    mc = ModelConstants(c0, c1, c2, c3, d1, d2)
    assert mc.k0 == d1 * c0
    assert mc.k1 == d1 * c1 + d2 * c0
    assert mc.k2 == d1 * c2 + d2 * c1
    assert mc.k3 == d1 * c3 + d2 * c2
    assert mc.k4 == d2 * c3


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(d1=0.0),
        dict(d1=-0.1),
        dict(d2=-1e-15),
        dict(c_r=-0.1),
        dict(c_r=1.5),
        dict(p1=-1.0),
        dict(p2=-1.0),
        dict(d1=math.inf),
        dict(c0=math.nan),
    ],
)
def test_invalid_constants_rejected(kwargs):
    base = dict(c0=1.0, c1=1e-9, c2=0.0, c3=0.0, d1=0.1, d2=0.0)
    base.update(kwargs)
    with pytest.raises(ValueError):
        ModelConstants(**base)


def test_from_drift_matches_reciprocal():
    mc = ModelConstants.from_drift(1.0, 1e-9, 0.0, 0.0, drift_const=12.5, d2=1e-13)
    assert mc.d1 == 1.0 / 12.5


def test_d1_from_drift():
    assert d1_from_drift(2.0) == 0.5
    with pytest.raises(ValueError):
        d1_from_drift(0.0)
    with pytest.raises(ValueError):
        d1_from_drift(-1.0)


def test_geometry_validation():
    TrackGeometry(500e-9, 100e-9, 1.2e-9)
    for bad in [(0, 1, 1), (1, -1, 1), (1, 1, 0), (np.inf, 1, 1)]:
        with pytest.raises(ValueError):
            TrackGeometry(*bad)


def test_cross_section():
    geom = TrackGeometry(500e-9, 50e-9, 1.2e-9)
    assert geom.cross_section == pytest.approx(6e-17)
