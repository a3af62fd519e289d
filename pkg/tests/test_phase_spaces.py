import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linkedtwist.phase_spaces import (
    CircleCoord, SpherePoint, TorusPoint, circle_distance, classify_region, in_arc, polar_embed,
    wrap_scalar, wrap_value,
)
from linkedtwist.twist_maps import GeneralizedToralLTM, PlanarLTM, ToralLTM

reals = st.floats(-1e6, 1e6)


@given(reals, st.floats(0.1, 10), st.floats(-5, 5))
def test_wrap_lands_in_fundamental_domain(v, period, origin):
    w = wrap_value(v, period, origin)
    assert origin <= w < origin + period
    assert circle_distance(w, v, period) <= 1e-9 * max(1.0, abs(v))


@given(reals, st.floats(0.1, 10), st.floats(-5, 5))
def test_scalar_and_array_wrap_agree(v, period, origin):
    assert wrap_scalar(v, period, origin) == wrap_value(v, period, origin)


def test_tiny_negative_wraps_to_origin():
    w = wrap_value(-1e-300, 1.0)
    assert 0.0 <= w < 1.0


def test_wrap_rejects_non_finite_and_bad_period():
    with pytest.raises(ValueError):
        wrap_value(float("nan"), 1.0)
    with pytest.raises(ValueError):
        wrap_value(0.3, 0.0)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_circle_distance_symmetric_and_bounded(a, b):
    d = circle_distance(a, b, 1.0)
    assert abs(d - circle_distance(b, a, 1.0)) < 1e-12
    assert 0.0 <= d <= 0.5


def test_in_arc_wraps_across_origin():
    assert in_arc(0.95, 0.9, 1.1, 1.0)
    assert in_arc(0.05, 0.9, 1.1, 1.0)
    assert not in_arc(0.5, 0.9, 1.1, 1.0)


def test_point_types():
    p = TorusPoint.make(1.25, -0.25)
    assert np.allclose(p.as_array(), [0.25, 0.75])
    assert CircleCoord(7.5, 2.0).value == 1.5
    with pytest.raises(ValueError):
        SpherePoint(1.0, 1.0, 0.0)


@given(st.floats(0.01, 5), st.floats(-math.pi + 1e-9, math.pi), st.sampled_from([1, -1]))
def test_polar_chart_round_trip(r, t, sign):
    cart = polar_embed("forward", sign, (r, t))
    back = polar_embed("inverse", sign, cart)
    assert abs(back[0] - r) < 1e-12
    assert circle_distance(back[1], t, 2 * math.pi) < 1e-11 / r


def test_polar_chart_errors():
    with pytest.raises(ValueError):
        polar_embed("inverse", 1, (-1.0, 0.0))
    with pytest.raises(ValueError):
        polar_embed("sideways", 1, (1.0, 0.0))
    with pytest.raises(ValueError):
        polar_embed("forward", 0, (1.0, 0.0))


def test_toral_regions():
    sys = ToralLTM()
    f = classify_region(sys, (0.5, 0.5))
    assert f.in_P and f.in_Q and f.in_S and not f.on_boundary
    f = classify_region(sys, (0.1, 0.5))
    assert f.in_P and not f.in_Q and not f.in_S
    assert classify_region(sys, (0.25, 0.5)).on_boundary


def test_four_annulus_regions():
    sys = GeneralizedToralLTM()
    f = classify_region(sys, (2 * sys.K, 0.0))
    assert f.in_P0 and f.in_Q1 and f.s_index == (0, 1)


def test_planar_regions():
    sys = PlanarLTM()
    f = classify_region(sys, (0.0, 2.2))
    assert f.in_A_plus and f.in_A_minus and f.in_sigma_plus and not f.in_sigma_minus
    f = classify_region(sys, (-3.3, 0.0))
    assert f.in_A_plus and not f.in_A_minus
