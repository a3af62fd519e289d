import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from linkedtwist.coordinates import (
    CLAIMED_BOUNDS, GridSpec, NewCoordPoint, coordinate_transform, cot_alpha, derivative_bound_scan,
    ergodic_condition_check, f_pm, f_pm_derivatives, newcoords_step, psi, psi_inverse, psi_inverse_partials,
    psi_partials, region_tag, tau,
)
from linkedtwist.twist_maps import PlanarLTM

CFG = PlanarLTM()
R0, R1 = CFG.r0, CFG.r1
radii = st.floats(R0, R1)
angles = st.floats(-math.pi, math.pi)


def distance_to_right_centre(r, theta):
    """|M+(r, theta) - (1, 0)| by the law of cosines."""
    return math.sqrt(r * r + 4.0 - 4.0 * r * math.cos(theta))


def test_tau_is_cosine_of_triangle_angle():
    # the 3-4-5 style check: sides 2, 2, 2 give an angle of pi/3
    assert tau(2.0, 2.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        tau(0.0, 1.0)


@given(radii, radii)
def test_psi_is_second_centre_distance_on_sigma(r, d):
    # the angle at (-1, 0) of the triangle with sides r, d and the centre separation 2
    theta = math.acos((r * r + 4.0 - d * d) / (4.0 * r))
    assert abs(distance_to_right_centre(r, theta) - d) < 1e-12
    assert abs(psi(r, theta, CFG) - d) < 1e-12


@given(radii, angles)
def test_psi_odd_and_inverse(r, theta):
    y = psi(r, theta, CFG)
    assert psi(r, -theta, CFG) == -y
    assert abs(psi_inverse(r, y, CFG) - theta) < 1e-9


@given(radii, st.floats(0.0, math.pi - 1e-3), st.floats(1e-4, 1e-2))
def test_psi_increasing_in_angle(r, theta, dt):
    dt = min(dt, math.pi - theta)
    assert psi(r, theta + dt, CFG) > psi(r, theta, CFG)


def test_psi_endpoints():
    for r in (R0, 2.3, R1):
        assert psi(r, 0.0, CFG) == 0.0
        assert abs(psi(r, math.pi, CFG) - math.pi) < 1e-12


def smooth_slope(f, a, h=1e-6):
    """Central difference of f at a, or None when the one-sided slopes disagree (a kink nearby)."""
    fwd, bwd = (f(a + h) - f(a)) / h, (f(a) - f(a - h)) / h
    if abs(fwd - bwd) > 1e-4 * max(1.0, abs(fwd)):
        return None
    return (f(a + h) - f(a - h)) / (2 * h)


def check_partials(func, partials, x, y):
    x = min(max(x, R0 + 1e-5), R1 - 1e-5)
    d1, d2 = partials(x, y)
    fd1 = smooth_slope(lambda s: func(s, y), x)
    fd2 = smooth_slope(lambda s: func(x, s), y)
    assume(fd1 is not None and fd2 is not None)
    assert abs(fd1 - d1) < 1e-5 * max(1, abs(d1)) and abs(fd2 - d2) < 1e-5 * max(1, abs(d2))


@given(radii, st.floats(-3.1, 3.1))
def test_psi_partials_match_differences(r, theta):
    check_partials(lambda a, b: psi(a, b, CFG), lambda a, b: psi_partials(a, b, CFG, side="below"), r, theta)


@given(radii, st.floats(-3.1, 3.1))
def test_psi_inverse_partials_match_differences(x, y):
    check_partials(lambda a, b: psi_inverse(a, b, CFG), lambda a, b: psi_inverse_partials(a, b, CFG, side="below"),
                   x, y)


@given(radii, st.floats(-3.0, 3.0), st.sampled_from([1, -1]))
def test_f_pm_derivatives_match_differences(x, y, sign):
    check_partials(lambda a, b: f_pm(a, b, sign, CFG),
                   lambda a, b: f_pm_derivatives(a, b, sign, CFG, side="below"), x, y)


def annulus_points():
    def make(args):
        plus, r, t = args
        c = -1.0 if plus else 1.0
        return np.array([c + r * math.cos(t), r * math.sin(t)])
    return st.tuples(st.booleans(), st.floats(R0 + 1e-6, R1 - 1e-6), st.floats(-3.1, 3.1)).map(make)


@given(annulus_points())
def test_coordinate_change_round_trip(p):
    back = coordinate_transform("fromNew", coordinate_transform("toNew", p, CFG), CFG)
    assert np.max(np.abs(back - p)) < 1e-9


@given(annulus_points())
def test_new_coordinates_conjugate_the_map(p):
    new = coordinate_transform("toNew", p, CFG)
    lhs = coordinate_transform("toNew", CFG.forward(p), CFG)
    rhs = newcoords_step(new, CFG)
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_sigma_points_are_centre_distances():
    p = np.array([0.0, 2.2])
    new = coordinate_transform("toNew", p, CFG)
    assert np.allclose(new, [math.hypot(1, 2.2), math.hypot(1, 2.2)])
    assert region_tag(*new, CFG) == "SigmaPlus"
    new = coordinate_transform("toNew", np.array([0.0, -2.2]), CFG)
    assert region_tag(*new, CFG) == "SigmaMinus"
    assert isinstance(newcoords_step(NewCoordPoint.make(*new, CFG), CFG), NewCoordPoint)


def test_coordinate_errors():
    with pytest.raises(ValueError):
        coordinate_transform("toNew", np.array([0.0, 0.0]), CFG)
    with pytest.raises(ValueError):
        coordinate_transform("sideways", np.array([0.0, 2.2]), CFG)
    with pytest.raises(ValueError):
        psi(1.0, 0.0, CFG)
    with pytest.raises(ValueError):
        GridSpec(n_r=50)


def test_cot_alpha_corner_value():
    assert cot_alpha(math.sqrt(7), math.sqrt(7)) == pytest.approx(5 * math.sqrt(6) / 12, abs=1e-15)
    assert cot_alpha(2.0, 2.0) == pytest.approx(1 / math.sqrt(3), abs=1e-15)


@pytest.mark.parametrize("quantity", sorted(CLAIMED_BOUNDS))
def test_coarse_bound_scan_passes(quantity):
    rep = derivative_bound_scan(quantity, CFG, GridSpec(100, 100, 1))
    assert rep.passed, rep.to_dict()


def test_ergodic_condition_at_reference_radii():
    rep = ergodic_condition_check(CFG, n=101, refine=2)
    assert rep.passed and rep.margin > 0
    assert rep.c == pytest.approx(2 * math.pi / (math.sqrt(7) - 2))
