import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from linkedtwist.semiconjugacy import (
    E_partials, SphereCap, embed_E, immersion_det, invert_E_on_chart, involution_J, involution_residuals,
    map_N, map_N_det, pushforward_preservation, semiconjugacy_residual,
)
from linkedtwist.special_functions import SPHERE_MODULUS, complete_elliptic_K
from linkedtwist.twist_maps import SphereLTM

K = complete_elliptic_K(SPHERE_MODULUS)
SPHERE = SphereLTM()
torus_coord = st.floats(-K, 3 * K, exclude_max=True)


@given(torus_coord, torus_coord)
def test_E_lands_on_unit_sphere(x, y):
    p = embed_E(x, y)
    assert abs(np.dot(p, p) - 1.0) < 1e-14


def test_E_at_reference_points():
    assert np.allclose(embed_E(0.0, 0.0), [0, 1, 0], atol=1e-16)
    assert np.allclose(embed_E(K, 0.0), [1, 0, 0], atol=1e-15)
    assert np.allclose(embed_E(0.0, K), [0, 0, 1], atol=1e-15)


@given(torus_coord, st.floats(-K + 1e-3, K - 1e-3))
def test_chart_C_inverts_E(x, y):
    p = embed_E(x, y)
    xc, yc = invert_E_on_chart(p, "C")
    assert abs(yc - y) < 1e-8
    assert np.linalg.norm(embed_E(xc, yc) - p) < 1e-12


@given(st.floats(-K + 1e-3, K - 1e-3), torus_coord)
def test_chart_C_prime_inverts_E(x, y):
    p = embed_E(x, y)
    xc, yc = invert_E_on_chart(p, "Cprime")
    assert abs(xc - x) < 1e-8
    assert np.linalg.norm(embed_E(xc, yc) - p) < 1e-12


def test_chart_errors():
    with pytest.raises(ValueError):
        invert_E_on_chart((1.0, 1.0, 0.0), "C")
    with pytest.raises(ValueError):
        invert_E_on_chart((1.0, 0.0, 0.0), "D")


@given(torus_coord, torus_coord)
def test_E_partials_match_differences(x, y):
    h = 1e-6
    ex, ey = E_partials(x, y)
    fx = (embed_E(x + h, y) - embed_E(x - h, y)) / (2 * h)
    fy = (embed_E(x, y + h) - embed_E(x, y - h)) / (2 * h)
    assert np.max(np.abs(ex - fx)) < 1e-8 and np.max(np.abs(ey - fy)) < 1e-8


@given(torus_coord, torus_coord)
def test_immersion_det_is_the_vw_minor(x, y):
    ex, ey = E_partials(x, y)
    assert abs(immersion_det(x, y) - (ex[1] * ey[2] - ex[2] * ey[1])) < 1e-14


@given(torus_coord, torus_coord)
def test_E_invariant_under_J(x, y):
    jx, jy = involution_J(x, y)
    assert np.linalg.norm(embed_E(jx, jy) - embed_E(x, y)) < 1e-13


def test_map_N():
    x0, y0 = 0.6, 0.9
    nx, ny = map_N(0.2, 0.3, x0, y0)
    assert (nx, ny) == pytest.approx((0.2, 0.2))
    assert map_N_det(x0, y0) == pytest.approx(-x0 / y0)


def test_semiconjugacy_and_involutions():
    res = semiconjugacy_residual(SPHERE, 5000, 0)
    assert res.max_residual < 1e-9
    inv = involution_residuals(SPHERE, 5000, 1)
    assert inv.e_of_j < 1e-10 and inv.j_of_f < 1e-10


def test_pushforward_preserved():
    rep = pushforward_preservation(SPHERE, SphereCap((0.3, 0.5, 0.8), 0.2), 40000, 2)
    assert rep.measure > 0 and rep.within_3sigma
