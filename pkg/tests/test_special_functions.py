import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linkedtwist.special_functions import (
    SPHERE_MODULUS, amplitude, complete_elliptic_K, inverse_amplitude, jacobi_elliptic, sncndn,
)

# reference values frozen from a 40-digit mpmath evaluation at modulus sqrt(2)/2
K_SPHERE = 1.854074677301371918433850347195260046218
TRIPLES = {
    0.7: (0.6243400909662173762, 0.7811526424536342896, 0.8972734953213249271),
    1.3: (0.9204464742100178114, 0.3908686328094734899, 0.7592029663121539121),
    2.5: (0.8906151882260943559, -0.4547577228602044547, 0.7767897355465629868),
    -0.4: (-0.3846721958459388900, 0.9230532496790548838, 0.9622960307886195461),
    5.1: (-0.9452078679913398812, -0.3264691199597073697, 0.7438353602401763345),
}
F_OF_0_9 = 0.9609655219507334137801828753086254882862  # incomplete integral F(0.9 | 1/2)


def gauss_legendre_K(k, nodes=64):
    """Independent quarter-period by Gauss-Legendre quadrature of the defining integral."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.25 * math.pi * (x + 1.0)
    return 0.25 * math.pi * float(np.sum(w / np.sqrt(1.0 - (k * np.sin(t)) ** 2)))


def test_quarter_period_matches_frozen_value():
    assert abs(complete_elliptic_K(SPHERE_MODULUS) - K_SPHERE) < 1e-14


@pytest.mark.parametrize("k", [0.1, 0.3, SPHERE_MODULUS, 0.9])
def test_quarter_period_matches_quadrature(k):
    assert abs(complete_elliptic_K(k) - gauss_legendre_K(k)) < 1e-12


def test_other_moduli_frozen():
    assert abs(complete_elliptic_K(0.3) - 1.608048619930512801) < 1e-14
    assert abs(complete_elliptic_K(0.9) - 2.280549138422770205) < 1e-13


@pytest.mark.parametrize("t", sorted(TRIPLES))
def test_sn_cn_dn_against_frozen(t):
    sn, cn, dn = sncndn(t)
    ref = TRIPLES[t]
    assert max(abs(sn - ref[0]), abs(cn - ref[1]), abs(dn - ref[2])) < 1e-13


def test_vectorised_agrees_with_scalar():
    ts = np.array(sorted(TRIPLES))
    sn, cn, dn = sncndn(ts)
    for i, t in enumerate(ts):
        tri = jacobi_elliptic(t)
        assert (sn[i], cn[i], dn[i]) == (tri.sn, tri.cn, tri.dn)


def test_special_points():
    K = complete_elliptic_K(SPHERE_MODULUS)
    sn, cn, dn = sncndn(K)
    assert abs(sn - 1) < 1e-15 and abs(cn) < 1e-15 and abs(dn - math.sqrt(0.5)) < 1e-15
    assert sncndn(0.0) == (0.0, 1.0, 1.0)


def test_inverse_amplitude_frozen():
    assert abs(inverse_amplitude(0.9) - F_OF_0_9) < 1e-12


@pytest.mark.parametrize("k", [0.0, 1.0, -0.2, float("nan")])
def test_bad_modulus(k):
    with pytest.raises(ValueError):
        complete_elliptic_K(k)


def test_non_finite_argument():
    with pytest.raises(ValueError):
        sncndn(float("inf"))


@given(st.floats(-50, 50))
def test_pythagorean_identities(t):
    sn, cn, dn = sncndn(t)
    assert abs(sn * sn + cn * cn - 1) < 1e-13
    assert abs(dn * dn + 0.5 * sn * sn - 1) < 1e-13


@given(st.floats(-20, 20))
def test_period_and_half_period(t):
    K = complete_elliptic_K(SPHERE_MODULUS)
    a, b = np.array(sncndn(t)), np.array(sncndn(t + 4 * K))
    assert np.max(np.abs(a - b)) < 1e-12
    s2, c2, d2 = sncndn(2 * K - t)
    assert abs(s2 - a[0]) < 1e-12 and abs(c2 + a[1]) < 1e-12 and abs(d2 - a[2]) < 1e-12


@given(st.floats(-20, 20))
def test_derivative_of_sn_is_cn_dn(t):
    h = 1e-5
    d = (sncndn(t + h)[0] - sncndn(t - h)[0]) / (2 * h)
    _, cn, dn = sncndn(t)
    assert abs(d - cn * dn) < 1e-8


@given(st.floats(-9, 9))
def test_amplitude_round_trip(phi):
    t = inverse_amplitude(phi)
    assert abs(amplitude(t) - phi) < 1e-12


@given(st.floats(-10, 10), st.floats(0.01, 3))
def test_amplitude_monotone(t, dt):
    assert amplitude(t + dt) > amplitude(t)
