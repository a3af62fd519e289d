import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from linkedtwist.hyperbolicity import (
    FirstReturn, Intersection, NotReturned, TangentCone, cone_check, curve_growth, expansion_holds_exactly,
    first_return, lyapunov_estimate, manifold_intersection_demo, pq_m_sequences, return_frequency,
    return_jacobian, return_matrix, singular_neighborhood_measure, stable_direction_estimate,
    unstable_direction_estimate,
)
from linkedtwist.twist_maps import GeneralizedToralLTM, PlanarLTM, ToralLTM

CAT = ToralLTM.cat_map()
HS = ToralLTM(j=2, k=3)
FOUR = GeneralizedToralLTM()
PLANAR = PlanarLTM()
GOLDEN = (1 + math.sqrt(5)) / 2


def s_points(system):
    # points of S, kept a little away from its edges
    def make(args):
        (lo_x, hi_x), (lo_y, hi_y) = system.q_bands[args[0]], system.p_bands[args[1]]
        return (lo_x + (0.01 + 0.98 * args[2]) * (hi_x - lo_x), lo_y + (0.01 + 0.98 * args[3]) * (hi_y - lo_y))
    nq, np_ = len(system.q_bands), len(system.p_bands)
    return st.tuples(st.integers(0, nq - 1), st.integers(0, np_ - 1), st.floats(0, 1), st.floats(0, 1)).map(make)


def test_cone_classification():
    c = TangentCone.positive()
    assert c.classify((1, 2)) == "inside"
    assert c.classify((1, -2)) == "outside"
    assert c.classify((1, 0)) == "boundary"
    assert TangentCone.negative().classify((1, -2)) == "inside"
    u = TangentCone.planar_U(4.0)
    assert u.classify((0, 1)) == "inside"
    assert u.classify((1, -3)) == "outside"
    assert u.classify((1, -2)) == "boundary"
    with pytest.raises(ValueError):
        c.classify((0, 0))


@given(s_points(FOUR))
def test_pq_m_bookkeeping_and_return_matrix(p):
    rec = pq_m_sequences(FOUR, p, 3)
    assume(rec.complete)
    total = 0
    for pi, qi, mi in zip(rec.p, rec.q, rec.m):
        total += pi + qi - 1
        assert mi == total
    ret = first_return(FOUR, p)
    assert isinstance(ret, FirstReturn) and ret.return_iterates == rec.m[0]
    assert np.allclose(ret.image, rec.points[0], atol=1e-12)
    try:
        mat, _ = return_jacobian(FOUR, p)
    except ValueError:
        assume(False)
    assert np.allclose(mat, return_matrix(FOUR, p, rec), rtol=1e-12)


@given(s_points(FOUR), st.floats(0.0, math.pi / 2))
def test_return_expansion_in_cone(p, angle):
    try:
        mat, rec = return_jacobian(FOUR, p)
    except ValueError:
        assume(False)
    kappa = min(rec.p[0] * FOUR.alpha, rec.q[0] * FOUR.beta)
    assert expansion_holds_exactly(mat, (math.cos(angle), math.sin(angle)), kappa)


def test_expansion_exactness_detects_failure():
    assert not expansion_holds_exactly(np.eye(2), (1.0, 0.0), 0.5)
    assert expansion_holds_exactly(np.array([[1.0, 1.0], [1.0, 2.0]]), (1.0, 0.0), 1.0)


def test_first_return_errors_and_cap():
    with pytest.raises(ValueError):
        first_return(HS, (0.1, 0.5))
    with pytest.raises(ValueError):
        first_return(HS, (0.5, 0.5), cap=0)
    # the corner point (x0, y0) is fixed
    assert isinstance(first_return(HS, (0.25, 0.25), cap=5), FirstReturn)


def test_first_return_not_returned():
    assert first_return(HS, (0.3, 0.5)).return_iterates == 3
    assert first_return(HS, (0.3, 0.5), cap=2) == NotReturned((0.3, 0.5), 2)


@pytest.mark.parametrize("mode", ["singleStep", "returnStep"])
@given(p=s_points(HS))
def test_toral_cone_invariance(mode, p):
    try:
        chk = cone_check(HS, p, TangentCone.positive(), mode)
    except ValueError:
        assume(False)
    assert chk.verdict and chk.expansion_factor >= 1.0
    if mode == "returnStep":
        assert chk.expansion_factor >= chk.kappa_bound * (1 - 1e-12) > 1.0


def test_planar_cone_invariance_on_sigma():
    rng = np.random.default_rng(5)
    pts = PLANAR.sample_uniform(rng, 4000)
    pts = pts[PLANAR.in_sigma(pts)][:50]
    cone = TangentCone.planar_U(PLANAR.c)
    checked = 0
    for p in pts:
        try:
            chk = cone_check(PLANAR, p, cone, "returnStep")
        except ValueError:
            continue
        checked += 1
        assert chk.verdict
    assert checked > 40


def test_cat_lyapunov_and_directions():
    est = lyapunov_estimate(CAT, (0.1234, 0.5678), (1.0, 0.3), 20000)
    chi = math.log(GOLDEN ** 2)
    assert abs(est.chi_plus - chi) < 1e-3
    assert abs(est.chi_minus + chi) < 1e-3
    u = unstable_direction_estimate(CAT, (0.1234, 0.5678), 40)
    target = np.array([1.0, GOLDEN]) / math.hypot(1.0, GOLDEN)
    assert u.in_cone and np.allclose(u.direction, target, atol=1e-12)
    s = stable_direction_estimate(CAT, (0.1234, 0.5678), 40)
    assert s.in_cone and abs(np.dot(s.direction, target)) < 1e-12


def test_lyapunov_needs_enough_iterations():
    with pytest.raises(ValueError):
        lyapunov_estimate(CAT, (0.1, 0.2), (1, 0), 10)


def test_return_frequency_positive():
    f = return_frequency(HS, (0.4, 0.6), 20000)
    assert 0 < f.delta <= 1 and f.window_spread < 0.05


def test_curve_growth_cat_map():
    g = curve_growth(CAT, [(0.2, 0.2), (0.2 + 1e-3, 0.2 + GOLDEN * 1e-3)], 4)
    for a, b in zip(g.lengths, g.lengths[1:]):
        assert b / a == pytest.approx(GOLDEN ** 2, rel=1e-6)


def test_manifold_intersection_found_on_cat_map():
    res = manifold_intersection_demo(CAT, (0.3, 0.3), (0.6, 0.7))
    assert isinstance(res, Intersection)


def test_singular_measure_fit_on_toral_map():
    fit = singular_neighborhood_measure(HS, [1e-4, 1e-3, 1e-2], samples=200000, seed_or_rng=3)
    assert abs(fit.exponent - 1.0) < 0.1
    with pytest.raises(ValueError):
        singular_neighborhood_measure(HS, [1e-3, 2e-3, 3e-3])


def test_cat_map_returns_every_step():
    rec = pq_m_sequences(CAT, (0.3, 0.6), 5)
    assert rec.p == rec.q == [1] * 5 and rec.m == [1, 2, 3, 4, 5]
    assert return_frequency(CAT, (0.3, 0.6), 100).delta == 1.0


@given(s_points(FOUR))
def test_return_equals_twist_composition(p):
    rec = pq_m_sequences(FOUR, p, 1)
    assume(rec.complete)
    x, y = p
    for _ in range(rec.p[0]):
        x, y = FOUR.F_point(x, y)
    for _ in range(rec.q[0]):
        x, y = FOUR.G_point(x, y)
    z = p
    for _ in range(rec.m[0]):
        z = FOUR.forward_point(z)
    L = FOUR.period
    assert max(abs((a - b + L / 2) % L - L / 2) for a, b in zip(z, (x, y))) < 1e-10


def test_return_matrix_worked_example():
    # p1 = q1 = 1 and alpha = beta = 2 give [[1, 2], [2, 5]], which sends (1, 1) to (3, 7)
    mat = np.array([[1.0, 2.0], [2.0, 5.0]])
    assert np.array_equal(mat @ np.array([1.0, 1.0]), [3.0, 7.0])
    assert math.sqrt(58 / 2) >= math.sqrt(5)
    assert expansion_holds_exactly(mat, (1.0, 1.0), 2.0)


def test_exponents_sum_to_zero():
    est = lyapunov_estimate(HS, (0.4, 0.6), (1.0, 1.0), 100_000)
    assert abs(est.chi_plus + est.chi_minus) < 5e-3
