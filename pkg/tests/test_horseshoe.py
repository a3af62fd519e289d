import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linkedtwist import horseshoe as hs_mod
from linkedtwist.horseshoe import (
    NotInLambda, SymbolSequence, build_horseshoe, build_quadrilateral_M, clip_convex, clip_halfplane,
    eigenvalues_2x2, hyperbolic_splitting, itinerary, locate, periodic_point, polygon_area,
    polygon_contains, primitive_words, return_matrix, uniform_hyperbolicity_check, verify_conley_moser,
)
from linkedtwist.twist_maps import ToralLTM, jacobian

CFG = ToralLTM(j=2, k=3)
HS = build_horseshoe(CFG)
# vertices of M from the four line intersections, worked by hand
M_VERTICES = {(0.27, 0.37), (0.67, 0.27), (0.73, 0.63), (0.33, 0.73)}
# largest root of l^2 - 26 l + 1
LAMBDA_PLUS = 13.0 + 2.0 * math.sqrt(42.0)


def test_polygon_helpers():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    assert polygon_area(sq) == 1.0
    half = clip_halfplane(sq, 1.0, 1.0, 1.0)
    assert polygon_area(half) == pytest.approx(0.5)
    assert polygon_area(clip_convex(sq, sq + 0.5)) == pytest.approx(0.25)
    assert polygon_contains(sq, (0.5, 0.5)) and not polygon_contains(sq, (1.5, 0.5))


def test_quadrilateral_vertices():
    got = {tuple(round(float(c), 12) for c in v) for v in HS.M.vertices}
    assert got == M_VERTICES
    # shoelace formula on the hand-worked vertices
    assert HS.M.area == pytest.approx(0.15)


def test_return_matrix_and_eigenvalues():
    assert np.array_equal(return_matrix(CFG), [[1, 4], [6, 25]])
    sp = hyperbolic_splitting(CFG)
    assert abs(sp.lambda_plus - LAMBDA_PLUS) < 1e-13
    assert abs(sp.lambda_minus - 1 / LAMBDA_PLUS) < 1e-16
    for lam, v in ((sp.lambda_plus, sp.v_plus), (sp.lambda_minus, sp.v_minus)):
        assert np.allclose(sp.matrix @ v, lam * v, rtol=1e-13, atol=1e-13)


def test_cat_map_eigenvalues_allowed():
    sp = hyperbolic_splitting(ToralLTM.cat_map())
    assert sp.lambda_plus == pytest.approx((3 + math.sqrt(5)) / 2)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_eigenvalues_2x2_unit_determinant(a, b, c):
    # [[a, b], [c, d]] with d chosen so the determinant is one
    if abs(a) < 1e-3:
        return
    d = (1 + b * c) / a
    tr = a + d
    if tr * tr <= 4.0001:
        return
    big, small = eigenvalues_2x2([[a, b], [c, d]], det=1.0)
    assert abs(big * small - 1) < 1e-12
    assert abs(big + small - tr) < 1e-9 * abs(tr)


def test_conley_moser_conditions():
    cm = verify_conley_moser(HS.M, HS.strips, CFG)
    assert cm.all_pass
    assert HS.N == 2
    assert cm.nh == cm.nv == 0.5
    assert cm.measured_nh <= cm.nh and cm.measured_nv <= cm.nv
    assert 0 < cm.mv * cm.mh < 1


def test_larger_horseshoe():
    cfg = ToralLTM(j=3, k=3)
    hs = build_horseshoe(cfg)
    assert hs.N == 4
    assert verify_conley_moser(hs.M, hs.strips, cfg).all_pass


def test_config_checks():
    with pytest.raises(ValueError):
        build_quadrilateral_M(ToralLTM(j=1, k=1))


def test_symbol_sequences():
    s = SymbolSequence.cyclic((1, 2, 2), 2)
    assert [s.at(t) for t in range(-1, 4)] == [2, 1, 2, 2, 1]
    assert s.shift().at(0) == 2
    assert s.window(2, 5).symbols == (2, 1, 2)
    with pytest.raises(ValueError):
        SymbolSequence((3,), 2)
    with pytest.raises(IndexError):
        SymbolSequence((1, 2), 2).at(5)


def test_primitive_word_counts():
    # necklace counts of primitive binary words
    assert [len(primitive_words(2, p)) for p in range(1, 7)] == [2, 1, 2, 3, 6, 9]


words = st.lists(st.integers(1, 2), min_size=1, max_size=7).map(tuple)


@given(words)
def test_locate_then_itinerary_round_trip(word):
    cyl = locate(HS, SymbolSequence(word, 2))
    assert polygon_contains(cyl.polygon, cyl.center)
    assert itinerary(HS, cyl.center, len(word)).symbols == word


@given(st.lists(st.integers(1, 2), min_size=2, max_size=4).map(tuple))
def test_shift_conjugacy(word):
    cyl = locate(HS, SymbolSequence(word + word, 2, -len(word)))
    z = cyl.center
    it = itinerary(HS, z, len(word), backward=len(word) - 1)
    img = itinerary(HS, CFG.forward_point(z), len(word) - 1, backward=len(word))
    assert img.symbols == it.symbols and img.start == it.start - 1


def test_points_outside_lambda():
    with pytest.raises(NotInLambda):
        itinerary(HS, (0.1, 0.1), 3)


@pytest.mark.parametrize("word", [(1,), (2,), (1, 2), (1, 1, 2), (1, 2, 2, 2)])
def test_periodic_points(word):
    p = len(word)
    z = periodic_point(SymbolSequence.cyclic(word, 2), HS)
    assert np.linalg.norm(hs_mod._periodic_residual(CFG, z, p)) < 1e-9
    big, small = eigenvalues_2x2(jacobian(CFG, z, p).matrix)
    assert abs(big / LAMBDA_PLUS ** p - 1) < 1e-9
    assert abs(small * LAMBDA_PLUS ** p - 1) < 1e-9


def test_uniform_hyperbolicity():
    pts = [locate(HS, SymbolSequence(w, 2)).center for w in [(1, 2, 1), (2, 2, 1), (1, 1)]]
    rep = uniform_hyperbolicity_check(HS, pts)
    assert rep.holds and rep.points == 3
