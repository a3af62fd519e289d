"""Two-centre coordinates (x, y) on the planar annulus pair, the map in those
coordinates, the partial derivatives of the coordinate change and numerical
certification of their bounds.

Throughout, ``config`` is a :class:`~linkedtwist.twist_maps.PlanarLTM`.  On the
overlap Sigma+ the coordinates are the distances to (-1, 0) and (1, 0); on
Sigma- the second coordinate is negated (the "R-representation").
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .phase_spaces import polar_embed, wrap_value

PIECES = ("inside", "sigma", "outside")
_EDGE_TOL = 1e-12
SCAN_SLACK = 1e-9


def tau(r, t):
    """(r^2 - t^2 + 4) / (4r): the cosine of the angle at (-1, 0) in the triangle
    with sides r, t and the centre separation 2."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("tau needs r > 0")
    out = (r * r - np.asarray(t, dtype=float) ** 2 + 4.0) / (4.0 * r)
    return float(out) if out.ndim == 0 else out


def _tau_r(r, t):
    """Partial derivative of tau in its first argument."""
    return 0.5 - tau(r, t) / r


def _check_radius(r, config, name="r"):
    r = np.asarray(r, dtype=float)
    if np.any(r < config.r0 - _EDGE_TOL) or np.any(r > config.r1 + _EDGE_TOL):
        raise ValueError(f"{name} outside [r0, r1]")
    return np.clip(r, config.r0, config.r1)


def breakpoints(r, config):
    """Angles acos(tau(r, r0)) <= acos(tau(r, r1)) separating the three pieces of psi."""
    r = np.asarray(r, dtype=float)
    return np.arccos(np.clip(tau(r, config.r0), -1, 1)), np.arccos(np.clip(tau(r, config.r1), -1, 1))


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


# --------------------------------------------------------------------------
# psi and its inverse, piece by piece on the upper half


def _psi_piece(piece: str, r, th, config):
    a, b = breakpoints(r, config)
    if piece == "inside":
        return config.r0 * th / a
    if piece == "sigma":
        return np.sqrt(np.maximum(r * r - 4.0 * r * np.cos(th) + 4.0, 0.0))
    return config.r1 + (th - b) / (math.pi - b) * (math.pi - config.r1)


def _psi_inv_piece(piece: str, x, y, config):
    a, b = breakpoints(x, config)
    if piece == "inside":
        return y * a / config.r0
    if piece == "sigma":
        return np.arccos(np.clip(tau(x, y), -1.0, 1.0))
    return b + (y - config.r1) / (math.pi - config.r1) * (math.pi - b)


def _psi_partials_piece(piece: str, r, th, config):
    if piece == "inside":
        T = tau(r, config.r0)
        a = np.arccos(T)
        return config.r0 * th * _tau_r(r, config.r0) / (a * a * np.sqrt(1.0 - T * T)), config.r0 / a + 0.0 * th
    if piece == "sigma":
        p = np.sqrt(r * r - 4.0 * r * np.cos(th) + 4.0)
        return (r - 2.0 * np.cos(th)) / p, 2.0 * r * np.sin(th) / p
    T = tau(r, config.r1)
    b = np.arccos(T)
    span = math.pi - config.r1
    d1 = span * _tau_r(r, config.r1) * (math.pi - th) / ((math.pi - b) ** 2 * np.sqrt(1.0 - T * T))
    return d1, span / (math.pi - b) + 0.0 * th


def _psi_inv_partials_piece(piece: str, x, y, config):
    if piece == "inside":
        T = tau(x, config.r0)
        return y * (T / x - 0.5) / (config.r0 * np.sqrt(1.0 - T * T)), np.arccos(T) / config.r0 + 0.0 * y
    if piece == "sigma":
        T = tau(x, y)
        root = np.sqrt(1.0 - T * T)
        return (T / x - 0.5) / root, y / (2.0 * x * root)
    T = tau(x, config.r1)
    span = math.pi - config.r1
    d1 = (0.5 - T / x) * (y - math.pi) / (span * np.sqrt(1.0 - T * T))
    return d1, (math.pi - np.arccos(T)) / span + 0.0 * y


def _piece_of_angle(r, ath, config, side: Optional[str]):
    """Piece index (0, 1, 2) of |theta|; on a breakpoint, ``side`` picks below/above or raises."""
    a, b = breakpoints(r, config)
    idx = np.where(ath < a, 0, np.where(ath <= b, 1, 2))
    on_edge = (np.abs(ath - a) <= _EDGE_TOL) | (np.abs(ath - b) <= _EDGE_TOL)
    return _resolve_edges(idx, on_edge, ath, a, side)


def _piece_of_value(ay, config, side: Optional[str]):
    r0, r1 = config.r0, config.r1
    idx = np.where(ay < r0, 0, np.where(ay <= r1, 1, 2))
    on_edge = (np.abs(ay - r0) <= _EDGE_TOL) | (np.abs(ay - r1) <= _EDGE_TOL)
    return _resolve_edges(idx, on_edge, ay, r0, side)


def _resolve_edges(idx, on_edge, val, first_edge, side):
    if not np.any(on_edge):
        return idx
    if side is None:
        raise ValueError("derivative requested on a piece boundary; pass side='below' or 'above'")
    if side not in ("below", "above"):
        raise ValueError("side must be 'below' or 'above'")
    near_first = np.abs(val - first_edge) <= _EDGE_TOL
    below = np.where(near_first, 0, 1)
    return np.where(on_edge, below if side == "below" else below + 1, idx)


def _by_piece(func, idx, u, v, config):
    outs = None
    for k, piece in enumerate(PIECES):
        vals = func(piece, u, v, config)
        if not isinstance(vals, tuple):
            vals = (vals,)
        vals = tuple(np.broadcast_to(np.asarray(w, dtype=float), np.shape(idx)) for w in vals)
        if outs is None:
            outs = [np.zeros(np.shape(idx)) for _ in vals]
        for o, w in zip(outs, vals):
            np.copyto(o, w, where=(idx == k))
    return outs


def psi(r, theta, config):
    """Second new coordinate of the polar point (r, theta) about (-1, 0); odd in theta."""
    r = _check_radius(r, config)
    th = np.asarray(theta, dtype=float)
    if np.any(np.abs(th) > math.pi + _EDGE_TOL):
        raise ValueError("theta outside [-pi, pi]")
    ath = np.minimum(np.abs(th), math.pi)
    r, ath = np.broadcast_arrays(r, ath)
    idx = _piece_of_angle(r, ath, config, "below")
    with np.errstate(invalid="ignore", divide="ignore"):
        (val,) = _by_piece(_psi_piece, idx, r, ath, config)
    return _out(np.sign(th) * val)


def psi_inverse(x, y, config):
    """The angle theta with psi(x, theta) = y; odd in y."""
    x = _check_radius(x, config, "x")
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) > math.pi + _EDGE_TOL):
        raise ValueError("y outside [-pi, pi]")
    ay = np.minimum(np.abs(y), math.pi)
    x, ay = np.broadcast_arrays(x, ay)
    idx = _piece_of_value(ay, config, "below")
    with np.errstate(invalid="ignore", divide="ignore"):
        (val,) = _by_piece(_psi_inv_piece, idx, x, ay, config)
    return _out(np.sign(y) * val)


def psi_partials(r, theta, config, side: Optional[str] = None):
    """(d psi/dr, d psi/dtheta).  The first is odd in theta, the second even."""
    r = _check_radius(r, config)
    th = np.asarray(theta, dtype=float)
    r, th = np.broadcast_arrays(r, th)
    ath = np.abs(th)
    idx = _piece_of_angle(r, ath, config, side)
    with np.errstate(invalid="ignore", divide="ignore"):
        d1, d2 = _by_piece(_psi_partials_piece, idx, r, ath, config)
    return _out(np.where(th < 0, -d1, d1)), _out(d2)


def psi_inverse_partials(x, y, config, side: Optional[str] = None):
    """(d psi^{-1}/dx, d psi^{-1}/dy); odd and even in y respectively."""
    x = _check_radius(x, config, "x")
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    ay = np.abs(y)
    idx = _piece_of_value(ay, config, side)
    with np.errstate(invalid="ignore", divide="ignore"):
        d1, d2 = _by_piece(_psi_inv_partials_piece, idx, x, ay, config)
    return _out(np.where(y < 0, -d1, d1)), _out(d2)


# --------------------------------------------------------------------------
# the coordinate change on all of A


REGION_TAGS = ("SigmaPlus", "SigmaMinus", "InsideOther", "OutsideOther", "AminusOnly")


def _in_band(v, config, eps=1e-12):
    return (v >= config.r0 - eps) & (v <= config.r1 + eps)


def region_tag(x: float, y: float, config) -> str:
    if _in_band(x, config):
        if _in_band(y, config):
            return "SigmaPlus"
        if _in_band(-y, config):
            return "SigmaMinus"
        return "InsideOther" if abs(y) < config.r0 else "OutsideOther"
    return "AminusOnly"


@dataclass(frozen=True)
class NewCoordPoint:
    x: float
    y: float
    region: str = field(default="", compare=False)

    @classmethod
    def make(cls, x: float, y: float, config) -> "NewCoordPoint":
        return cls(float(x), float(y), region_tag(float(x), float(y), config))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def iota(p):
    p = np.asarray(p, dtype=float)
    return np.stack([p[..., 1], -p[..., 0]], axis=-1)


def iota_inv(p):
    p = np.asarray(p, dtype=float)
    return np.stack([-p[..., 1], p[..., 0]], axis=-1)


def coordinate_transform(direction: str, point, config):
    """Cartesian (u, v) on A to new coordinates (x, y), or back.

    A+ points use Psi o M+^{-1}; points of A- outside A+ use
    iota^{-1} o Psi o M-^{-1}.  Every Sigma- point is stored with y negative.
    """
    p = np.asarray(point, dtype=float)
    if direction == "toNew":
        rp = np.hypot(p[..., 0] + 1.0, p[..., 1])
        rm = np.hypot(p[..., 0] - 1.0, p[..., 1])
        in_plus = _in_band(rp, config, 1e-12)
        in_minus = _in_band(rm, config, 1e-12)
        if not np.all(in_plus | in_minus):
            raise ValueError("point outside A")
        polar_p = polar_embed("inverse", +1, p)
        polar_m = polar_embed("inverse", -1, p)
        rpc = np.clip(polar_p[..., 0], config.r0, config.r1)
        rmc = np.clip(polar_m[..., 0], config.r0, config.r1)
        new_p = np.stack([rpc, psi(rpc, polar_p[..., 1], config) + 0.0 * rpc], axis=-1)
        new_m = iota_inv(np.stack([rmc, psi(rmc, polar_m[..., 1], config) + 0.0 * rmc], axis=-1))
        return np.where(np.asarray(in_plus)[..., None], new_p, new_m)
    if direction == "fromNew":
        x, y = p[..., 0], p[..., 1]
        plus = _in_band(x, config)
        minus_ok = _in_band(y, config)
        if not np.all(plus | minus_ok):
            raise ValueError("point is not in the R-representation of A")
        xc = np.clip(x, config.r0, config.r1)
        yc = np.clip(y, config.r0, config.r1)
        th_p = psi_inverse(xc, np.clip(y, -math.pi, math.pi), config)
        th_m = psi_inverse(yc, np.clip(-x, -math.pi, math.pi), config)
        cart_p = polar_embed("forward", +1, np.stack(np.broadcast_arrays(xc, th_p), axis=-1))
        cart_m = polar_embed("forward", -1, np.stack(np.broadcast_arrays(yc, th_m), axis=-1))
        return np.where(np.asarray(plus)[..., None], cart_p, cart_m)
    raise ValueError("direction must be 'toNew' or 'fromNew'")


# --------------------------------------------------------------------------
# the map in new coordinates


def _twist_new(p, config, sign: float):
    """Psi o Lambda^{+-1} o Psi^{-1} acting on points whose first coordinate lies in [r0, r1]."""
    x, y = p[..., 0], p[..., 1]
    active = _in_band(x, config)
    xc = np.clip(x, config.r0, config.r1)
    yc = np.clip(y, -math.pi, math.pi)
    th = psi_inverse(xc, yc, config) + sign * config.c * (xc - config.r0)
    th = wrap_value(th, 2.0 * math.pi, -math.pi)
    ynew = psi(xc, th, config)
    return np.stack([x, np.where(active, ynew, y)], axis=-1)


def _omega(p, config):
    in_rr_minus = _in_band(p[..., 0], config) & _in_band(-p[..., 1], config)
    return np.where(np.asarray(in_rr_minus)[..., None], iota_inv(p), iota(p))


def _omega_inv(p, config):
    in_rr = _in_band(p[..., 0], config) & _in_band(p[..., 1], config)
    return np.where(np.asarray(in_rr)[..., None], iota(p), iota_inv(p))


def newcoords_step(point, config):
    """H = Omega^{-1} o F^{-1} o Omega o F with F = Psi o Lambda o Psi^{-1}."""
    single = isinstance(point, NewCoordPoint)
    p = point.as_array() if single else np.asarray(point, dtype=float)
    x, y = p[..., 0], p[..., 1]
    if not np.all(_in_band(x, config) | _in_band(y, config)):
        raise ValueError("point is not in the R-representation of A")
    q = _twist_new(p, config, +1.0)
    q = _omega(q, config)
    q = _twist_new(q, config, -1.0)
    q = _omega_inv(q, config)
    if single:
        return NewCoordPoint.make(q[0], q[1], config)
    return q


def f_pm(x, y, sign: int, config):
    """f+-(x, y) = psi(x, psi^{-1}(x, y) +- c (x - r0)), the second component of F^{+-1}."""
    th = psi_inverse(x, y, config) + sign * config.c * (np.asarray(x, dtype=float) - config.r0)
    return psi(x, wrap_value(th, 2.0 * math.pi, -math.pi), config)


def f_pm_derivatives(x, y, sign: int, config, side: Optional[str] = None):
    """(D1 f+-, D2 f+-) from the chain rule through psi and psi^{-1}.

    D1 f = D1 psi(x, t) + D2 psi(x, t) (D1 psi^{-1}(x, y) +- c) and
    D2 f = D2 psi(x, t) D2 psi^{-1}(x, y), with t = psi^{-1}(x, y) +- c (x - r0).
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    x = np.asarray(x, dtype=float)
    g1, g2 = psi_inverse_partials(x, y, config, side)
    t = psi_inverse(x, y, config) + sign * config.c * (x - config.r0)
    t = wrap_value(t, 2.0 * math.pi, -math.pi)
    p1, p2 = psi_partials(x, t, config, side)
    return _out(p1 + p2 * (g1 + sign * config.c)), _out(p2 * g2)


def _twist_jacobian(p, config, sign):
    if not _in_band(p[0], config):
        return np.eye(2)
    d1, d2 = f_pm_derivatives(p[0], p[1], sign, config, side="below")
    return np.array([[1.0, 0.0], [d1, d2]])


_IOTA = np.array([[0.0, 1.0], [-1.0, 0.0]])
_IOTA_INV = np.array([[0.0, -1.0], [1.0, 0.0]])


def newcoords_jacobian(point, config) -> np.ndarray:
    """Chain-rule differential of :func:`newcoords_step` at one point."""
    p = np.asarray(point, dtype=float)
    j = _twist_jacobian(p, config, +1)
    q = _twist_new(p, config, +1.0)
    rr_minus = bool(_in_band(q[0], config) & _in_band(-q[1], config))
    j = (_IOTA_INV if rr_minus else _IOTA) @ j
    q = _omega(q, config)
    j = _twist_jacobian(q, config, -1) @ j
    q = _twist_new(q, config, -1.0)
    rr = bool(_in_band(q[0], config) & _in_band(q[1], config))
    return (_IOTA if rr else _IOTA_INV) @ j


# --------------------------------------------------------------------------
# bound certification


CLAIMED_BOUNDS = {
    # name: (lo, hi, lo_closed, hi_closed)
    "D1psi": (0.0, 7.0 / 6.0, True, False),
    "D2psi": (0.25, math.sqrt(7.0), True, True),
    "D1psiInv": (-9.0 / 11.0, 0.0, True, True),
    "D2psiInv": (math.sqrt(7.0) / 7.0, 4.0, True, True),
    "D1fPlus": (0.0, math.inf, False, False),
    "D1fMinus": (-math.inf, 0.0, False, False),
    "D2fPlus": (0.0, math.inf, False, False),
    "D2fMinus": (0.0, math.inf, False, False),
}


@dataclass(frozen=True)
class GridSpec:
    n_r: int = 400
    n_t: int = 400
    refine: int = 3
    zoom_points: int = 41

    def __post_init__(self):
        if self.n_r < 100 or self.n_t < 100:
            raise ValueError("scan grids need at least 100 x 100 points per piece")


@dataclass(frozen=True)
class BoundScanReport:
    quantity: str
    claimed_lo: float
    claimed_hi: float
    lo_closed: bool
    hi_closed: bool
    observed_min: float
    observed_max: float
    argmin: tuple
    argmax: tuple
    worst_margin: float
    worst_location: tuple
    grid: tuple
    refinement_depth: int
    per_piece: dict
    passed: bool

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "claimed": [self.claimed_lo, self.claimed_hi],
            "closed": [self.lo_closed, self.hi_closed],
            "observed": [self.observed_min, self.observed_max],
            "argmin": list(self.argmin),
            "argmax": list(self.argmax),
            "worst_margin": self.worst_margin,
            "worst_location": list(self.worst_location),
            "grid": list(self.grid),
            "refinement_depth": self.refinement_depth,
            "per_piece": {k: list(v) for k, v in self.per_piece.items()},
            "passed": self.passed,
            "method": "grid sampling with local refinement",
        }


def _piece_domains(quantity: str, config):
    """(name, sampler) pairs; a sampler maps unit-square coordinates (s, t) to a point."""
    r0, r1 = config.r0, config.r1
    rng_r = lambda s: r0 + s * (r1 - r0)
    if quantity in ("D1psi", "D2psi"):
        def make(k):
            def sample(s, t):
                r = rng_r(s)
                a, b = breakpoints(r, config)
                lo, hi = [(0.0 * a, a), (a, b), (b, math.pi + 0.0 * b)][k]
                return r, lo + t * (hi - lo)
            return sample
        return [(PIECES[k], make(k)) for k in range(3)]
    if quantity in ("D1psiInv", "D2psiInv"):
        bounds = [(0.0, r0), (r0, r1), (r1, math.pi)]
        return [(PIECES[k], (lambda s, t, lo=lo, hi=hi: (rng_r(s), lo + t * (hi - lo))))
                for k, (lo, hi) in enumerate(bounds)]
    bounds = [(-math.pi, -r1), (-r1, -r0), (-r0, 0.0), (0.0, r0), (r0, r1), (r1, math.pi)]
    names = ["outside-", "sigma-", "inside-", "inside+", "sigma+", "outside+"]
    return [(names[k], (lambda s, t, lo=lo, hi=hi: (rng_r(s), lo + t * (hi - lo))))
            for k, (lo, hi) in enumerate(bounds)]


def _evaluate(quantity: str, piece: str, u, v, config):
    with np.errstate(invalid="ignore", divide="ignore"):
        if quantity in ("D1psi", "D2psi"):
            d = _psi_partials_piece(piece, u, v, config)
            return d[0] if quantity == "D1psi" else d[1]
        if quantity in ("D1psiInv", "D2psiInv"):
            d = _psi_inv_partials_piece(piece, u, v, config)
            return d[0] if quantity == "D1psiInv" else d[1]
        sign = +1 if "Plus" in quantity else -1
        base = piece.rstrip("+-")
        neg = piece.endswith("-")
        g1, g2 = _psi_inv_partials_piece(base, u, np.abs(v), config)
        g1 = np.where(neg, -g1, g1)
        th = wrap_value(psi_inverse(u, v, config) + sign * config.c * (u - config.r0), 2 * math.pi, -math.pi)
        p1, p2 = psi_partials(u, th, config, side="below")
        if quantity.startswith("D1"):
            return p1 + p2 * (g1 + sign * config.c)
        return p2 * g2


def derivative_bound_scan(quantity: str, config, grid: GridSpec = GridSpec()) -> BoundScanReport:
    """Sample a derivative on a grid over each smoothness piece, zoom in around the
    extreme values ``grid.refine`` times, and compare with the claimed interval."""
    if quantity not in CLAIMED_BOUNDS:
        raise ValueError(f"unknown quantity {quantity!r}")
    lo, hi, lo_closed, hi_closed = CLAIMED_BOUNDS[quantity]
    per_piece = {}
    gmin, gmax = (math.inf, None), (-math.inf, None)
    for name, sample in _piece_domains(quantity, config):
        s, t = np.meshgrid(np.linspace(0, 1, grid.n_r), np.linspace(0, 1, grid.n_t), indexing="ij")
        vals = _evaluate(quantity, name, *sample(s, t), config)
        best = {}
        for mode in ("min", "max"):
            pick = np.nanargmin if mode == "min" else np.nanargmax
            i = np.unravel_index(pick(vals), vals.shape)
            cs, ct = s[i], t[i]
            val = vals[i]
            hs, ht = 2.0 / (grid.n_r - 1), 2.0 / (grid.n_t - 1)
            for _ in range(grid.refine):
                zs = np.clip(np.linspace(cs - hs, cs + hs, grid.zoom_points), 0, 1)
                zt = np.clip(np.linspace(ct - ht, ct + ht, grid.zoom_points), 0, 1)
                S, T = np.meshgrid(zs, zt, indexing="ij")
                zv = _evaluate(quantity, name, *sample(S, T), config)
                j = np.unravel_index(pick(zv), zv.shape)
                if (zv[j] < val) if mode == "min" else (zv[j] > val):
                    val, cs, ct = zv[j], S[j], T[j]
                hs, ht = hs * 4.0 / (grid.zoom_points - 1), ht * 4.0 / (grid.zoom_points - 1)
            loc = tuple(float(c) for c in sample(np.float64(cs), np.float64(ct)))
            best[mode] = (float(val), loc)
        per_piece[name] = (best["min"][0], best["max"][0])
        if best["min"][0] < gmin[0]:
            gmin = best["min"]
        if best["max"][0] > gmax[0]:
            gmax = best["max"]
    ok_lo = gmin[0] >= lo - SCAN_SLACK if lo_closed else gmin[0] > lo
    ok_hi = gmax[0] <= hi + SCAN_SLACK if hi_closed else gmax[0] < hi
    margin_lo, margin_hi = gmin[0] - lo, hi - gmax[0]
    worst_margin, worst_loc = (margin_lo, gmin[1]) if margin_lo <= margin_hi else (margin_hi, gmax[1])
    return BoundScanReport(
        quantity, lo, hi, lo_closed, hi_closed, gmin[0], gmax[0], gmin[1], gmax[1],
        float(worst_margin), worst_loc, (grid.n_r, grid.n_t), grid.refine, per_piece, bool(ok_lo and ok_hi),
    )


# --------------------------------------------------------------------------
# the ergodic-partition condition


@dataclass(frozen=True)
class ErgodicConditionReport:
    c: float
    eta: float
    sup_cot_alpha: float
    eta_location: tuple
    cot_location: tuple
    passed: bool

    @property
    def margin(self) -> float:
        return self.c - 2.0 * self.eta

    def to_dict(self) -> dict:
        return {"c": self.c, "eta": self.eta, "supCotAlpha": self.sup_cot_alpha, "margin": self.margin,
                "eta_location": list(self.eta_location), "cot_location": list(self.cot_location),
                "pass": self.passed}


def cot_alpha(x, y):
    """Cotangent of the angle at w between the segments to the two centres, from the
    centre distances x, y and the law of cosines."""
    ca = (np.asarray(x) ** 2 + np.asarray(y) ** 2 - 4.0) / (2.0 * np.asarray(x) * np.asarray(y))
    return ca / np.sqrt(1.0 - ca * ca)


def _grid_sup(func, config, n: int, refine: int):
    r0, r1 = config.r0, config.r1
    xs = np.linspace(r0, r1, n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    vals = func(X, Y)
    i = np.unravel_index(np.argmax(vals), vals.shape)
    best, cx, cy = vals[i], X[i], Y[i]
    h = 2.0 * (r1 - r0) / (n - 1)
    for _ in range(refine):
        zx = np.clip(np.linspace(cx - h, cx + h, 41), r0, r1)
        zy = np.clip(np.linspace(cy - h, cy + h, 41), r0, r1)
        ZX, ZY = np.meshgrid(zx, zy, indexing="ij")
        zv = func(ZX, ZY)
        j = np.unravel_index(np.argmax(zv), zv.shape)
        if zv[j] > best:
            best, cx, cy = zv[j], ZX[j], ZY[j]
        h /= 10.0
    return float(best), (float(cx), float(cy))


def ergodic_condition_check(config, n: int = 401, refine: int = 3) -> ErgodicConditionReport:
    """c = 2 pi / (r1 - r0) against eta = sup over Sigma of cot(alpha) / r.

    Sigma+ in new coordinates is the square [r0, r1]^2 and r(w) = x there;
    Sigma- is its mirror image, so the square suffices.
    """
    sup_cot, cot_loc = _grid_sup(cot_alpha, config, n, refine)
    eta, eta_loc = _grid_sup(lambda x, y: cot_alpha(x, y) / x, config, n, refine)
    c = config.c
    return ErgodicConditionReport(c, eta, sup_cot, eta_loc, cot_loc, bool(c > 2.0 * eta))
