"""Points on the four phase spaces, circle wrapping, the polar charts M+/M-,
and region membership for every configured system."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

EPS_BOUNDARY = 1e-9


def wrap_value(value, period: float, origin: float = 0.0):
    """Canonical representative in [origin, origin + period); works on arrays."""
    if period <= 0:
        raise ValueError("period must be positive")
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("cannot wrap a non-finite value")
    out = np.mod(arr - origin, period)
    # fmod of a tiny negative number can round up to exactly one period
    out = np.where(out >= period, 0.0, out) + origin
    return float(out) if np.ndim(value) == 0 else out


def wrap_scalar(value: float, period: float, origin: float = 0.0) -> float:
    """Fast pure-Python twin of :func:`wrap_value` for orbit loops."""
    out = (value - origin) % period
    if out >= period:
        out = 0.0
    return out + origin


def circle_distance(a, b, period: float):
    """Shortest arc length between a and b on a circle of the given period."""
    d = np.mod(np.asarray(a, dtype=float) - b, period)
    d = np.minimum(d, period - d)
    return float(d) if np.ndim(d) == 0 else d


def in_arc(value, lo: float, hi: float, period: float, eps: float = 0.0):
    """Membership of a circle value in the closed arc running from lo up to hi."""
    if hi - lo >= period:
        return np.ones_like(np.asarray(value, dtype=bool), dtype=bool) if np.ndim(value) else True
    off = np.mod(np.asarray(value, dtype=float) - lo + eps, period)
    res = off <= (hi - lo) + 2.0 * eps
    return bool(res) if np.ndim(res) == 0 else res


@dataclass(frozen=True)
class CircleCoord:
    value: float
    period: float
    origin: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "value", wrap_value(self.value, self.period, self.origin))


def wrap(value: float, period: float, origin: float = 0.0) -> CircleCoord:
    return CircleCoord(value, period, origin)


@dataclass(frozen=True)
class TorusPoint:
    x: CircleCoord
    y: CircleCoord

    @classmethod
    def make(cls, x: float, y: float, period: float = 1.0, origin: float = 0.0) -> "TorusPoint":
        return cls(CircleCoord(x, period, origin), CircleCoord(y, period, origin))

    def as_array(self) -> np.ndarray:
        return np.array([self.x.value, self.y.value])


@dataclass(frozen=True)
class PlanarPoint:
    u: float
    v: float

    def polar(self, sign: int = +1) -> tuple[float, float]:
        r, theta = polar_embed("inverse", sign, (self.u, self.v))
        return float(r), float(theta)

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v])


@dataclass(frozen=True)
class SpherePoint:
    u: float
    v: float
    w: float

    def __post_init__(self):
        if abs(self.u ** 2 + self.v ** 2 + self.w ** 2 - 1.0) > 1e-10:
            raise ValueError("sphere point must have unit norm")

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.w])


def polar_embed(direction: str, sign: int, point):
    """M+(r,t) = (r cos t - 1, r sin t) and M-(r,t) = -(r cos t - 1, r sin t), or their inverses.

    Works on a pair or on an array of shape (..., 2).  The inverse uses the
    two-argument arctangent so the angle lies in [-pi, pi].
    """
    p = np.asarray(point, dtype=float)
    a, b = p[..., 0], p[..., 1]
    s = 1.0 if sign in (+1, "+") else -1.0
    if sign not in (+1, -1, "+", "-"):
        raise ValueError("sign must be + or -")
    if direction == "forward":
        if np.any(a < 0):
            raise ValueError("radius must be non-negative")
        out = np.stack([s * (a * np.cos(b) - 1.0), s * a * np.sin(b)], axis=-1)
    elif direction == "inverse":
        # bring the point into the M+ frame, then read off polar coordinates about (-1, 0)
        du, dv = s * a + 1.0, s * b
        r = np.hypot(du, dv)
        if np.any(r == 0.0):
            raise ValueError("the chart centre has no polar angle")
        out = np.stack([r, np.arctan2(dv, du)], axis=-1)
    else:
        raise ValueError("direction must be 'forward' or 'inverse'")
    return out


@dataclass(frozen=True)
class RegionFlags:
    in_P: Optional[bool] = None
    in_Q: Optional[bool] = None
    in_S: Optional[bool] = None
    in_P0: Optional[bool] = None
    in_P1: Optional[bool] = None
    in_Q0: Optional[bool] = None
    in_Q1: Optional[bool] = None
    s_index: Optional[tuple[int, int]] = None
    in_A_plus: Optional[bool] = None
    in_A_minus: Optional[bool] = None
    in_sigma_plus: Optional[bool] = None
    in_sigma_minus: Optional[bool] = None
    on_boundary: bool = False


def _toral_flags(system, point, eps: float) -> RegionFlags:
    x, y = (float(c) for c in np.asarray(point, dtype=float))
    L = system.period
    p_hits = [in_arc(y, lo, hi, L) for lo, hi in system.p_bands]
    q_hits = [in_arc(x, lo, hi, L) for lo, hi in system.q_bands]
    edges_y = [e for band in system.p_bands if band[1] - band[0] < L for e in band]
    edges_x = [e for band in system.q_bands if band[1] - band[0] < L for e in band]
    boundary = any(circle_distance(y, e, L) <= eps for e in edges_y) or any(
        circle_distance(x, e, L) <= eps for e in edges_x
    )
    in_p, in_q = any(p_hits), any(q_hits)
    s_index = None
    for h, ph in enumerate(p_hits):
        for i, qh in enumerate(q_hits):
            if ph and qh and s_index is None:
                s_index = (h, i)
    kwargs = dict(in_P=in_p, in_Q=in_q, in_S=in_p and in_q, on_boundary=boundary)
    if len(p_hits) == 2:
        kwargs.update(in_P0=p_hits[0], in_P1=p_hits[1], in_Q0=q_hits[0], in_Q1=q_hits[1], s_index=s_index)
    return RegionFlags(**kwargs)


def _planar_flags(system, point, eps: float) -> RegionFlags:
    u, v = (float(c) for c in np.asarray(point, dtype=float))
    r_plus = math.hypot(u + 1.0, v)
    r_minus = math.hypot(u - 1.0, v)
    r0, r1 = system.r0, system.r1
    a_plus = r0 <= r_plus <= r1
    a_minus = r0 <= r_minus <= r1
    boundary = min(abs(r_plus - r0), abs(r_plus - r1), abs(r_minus - r0), abs(r_minus - r1)) <= eps
    both = a_plus and a_minus
    return RegionFlags(
        in_A_plus=a_plus,
        in_A_minus=a_minus,
        in_sigma_plus=both and v > 0,
        in_sigma_minus=both and v < 0,
        on_boundary=boundary,
    )


def _sphere_flags(system, point, eps: float) -> RegionFlags:
    from .semiconjugacy import invert_E_on_chart

    p = np.asarray(point, dtype=float)
    _, yc = invert_E_on_chart(p, "C", system.K)
    xc, _ = invert_E_on_chart(p, "Cprime", system.K)
    a_plus = abs(yc) <= system.y0
    a_minus = abs(xc) <= system.x0
    boundary = abs(abs(yc) - system.y0) <= eps or abs(abs(xc) - system.x0) <= eps
    return RegionFlags(in_A_plus=a_plus, in_A_minus=a_minus, on_boundary=boundary)


def classify_region(system, point, eps: float = EPS_BOUNDARY) -> RegionFlags:
    """Closed-set region membership for the configured system at one point."""
    family = system.family
    if family in ("toral", "generalized"):
        return _toral_flags(system, point, eps)
    if family == "planar":
        return _planar_flags(system, point, eps)
    if family == "sphere":
        return _sphere_flags(system, point, eps)
    raise ValueError(f"unknown system family {family!r}")
