"""The four linked-twist map families: forward/inverse steps, exact Jacobians,
singular-set detection and embedding orientations.

Every system object is an immutable configuration that also knows how to
iterate itself.  Batched methods (``forward``, ``inverse``) take arrays of
shape ``(..., d)``; the ``*_point`` methods are plain-float fast paths used by
long orbit loops.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .phase_spaces import EPS_BOUNDARY, circle_distance, in_arc, wrap_scalar, wrap_value
from .special_functions import SPHERE_MODULUS, complete_elliptic_K

SQRT7 = math.sqrt(7.0)


def linear_twist(y, i0: float, i1: float, span: float):
    """Affine ramp from 0 at i0 to ``span`` at i1, zero outside [i0, i1]."""
    if not i0 < i1:
        raise ValueError("twist interval needs i0 < i1")
    y = np.asarray(y, dtype=float)
    inside = (y >= i0) & (y <= i1)
    out = np.where(inside, span * (y - i0) / (i1 - i0), 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class JacobianAt:
    matrix: np.ndarray
    defined: bool
    reason: Optional[str] = None

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))


# --------------------------------------------------------------------------
# Toral families


class _ToralFamily:
    """Shared machinery for maps G^k o F^j built from affine twists on annuli.

    Subclasses provide ``period``, ``origin``, ``p_bands``/``q_bands`` (closed
    arcs on which the horizontal/vertical twists act) and the twist amounts
    ``span_f``/``span_g``, which are whole multiples of the period so that
    each twist is continuous on the torus.
    """

    period: float
    origin: float
    p_bands: tuple
    q_bands: tuple
    span_f: float
    span_g: float
    dim = 2

    # twist amounts and derivatives ------------------------------------
    def _full(self, band) -> bool:
        return band[1] - band[0] >= self.period

    def twist_f(self, y):
        return sum(linear_twist(y, lo, hi, self.span_f) for lo, hi in self.p_bands)

    def twist_g(self, x):
        return sum(linear_twist(x, lo, hi, self.span_g) for lo, hi in self.q_bands)

    @property
    def slope_f(self) -> float:
        lo, hi = self.p_bands[0]
        return self.span_f / (hi - lo)

    @property
    def slope_g(self) -> float:
        lo, hi = self.q_bands[0]
        return self.span_g / (hi - lo)

    def _slope_scalar(self, v: float, bands, span: float, eps: float):
        """(derivative, on_edge) of the twist at v."""
        L = self.period
        for lo, hi in bands:
            if hi - lo >= L:
                return span / (hi - lo), False
            for e in (lo, hi):
                d = (v - e) % L
                if d <= eps or L - d <= eps:
                    return 0.0, True
            if lo <= v <= hi:
                return span / (hi - lo), False
        return 0.0, False

    def _twist_scalar(self, v: float, bands, span: float) -> float:
        for lo, hi in bands:
            if lo <= v <= hi:
                return span * (v - lo) / (hi - lo)
        return 0.0

    # region tests -------------------------------------------------------
    def in_P(self, y):
        return np.logical_or.reduce([np.asarray(in_arc(y, lo, hi, self.period)) for lo, hi in self.p_bands])

    def in_Q(self, x):
        return np.logical_or.reduce([np.asarray(in_arc(x, lo, hi, self.period)) for lo, hi in self.q_bands])

    def in_S(self, pts):
        p = np.asarray(pts, dtype=float)
        return self.in_P(p[..., 1]) & self.in_Q(p[..., 0])

    def contains(self, pts):
        p = np.asarray(pts, dtype=float)
        return self.in_P(p[..., 1]) | self.in_Q(p[..., 0])

    def in_S_point(self, x: float, y: float) -> bool:
        return any(lo <= y <= hi for lo, hi in self.p_bands) and any(lo <= x <= hi for lo, hi in self.q_bands)

    def canonical(self, pts):
        return wrap_value(pts, self.period, self.origin)

    # the maps -----------------------------------------------------------
    def F(self, pts, power: int = 1):
        p = np.asarray(pts, dtype=float)
        x = wrap_value(p[..., 0] + power * self.twist_f(p[..., 1]), self.period, self.origin)
        return np.stack([x, p[..., 1]], axis=-1)

    def G(self, pts, power: int = 1):
        p = np.asarray(pts, dtype=float)
        y = wrap_value(p[..., 1] + power * self.twist_g(p[..., 0]), self.period, self.origin)
        return np.stack([p[..., 0], y], axis=-1)

    def _check_domain(self, pts):
        if not np.all(self.contains(pts)):
            raise ValueError("point lies outside the invariant set R = P u Q")

    def forward(self, pts):
        pts = self.canonical(pts)
        self._check_domain(pts)
        return self.G(self.F(pts))

    def inverse(self, pts):
        pts = self.canonical(pts)
        self._check_domain(pts)
        return self.F(self.G(pts, -1), -1)

    def F_point(self, x: float, y: float, power: int = 1) -> tuple[float, float]:
        return wrap_scalar(x + power * self._twist_scalar(y, self.p_bands, self.span_f), self.period, self.origin), y

    def G_point(self, x: float, y: float, power: int = 1) -> tuple[float, float]:
        return x, wrap_scalar(y + power * self._twist_scalar(x, self.q_bands, self.span_g), self.period, self.origin)

    def forward_point(self, pt) -> tuple[float, float]:
        x, y = self.F_point(float(pt[0]), float(pt[1]))
        return self.G_point(x, y)

    def inverse_point(self, pt) -> tuple[float, float]:
        x, y = self.G_point(float(pt[0]), float(pt[1]), -1)
        return self.F_point(x, y, -1)

    def step_jacobian(self, pt, eps: float = EPS_BOUNDARY, iterate: int = 0):
        """Single-step Jacobian DG_{F(z)} DF_z, or the reason it is undefined."""
        x, y = float(pt[0]), float(pt[1])
        a, edge = self._slope_scalar(y, self.p_bands, self.span_f, eps)
        if edge:
            return None, f"∂P at iterate {iterate}"
        x1, _ = self.F_point(x, y)
        b, edge = self._slope_scalar(x1, self.q_bands, self.span_g, eps)
        if edge:
            return None, f"∂Q at iterate {iterate}"
        return np.array([[1.0, a], [b, 1.0 + a * b]]), None

    def lipschitz(self) -> float:
        a, b = self.slope_f, self.slope_g
        return float(np.linalg.norm(np.array([[1.0, a], [b, 1.0 + a * b]]), 2))

    def lipschitz_F(self) -> float:
        return float(np.linalg.norm(np.array([[1.0, self.slope_f], [0.0, 1.0]]), 2))

    # singular sets -------------------------------------------------------
    def _edges(self, bands):
        return [e for band in bands if not self._full(band) for e in band]

    def boundary_distance(self, pts):
        """Exact distance to the annulus boundaries, the lines of dP and dQ."""
        p = self.canonical(np.asarray(pts, dtype=float))
        d = np.full(p.shape[:-1], np.inf)
        for e in self._edges(self.p_bands):
            d = np.minimum(d, circle_distance(p[..., 1], e, self.period))
        for e in self._edges(self.q_bands):
            d = np.minimum(d, circle_distance(p[..., 0], e, self.period))
        return d

    def _preimage_dQ_distance(self, pts):
        """Exact distance to F^{-1}(dQ): slanted segments inside P, vertical lines outside."""
        L = self.period
        p = self.canonical(np.asarray(pts, dtype=float))
        x, y = p[..., 0], p[..., 1]
        d = np.full(x.shape, np.inf)
        xb_list = self._edges(self.q_bands)
        if not xb_list:
            return d
        partial = [b for b in self.p_bands if not self._full(b)]
        n_wraps = int(math.ceil(self.span_f / L)) + 2
        for xb in xb_list:
            for lo, hi in partial:
                s = self.span_f / (hi - lo)
                for yshift in (-L, 0.0, L):
                    yy = y + yshift
                    u0 = x - xb + s * (yy - lo)
                    base = np.round(u0 / L)
                    for dn in range(-n_wraps, n_wraps + 1):
                        u = u0 - (base + dn) * L
                        ystar = np.clip(yy - s * u / (1.0 + s * s), lo, hi)
                        xoff = u - s * (yy - ystar)
                        d = np.minimum(d, np.hypot(xoff, yy - ystar))
            if partial:
                # vertical pieces of F^{-1}(dQ): the arcs of y outside every P band
                bands = sorted(partial)
                dx = circle_distance(x, xb, L)
                gaps = [(bands[i][1], bands[(i + 1) % len(bands)][0] + (L if i + 1 == len(bands) else 0.0))
                        for i in range(len(bands))]
                for g_lo, g_hi in gaps:
                    inside = in_arc(y, g_lo, g_hi, L)
                    dy = np.minimum(circle_distance(y, g_lo, L), circle_distance(y, g_hi, L))
                    d = np.minimum(d, np.where(inside, dx, np.hypot(dx, dy)))
            else:
                d = np.minimum(d, circle_distance(x, xb, L))
        return d

    def singular_distance(self, pts, iterates: int = 1):
        """Lower bound on the distance to the set where H^n fails to be differentiable.

        n = 0 gives the exact distance to the annulus boundaries.  n = 1 gives
        the exact distance to s0 = dP u F^{-1}(dQ).  For larger n the further
        pullbacks H^{-h}(s0) are bounded through the Lipschitz constant of H.
        """
        if iterates < 0:
            raise ValueError("iterates must be non-negative")
        p = self.canonical(np.asarray(pts, dtype=float))
        if iterates == 0:
            return self.boundary_distance(p)

        def s0_distance(q):
            dp = np.full(q.shape[:-1], np.inf)
            for e in self._edges(self.p_bands):
                dp = np.minimum(dp, circle_distance(q[..., 1], e, self.period))
            return np.minimum(dp, self._preimage_dQ_distance(q))

        d = s0_distance(p)
        lip = self.lipschitz()
        q = p
        for h in range(1, iterates):
            q = self.G(self.F(q))
            d = np.minimum(d, s0_distance(q) / lip ** h)
        return d

    def sample_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n points uniformly distributed (Lebesgue) on R, by rejection."""
        out = np.empty((0, 2))
        while len(out) < n:
            cand = self.origin + self.period * rng.random((max(2 * (n - len(out)), 64), 2))
            out = np.concatenate([out, cand[self.contains(cand)]])
        return out[:n]

    def embedding_determinants(self, pt) -> tuple[float, float]:
        """Determinants of the two annulus embeddings: identity and the coordinate swap."""
        return 1.0, -1.0


@dataclass(frozen=True)
class ToralLTM(_ToralFamily):
    """H_{j,k} = G^k o F^j on the unit torus with P = {y0<=y<=y1}, Q = {x0<=x<=x1}.

    The powers j, k are applied by scaling the twist amount, which is the same
    map as repeated application because F fixes y (and G fixes x).
    """

    x0: float = 0.25
    x1: float = 0.75
    y0: float = 0.25
    y1: float = 0.75
    j: int = 1
    k: int = 1
    family: str = field(default="toral", init=False)

    def __post_init__(self):
        for name in ("j", "k"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer")
        if not (0.0 <= self.x0 < self.x1 <= 1.0 and 0.0 <= self.y0 < self.y1 <= 1.0):
            raise ValueError("need 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1")

    @classmethod
    def cat_map(cls) -> "ToralLTM":
        """The specialisation (x, y) -> (x + y, x + 2y)."""
        return cls(0.0, 1.0, 0.0, 1.0, 1, 1)

    period = property(lambda self: 1.0)
    origin = property(lambda self: 0.0)
    p_bands = property(lambda self: ((self.y0, self.y1),))
    q_bands = property(lambda self: ((self.x0, self.x1),))
    span_f = property(lambda self: float(self.j))
    span_g = property(lambda self: float(self.k))

    @property
    def alpha(self) -> float:
        """Derivative of the single twist f on P."""
        return 1.0 / (self.y1 - self.y0)

    @property
    def beta(self) -> float:
        return 1.0 / (self.x1 - self.x0)

    def measure_R(self) -> float:
        hp, hq = self.y1 - self.y0, self.x1 - self.x0
        return hp + hq - hp * hq


@dataclass(frozen=True)
class GeneralizedToralLTM(_ToralFamily):
    """Four-annulus toral map on coordinates in [-K, 3K) with period 4K.

    P0 = {|y| <= y0}, P1 = {|y - 2K| <= y0}, Q0 = {|x| <= x0}, Q1 = {|x - 2K| <= x0};
    each twist turns its annulus exactly once (twist amount 4K).
    """

    x0: float = float("nan")
    y0: float = float("nan")
    K: float = field(default_factory=lambda: complete_elliptic_K(SPHERE_MODULUS))
    family: str = field(default="generalized", init=False)

    def __post_init__(self):
        half = self.K / 2.0
        if math.isnan(self.x0):
            object.__setattr__(self, "x0", half)
        if math.isnan(self.y0):
            object.__setattr__(self, "y0", half)
        if not (0.0 < self.x0 < self.K and 0.0 < self.y0 < self.K):
            raise ValueError("need 0 < x0, y0 < K")

    period = property(lambda self: 4.0 * self.K)
    origin = property(lambda self: -self.K)
    p_bands = property(lambda self: ((-self.y0, self.y0), (2 * self.K - self.y0, 2 * self.K + self.y0)))
    q_bands = property(lambda self: ((-self.x0, self.x0), (2 * self.K - self.x0, 2 * self.K + self.x0)))
    span_f = property(lambda self: 4.0 * self.K)
    span_g = property(lambda self: 4.0 * self.K)

    @property
    def alpha(self) -> float:
        return 4.0 * self.K / (2.0 * self.y0)

    @property
    def beta(self) -> float:
        return 4.0 * self.K / (2.0 * self.x0)


# --------------------------------------------------------------------------
# Planar map


@dataclass(frozen=True)
class PlanarLTM:
    """Theta = Gamma o Phi on two overlapping planar annuli centred at (-1,0) and (1,0).

    Phi = M+ o Lambda o M+^{-1} on A+, Gamma = M- o Lambda^{-1} o M-^{-1} on A-,
    with Lambda(r, t) = (r, t + c (r - r0)) and c = 2 pi / (r1 - r0).
    """

    r0: float = 2.0
    r1: float = SQRT7
    family: str = field(default="planar", init=False)
    dim = 2

    def __post_init__(self):
        if not (2.0 <= self.r0 < self.r1 <= SQRT7 + 1e-15):
            raise ValueError("r1 violates 2 ≤ r0 < r1 ≤ √7")

    @property
    def c(self) -> float:
        return 2.0 * math.pi / (self.r1 - self.r0)

    def _radii(self, p):
        return np.hypot(p[..., 0] + 1.0, p[..., 1]), np.hypot(p[..., 0] - 1.0, p[..., 1])

    def contains(self, pts, eps: float = EPS_BOUNDARY):
        rp, rm = self._radii(np.asarray(pts, dtype=float))
        lo, hi = self.r0 - eps, self.r1 + eps
        return ((rp >= lo) & (rp <= hi)) | ((rm >= lo) & (rm <= hi))

    def in_sigma(self, pts):
        rp, rm = self._radii(np.asarray(pts, dtype=float))
        return (rp >= self.r0) & (rp <= self.r1) & (rm >= self.r0) & (rm <= self.r1)

    def _rotate(self, p, centre: float, sign: float):
        """Twist about (centre, 0): the annulus map conjugated into Cartesian form."""
        du, dv = p[..., 0] - centre, p[..., 1]
        r = np.hypot(du, dv)
        inside = (r >= self.r0) & (r <= self.r1)
        ang = np.where(inside, sign * self.c * (r - self.r0), 0.0)
        ca, sa = np.cos(ang), np.sin(ang)
        out = np.stack([centre + ca * du - sa * dv, sa * du + ca * dv], axis=-1)
        return np.where(inside[..., None], out, p)

    def Phi(self, pts, power: int = 1):
        return self._rotate(np.asarray(pts, dtype=float), -1.0, float(power))

    def Gamma(self, pts, power: int = 1):
        # M- is the point reflection of M+, so Lambda^{-1} conjugated by M- is a
        # clockwise twist about (1, 0).
        return self._rotate(np.asarray(pts, dtype=float), 1.0, -float(power))

    def forward(self, pts):
        pts = np.asarray(pts, dtype=float)
        if not np.all(self.contains(pts)):
            raise ValueError("point lies outside A = A+ u A-")
        return self.Gamma(self.Phi(pts))

    def inverse(self, pts):
        pts = np.asarray(pts, dtype=float)
        if not np.all(self.contains(pts)):
            raise ValueError("point lies outside A = A+ u A-")
        return self.Phi(self.Gamma(pts, -1), -1)

    def forward_point(self, pt):
        return tuple(self.forward(np.asarray(pt, dtype=float)))

    def inverse_point(self, pt):
        return tuple(self.inverse(np.asarray(pt, dtype=float)))

    def _twist_jacobian(self, p, centre: float, sign: float, eps: float):
        du, dv = p[0] - centre, p[1]
        r = math.hypot(du, dv)
        if abs(r - self.r0) <= eps or abs(r - self.r1) <= eps:
            return None
        if not (self.r0 < r < self.r1):
            return np.eye(2)
        theta = math.atan2(dv, du)
        th2 = theta + sign * self.c * (r - self.r0)

        def chart(rr, tt):
            return np.array([[math.cos(tt), -rr * math.sin(tt)], [math.sin(tt), rr * math.cos(tt)]])

        shear = np.array([[1.0, 0.0], [sign * self.c, 1.0]])
        return chart(r, th2) @ shear @ np.linalg.inv(chart(r, theta))

    def step_jacobian(self, pt, eps: float = EPS_BOUNDARY, iterate: int = 0):
        p = np.asarray(pt, dtype=float)
        j1 = self._twist_jacobian(p, -1.0, 1.0, eps)
        if j1 is None:
            return None, f"∂A+ at iterate {iterate}"
        q = self.Phi(p)
        j2 = self._twist_jacobian(q, 1.0, -1.0, eps)
        if j2 is None:
            return None, f"∂A- at iterate {iterate}"
        return j2 @ j1, None

    def lipschitz_twist(self) -> float:
        """Operator norm bound of D(Phi) (and D(Gamma)): a shear of size c*r in the polar frame."""
        s = self.c * self.r1
        return float(np.linalg.norm(np.array([[1.0, 0.0], [s, 1.0]]), 2))

    def singular_distance(self, pts, iterates: int = 1):
        """Lower bound on the distance to the non-differentiability set of Theta^n.

        n = 0: exact distance to the four boundary circles.  n >= 1: dA+ exactly,
        Phi^{-1}(dA-) and later pullbacks through Lipschitz bounds.
        """
        p = np.asarray(pts, dtype=float)
        rp, rm = self._radii(p)
        ring = lambda r: np.minimum(np.abs(r - self.r0), np.abs(r - self.r1))
        if iterates == 0:
            return np.minimum(ring(rp), ring(rm))
        lip_phi = self.lipschitz_twist()
        lip = lip_phi ** 2

        def s0(q):
            rp_, _ = self._radii(q)
            _, rm_ = self._radii(self.Phi(q))
            return np.minimum(ring(rp_), ring(rm_) / lip_phi)

        d = s0(p)
        q = p
        for h in range(1, iterates):
            q = self.Gamma(self.Phi(q))
            d = np.minimum(d, s0(q) / lip ** h)
        return d

    def sample_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        out = np.empty((0, 2))
        r = self.r1
        while len(out) < n:
            cand = np.column_stack([rng.uniform(-1 - r, 1 + r, 4 * n), rng.uniform(-r, r, 4 * n)])
            out = np.concatenate([out, cand[self.contains(cand, eps=0.0)]])
        return out[:n]

    def embedding_determinants(self, pt) -> tuple[float, float]:
        """det D(M+) = r at the A+ chart point and det D(M- o B) = -r at the A- chart point,
        where B(r, t) = (r, -t) turns the clockwise twist into a standard one."""
        p = np.asarray(pt, dtype=float)
        rp, rm = self._radii(p)
        return float(rp), float(-rm)


# --------------------------------------------------------------------------
# Sphere map


@dataclass(frozen=True)
class SphereLTM:
    """Theta = Gamma o Phi on the sphere, built from the torus through the
    Jacobi-function embedding E.  Phi = E o T o E^{-1} on A+ = E(C) with
    C = S^1 x [-y0, y0]; Gamma twists A- = E(C') with C' = [-x0, x0] x S^1.
    """

    x0: float = float("nan")
    y0: float = float("nan")
    K: float = field(default_factory=lambda: complete_elliptic_K(SPHERE_MODULUS))
    family: str = field(default="sphere", init=False)
    dim = 3

    def __post_init__(self):
        if math.isnan(self.x0):
            object.__setattr__(self, "x0", self.K / 2.0)
        if math.isnan(self.y0):
            object.__setattr__(self, "y0", self.K / 2.0)
        if not (0.0 < self.x0 < self.K and 0.0 < self.y0 < self.K):
            raise ValueError("need 0 < x0, y0 < K")

    def torus_system(self) -> GeneralizedToralLTM:
        return GeneralizedToralLTM(self.x0, self.y0, self.K)

    def _charts(self, pts):
        from .semiconjugacy import invert_E_on_chart

        p = np.asarray(pts, dtype=float)
        return invert_E_on_chart(p, "C", self.K), invert_E_on_chart(p, "Cprime", self.K)

    def contains(self, pts, eps: float = EPS_BOUNDARY):
        (_, yc), (xc, _) = self._charts(pts)
        return (np.abs(yc) <= self.y0 + eps) | (np.abs(xc) <= self.x0 + eps)

    def Phi(self, pts, power: int = 1):
        from .semiconjugacy import embed_E, invert_E_on_chart

        p = np.asarray(pts, dtype=float)
        x, y = invert_E_on_chart(p, "C", self.K)
        inside = np.abs(y) <= self.y0
        xt = x + power * np.where(inside, 4.0 * self.K * (y + self.y0) / (2.0 * self.y0), 0.0)
        return np.where(np.asarray(inside)[..., None], embed_E(xt, y, self.K), p)

    def Gamma(self, pts, power: int = 1):
        from .semiconjugacy import embed_E, invert_E_on_chart

        p = np.asarray(pts, dtype=float)
        x, y = invert_E_on_chart(p, "Cprime", self.K)
        inside = np.abs(x) <= self.x0
        # N o T o N^{-1}: the twist carried to C' by N(x, y) = (x0/y0 * y, x)
        yt = y + power * np.where(inside, 4.0 * self.K * (x + self.x0) / (2.0 * self.x0), 0.0)
        return np.where(np.asarray(inside)[..., None], embed_E(x, yt, self.K), p)

    def forward(self, pts):
        pts = np.asarray(pts, dtype=float)
        if not np.all(self.contains(pts)):
            raise ValueError("point lies outside A = A+ u A-")
        return self.Gamma(self.Phi(pts))

    def inverse(self, pts):
        pts = np.asarray(pts, dtype=float)
        if not np.all(self.contains(pts)):
            raise ValueError("point lies outside A = A+ u A-")
        return self.Phi(self.Gamma(pts, -1), -1)

    def forward_point(self, pt):
        return tuple(self.forward(np.asarray(pt, dtype=float)))

    def inverse_point(self, pt):
        return tuple(self.inverse(np.asarray(pt, dtype=float)))

    def step_jacobian(self, pt, eps: float = EPS_BOUNDARY, iterate: int = 0):
        """Jacobian in the torus chart C: that of the covered four-annulus map at E^{-1}_C(p)."""
        from .semiconjugacy import invert_E_on_chart

        x, y = invert_E_on_chart(np.asarray(pt, dtype=float), "C", self.K)
        return self.torus_system().step_jacobian((x, y), eps, iterate)

    def sample_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Samples of the pushforward measure: E applied to uniform points of R."""
        from .semiconjugacy import embed_E

        z = self.torus_system().sample_uniform(rng, n)
        return embed_E(z[:, 0], z[:, 1], self.K)

    def embedding_determinants(self, pt) -> tuple[float, float]:
        """Oriented area factors of the two annulus embeddings E and E o N at p.

        Each is (E_x x E_y) . p at the chart preimage, the second multiplied by
        det N = -x0/y0.
        """
        from .semiconjugacy import E_partials, invert_E_on_chart

        p = np.asarray(pt, dtype=float)
        xc, yc = invert_E_on_chart(p, "C", self.K)
        ex, ey = E_partials(xc, yc, self.K)
        d1 = float(np.dot(np.cross(ex, ey), p))
        xp, yp = invert_E_on_chart(p, "Cprime", self.K)
        ex, ey = E_partials(xp, yp, self.K)
        d2 = float(np.dot(np.cross(ex, ey), p)) * (-self.x0 / self.y0)
        return d1, d2


# --------------------------------------------------------------------------
# module-level operations


def step(system, point, direction: str = "forward"):
    """One application of the map (or its inverse); batched over leading axes."""
    if direction == "forward":
        return system.forward(point)
    if direction == "inverse":
        return system.inverse(point)
    raise ValueError("direction must be 'forward' or 'inverse'")


def jacobian(system, point, iterates: int = 1, direction: str = "forward",
             eps: float = EPS_BOUNDARY) -> JacobianAt:
    """Chain-rule product of single-step Jacobians along the orbit of ``point``.

    For the inverse direction the product is of inverse matrices taken at the
    backward orbit.  The flag is cleared as soon as any intermediate point
    sits within ``eps`` of that step's non-differentiability set.
    """
    if iterates < 1:
        raise ValueError("iterates must be at least 1")
    p = tuple(float(c) for c in np.asarray(point, dtype=float))
    total = np.eye(2)
    for i in range(iterates):
        if direction == "forward":
            mat, reason = system.step_jacobian(p, eps, i)
            if mat is None:
                return JacobianAt(total, False, reason)
            total = mat @ total
            p = system.forward_point(p)
        else:
            prev = system.inverse_point(p)
            mat, reason = system.step_jacobian(prev, eps, -(i + 1))
            if mat is None:
                return JacobianAt(total, False, reason)
            total = np.linalg.inv(mat) @ total
            p = prev
    return JacobianAt(total, True, None)


def singular_set_distance(system, point, iterates: int = 1):
    """Lower bound on the distance from ``point`` to where the n-th iterate is not differentiable."""
    if not hasattr(system, "singular_distance"):
        raise TypeError(f"singular-set distance is not available for the {system.family} system")
    d = system.singular_distance(np.asarray(point, dtype=float), iterates)
    return float(d) if np.ndim(d) == 0 else d
