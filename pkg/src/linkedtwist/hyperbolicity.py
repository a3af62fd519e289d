"""Returns to the intersection region, cone invariance and expansion,
Lyapunov exponents, unstable directions and growth of curves."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .phase_spaces import EPS_BOUNDARY, polar_embed
from .twist_maps import PlanarLTM, jacobian

DEFAULT_CAP = 10 ** 6
RENORM_EVERY = 32
CONE_TOL = 1e-12


# --------------------------------------------------------------------------
# cones


@dataclass(frozen=True)
class TangentCone:
    """A double sector of tangent directions.

    ``kind`` is "C" for {uv > 0}, "Ctilde" for {uv < 0}, or "slope" for
    {s_lo <= v/u <= s_hi}; ``s_hi = inf`` includes the vertical direction.
    """

    kind: str = "C"
    s_lo: float = 0.0
    s_hi: float = math.inf

    @classmethod
    def positive(cls) -> "TangentCone":
        return cls("C")

    @classmethod
    def negative(cls) -> "TangentCone":
        return cls("Ctilde")

    @classmethod
    def planar_U(cls, c: float) -> "TangentCone":
        """{beta2 / beta1 >= -c/2} in polar tangent coordinates (dr, dtheta)."""
        return cls("slope", -c / 2.0, math.inf)

    def classify(self, w) -> str:
        """'inside', 'boundary' or 'outside'."""
        u, v = float(w[0]), float(w[1])
        n2 = u * u + v * v
        if n2 == 0.0:
            raise ValueError("zero vector has no direction")
        if self.kind in ("C", "Ctilde"):
            prod = u * v / n2
            if abs(prod) <= CONE_TOL:
                return "boundary"
            return "inside" if (prod > 0) == (self.kind == "C") else "outside"
        if abs(u) <= CONE_TOL * math.sqrt(n2):
            return "inside" if math.isinf(self.s_hi) else "outside"
        s = v / u
        scale = max(1.0, abs(self.s_lo), abs(s))
        if abs(s - self.s_lo) <= CONE_TOL * scale or (not math.isinf(self.s_hi) and abs(s - self.s_hi) <= CONE_TOL * scale):
            return "boundary"
        return "inside" if self.s_lo < s < self.s_hi else "outside"

    def boundary_directions(self) -> list:
        if self.kind in ("C", "Ctilde"):
            return [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
        out = [np.array([1.0, self.s_lo]) / math.hypot(1.0, self.s_lo)]
        if not math.isinf(self.s_hi):
            out.append(np.array([1.0, self.s_hi]) / math.hypot(1.0, self.s_hi))
        return out

    def interior_directions(self, n: int = 32) -> list:
        if self.kind == "C":
            angles = np.linspace(0.0, math.pi / 2, n + 2)[1:-1]
        elif self.kind == "Ctilde":
            angles = np.linspace(math.pi / 2, math.pi, n + 2)[1:-1]
        elif math.isinf(self.s_hi):
            # from the lower slope up to and including the vertical direction
            angles = np.linspace(math.atan(self.s_lo), math.pi / 2, n + 1)[1:]
        else:
            angles = np.linspace(math.atan(self.s_lo), math.atan(self.s_hi), n + 2)[1:-1]
        return [np.array([math.cos(a), math.sin(a)]) for a in angles]


# --------------------------------------------------------------------------
# returns to S


@dataclass(frozen=True)
class NotReturned:
    start: tuple
    cap: int


@dataclass(frozen=True)
class FirstReturn:
    return_iterates: int
    image: tuple


def _in_return_set(system, p) -> bool:
    if system.family in ("toral", "generalized"):
        return system.in_S_point(p[0], p[1])
    if system.family == "planar":
        return bool(system.in_sigma(np.asarray(p)))
    raise TypeError(f"no return set for the {system.family} system")


def first_return(system, point, cap: int = DEFAULT_CAP):
    """Smallest i >= 1 with H^i(point) back in S (or Sigma for the planar map)."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    p = tuple(float(c) for c in np.asarray(point, dtype=float))
    if not _in_return_set(system, p):
        raise ValueError("point is not in the return set")
    if system.family in ("toral", "generalized"):
        x, y = p
        for i in range(1, cap + 1):
            x, y = system.forward_point((x, y))
            if system.in_S_point(x, y):
                return FirstReturn(i, (x, y))
        return NotReturned(p, cap)
    q = np.asarray(p)
    for i in range(1, cap + 1):
        q = system.forward(q)
        if system.in_sigma(q):
            return FirstReturn(i, tuple(float(c) for c in q))
    return NotReturned(p, cap)


@dataclass
class ReturnRecord:
    p: list
    q: list
    m: list
    start: tuple
    cap: int
    complete: bool = True
    points: list = field(default_factory=list)

    def __post_init__(self):
        total = 0
        for i, (pi, qi) in enumerate(zip(self.p, self.q)):
            total += pi + qi - 1
            if self.m[i] != total:
                raise ValueError("m is not the running sum of p + q - 1")


def _p_of(system, x, y, budget):
    """p(z) for z in P: count of F-steps until the orbit lands in Q, and the landing point."""
    for n in range(1, budget + 1):
        x, y = system.F_point(x, y)
        if any(lo <= x <= hi for lo, hi in system.q_bands):
            return n, x, y
    return None, x, y


def _q_of(system, x, y, budget):
    for n in range(1, budget + 1):
        x, y = system.G_point(x, y)
        if any(lo <= y <= hi for lo, hi in system.p_bands):
            return n, x, y
    return None, x, y


def pq_m_sequences(system, point, depth: int, cap: int = DEFAULT_CAP) -> ReturnRecord:
    """The (p_i, q_i, m_i) bookkeeping for the first ``depth`` returns of a point of S.

    Each return is G^{q_i} o F^{p_i}, which equals H^{p_i + q_i - 1}.
    ``points`` holds the successive return points.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    x, y = (float(c) for c in system.canonical(np.asarray(point, dtype=float)))
    if not system.in_S_point(x, y):
        raise ValueError("point is not in S")
    ps, qs, ms, pts = [], [], [], []
    used = 0
    for _ in range(depth):
        p, x, y = _p_of(system, x, y, cap - used)
        if p is None:
            return ReturnRecord(ps, qs, ms, (float(point[0]), float(point[1])), cap, False, pts)
        used += p
        q, x, y = _q_of(system, x, y, cap - used)
        if q is None:
            return ReturnRecord(ps, qs, ms, (float(point[0]), float(point[1])), cap, False, pts)
        used += q
        ps.append(p)
        qs.append(q)
        ms.append((ms[-1] if ms else 0) + p + q - 1)
        pts.append((x, y))
    return ReturnRecord(ps, qs, ms, (float(point[0]), float(point[1])), cap, True, pts)


@dataclass(frozen=True)
class ReturnFrequency:
    delta: float
    returns: int
    m_n: int
    delta_half: float

    @property
    def window_spread(self) -> float:
        return abs(self.delta - self.delta_half)


def return_frequency(system, point, horizon: int) -> ReturnFrequency:
    """n / m_n for the last return within ``horizon`` iterates, plus the same ratio at horizon/2."""
    x, y = (float(c) for c in system.canonical(np.asarray(point, dtype=float)))
    if not system.in_S_point(x, y):
        raise ValueError("point is not in S")
    returns, last, half = 0, 0, None
    for i in range(1, horizon + 1):
        x, y = system.forward_point((x, y))
        if system.in_S_point(x, y):
            returns += 1
            last = i
        if i == horizon // 2 and returns:
            half = returns / last
    if returns < 2:
        raise ValueError("fewer than two returns within the horizon")
    return ReturnFrequency(returns / last, returns, last, half if half is not None else float("nan"))


def return_jacobian(system, point, cap: int = DEFAULT_CAP):
    """(DH^{m_1} by the chain rule, record) for a point of S."""
    rec = pq_m_sequences(system, point, 1, cap)
    if not rec.complete:
        raise ValueError("point did not return within the cap")
    jac = jacobian(system, point, rec.m[0])
    if not jac.defined:
        raise ValueError(f"return Jacobian undefined: {jac.reason}")
    return jac.matrix, rec


def return_matrix(system, point, rec: ReturnRecord) -> np.ndarray:
    """The structural form [[1, p1 a], [q1 b, 1 + p1 a q1 b]] of the first-return derivative."""
    x, y = (float(c) for c in system.canonical(np.asarray(point, dtype=float)))
    a, _ = system._slope_scalar(y, system.p_bands, system.span_f, 0.0)
    xp = x
    for _ in range(rec.p[0]):
        xp, _y = system.F_point(xp, y)
    b, _ = system._slope_scalar(xp, system.q_bands, system.span_g, 0.0)
    pa, qb = rec.p[0] * a, rec.q[0] * b
    return np.array([[1.0, pa], [qb, 1.0 + pa * qb]])


def expansion_holds_exactly(matrix, w, kappa: float) -> bool:
    """|M w|^2 >= (1 + kappa^2) |w|^2 evaluated in exact rational arithmetic on the float inputs."""
    m = [[Fraction(float(v)) for v in row] for row in np.asarray(matrix)]
    u, v = Fraction(float(w[0])), Fraction(float(w[1]))
    a = m[0][0] * u + m[0][1] * v
    b = m[1][0] * u + m[1][1] * v
    k = Fraction(float(kappa))
    return a * a + b * b >= (1 + k * k) * (u * u + v * v)


# --------------------------------------------------------------------------
# planar return map in the polar chart


def planar_return_map(system: PlanarLTM, polar_point, cap: int = DEFAULT_CAP):
    """Theta_Sigma = M+^{-1} o Theta^i o M+ on polar points over Sigma; returns (image, i)."""
    cart = polar_embed("forward", +1, np.asarray(polar_point, dtype=float))
    res = first_return(system, cart, cap)
    if isinstance(res, NotReturned):
        return res
    return polar_embed("inverse", +1, np.asarray(res.image)), res.return_iterates


def _polar_chart_derivative(r: float, th: float) -> np.ndarray:
    return np.array([[math.cos(th), -r * math.sin(th)], [math.sin(th), r * math.cos(th)]])


@dataclass(frozen=True)
class ConeCheck:
    verdict: bool
    expansion_factor: float
    jacobian: np.ndarray
    iterates: int
    boundary_images: tuple
    kappa_bound: Optional[float] = None


def cone_check(system, point, cone: TangentCone, mode: str = "returnStep", n_dirs: int = 32) -> ConeCheck:
    """Does the single-step or return-step derivative map the cone into itself, and by how much
    does it stretch the sampled unit vectors of the cone?

    Toral systems use the Euclidean norm on the torus chart.  The planar map
    works in the polar chart about (-1, 0) with the norm sqrt(b1^2 + r^2 b2^2),
    which is the Euclidean length of the corresponding Cartesian vector.
    """
    p = np.asarray(point, dtype=float)
    if mode not in ("singleStep", "returnStep"):
        raise ValueError("mode must be 'singleStep' or 'returnStep'")
    kappa_bound = None
    if system.family == "planar":
        if mode == "returnStep":
            res = first_return(system, p)
            if isinstance(res, NotReturned):
                raise ValueError("point did not return to Sigma")
            n = res.return_iterates
        else:
            n = 1
        jac = jacobian(system, p, n)
        if not jac.defined:
            raise ValueError(f"Jacobian undefined: {jac.reason}")
        image = system.forward(p) if n == 1 else np.asarray(res.image)
        r0, t0 = polar_embed("inverse", +1, p)
        r1, t1 = polar_embed("inverse", +1, image)
        A0 = _polar_chart_derivative(r0, t0)
        A1 = _polar_chart_derivative(r1, t1)
        mat = np.linalg.solve(A1, jac.matrix @ A0)
        norm_in = lambda w: float(np.linalg.norm(A0 @ w))
        norm_out = lambda w: float(np.linalg.norm(A1 @ w))
    else:
        if mode == "returnStep":
            mat, rec = return_jacobian(system, p)
            n = rec.m[0]
            kappa_bound = math.sqrt(1.0 + min(rec.p[0] * system.slope_f, rec.q[0] * system.slope_g) ** 2)
        else:
            jac = jacobian(system, p, 1)
            if not jac.defined:
                raise ValueError(f"Jacobian undefined: {jac.reason}")
            mat, n = jac.matrix, 1
        norm_in = norm_out = lambda w: float(np.linalg.norm(w))
    ok = True
    factors = []
    bimgs = []
    for w in cone.boundary_directions():
        img = mat @ w
        bimgs.append(tuple(float(c) for c in img))
        ok &= cone.classify(img) != "outside"
        factors.append(norm_out(img) / norm_in(w))
    for w in cone.interior_directions(n_dirs):
        img = mat @ w
        ok &= cone.classify(img) == "inside"
        factors.append(norm_out(img) / norm_in(w))
    return ConeCheck(bool(ok), float(min(factors)), mat, n, tuple(bimgs), kappa_bound)


# --------------------------------------------------------------------------
# Lyapunov exponents


@dataclass(frozen=True)
class LyapunovEstimate:
    chi_plus: float
    chi_minus: float
    iterations: int
    renorm_count: int
    singular_steps: int


def _toral_ab(system, x, y, eps):
    a, edge = system._slope_scalar(y, system.p_bands, system.span_f, eps)
    if edge:
        return None
    x1, _ = system.F_point(x, y)
    b, edge = system._slope_scalar(x1, system.q_bands, system.span_g, eps)
    if edge:
        return None
    return a, b


def _nudge(system, p, k):
    """Move a base point off the singular set by a few boundary tolerances."""
    off = 4.0 * EPS_BOUNDARY * (k + 1)
    q = np.asarray(p, dtype=float) + off
    if system.family in ("toral", "generalized"):
        q = system.canonical(q)
    return tuple(float(c) for c in q)


def _step_matrix(system, base, i, toral):
    if toral:
        return _toral_ab(system, base[0], base[1], EPS_BOUNDARY)
    m, _ = system.step_jacobian(base, EPS_BOUNDARY, i)
    return m


def _apply(mat, v1, v2, toral, backward):
    if toral:
        a, b = mat
        if backward:
            return (1.0 + a * b) * v1 - a * v2, -b * v1 + v2
        return v1 + a * v2, b * v1 + (1.0 + a * b) * v2
    w = np.linalg.solve(mat, [v1, v2]) if backward else mat @ np.array([v1, v2])
    return float(w[0]), float(w[1])


def _unit(direction):
    v = np.asarray(direction, dtype=float)
    nrm = math.hypot(float(v[0]), float(v[1]))
    if nrm == 0:
        raise ValueError("direction must be nonzero")
    return float(v[0]) / nrm, float(v[1]) / nrm


def lyapunov_estimate(system, point, direction, iterations: int) -> LyapunovEstimate:
    """chi+ is the average log growth of ``direction`` along the forward orbit of
    ``point``, renormalised every 32 steps.

    chi- comes from a second, backward pass with inverse Jacobians over the
    same orbit segment, from its far end back to ``point``; a generic vector
    grows under the inverse at rate -chi-.  Steps whose base point lies on the
    singular set are retried from a point nudged off it and counted.
    """
    if iterations < 1000:
        raise ValueError("need at least 1000 iterations")
    toral = system.family in ("toral", "generalized")
    limit = max(1, iterations // 100)
    p = tuple(float(c) for c in np.asarray(point, dtype=float))
    mats = []
    singular = 0
    for i in range(iterations):
        tries = 0
        mat = _step_matrix(system, p, i, toral)
        while mat is None:
            singular += 1
            tries += 1
            if singular > limit:
                raise ArithmeticError("too many singular encounters (more than 1% of steps)")
            p = _nudge(system, p, tries)
            mat = _step_matrix(system, p, i, toral)
        mats.append(mat)
        p = system.forward_point(p)

    def run(order, backward):
        v1, v2 = _unit(direction)
        log_sum, renorms = 0.0, 0
        for k, mat in enumerate(order):
            v1, v2 = _apply(mat, v1, v2, toral, backward)
            if (k + 1) % RENORM_EVERY == 0 or k + 1 == iterations:
                nrm = math.hypot(v1, v2)
                log_sum += math.log(nrm)
                v1, v2 = v1 / nrm, v2 / nrm
                renorms += 1
        return log_sum / iterations, renorms

    chi_p, ren_p = run(mats, False)
    chi_b, ren_b = run(reversed(mats), True)
    return LyapunovEstimate(chi_p, -chi_b, iterations, ren_p + ren_b, singular)


# --------------------------------------------------------------------------
# unstable and stable directions


@dataclass(frozen=True)
class DirectionEstimate:
    direction: np.ndarray
    in_cone: bool
    classification: str


def _direction_along(system, point, iterations, forward: bool, seed_dir):
    p = tuple(float(c) for c in np.asarray(point, dtype=float))
    orbit = [p]
    for _ in range(iterations):
        orbit.append(system.inverse_point(orbit[-1]) if forward else system.forward_point(orbit[-1]))
    w = np.asarray(seed_dir, dtype=float)
    w = w / np.linalg.norm(w)
    for k in range(iterations, 0, -1):
        base = orbit[k] if forward else orbit[k - 1]
        mat, reason = system.step_jacobian(base, EPS_BOUNDARY, k)
        if mat is None:
            raise ArithmeticError(f"singular encounter: {reason}")
        w = mat @ w if forward else np.linalg.solve(mat, w)
        w = w / np.linalg.norm(w)
    if w[0] < 0 or (w[0] == 0 and w[1] < 0):
        w = -w
    return w


def unstable_direction_estimate(system, point, iterations: int = 40, seed_dir=(1.0, 1.0)) -> DirectionEstimate:
    """Push a cone vector forward from H^{-n}(point) to point; the normalised result
    approximates the unstable direction at point."""
    w = _direction_along(system, point, iterations, True, seed_dir)
    cls = TangentCone.positive().classify(w)
    return DirectionEstimate(w, cls == "inside", cls)


def stable_direction_estimate(system, point, iterations: int = 40, seed_dir=(1.0, -1.0)) -> DirectionEstimate:
    """Pull a vector of the complementary cone back from H^{n}(point) to point."""
    w = _direction_along(system, point, iterations, False, seed_dir)
    cls = TangentCone.negative().classify(w)
    return DirectionEstimate(w, cls == "inside", cls)


# --------------------------------------------------------------------------
# curves


RESAMPLE_GAP = 1e-3
RESAMPLE_BUDGET = 2_000_000


def _gap(system, a, b):
    d = np.abs(np.asarray(b) - np.asarray(a))
    if system.family in ("toral", "generalized"):
        d = np.minimum(d, system.period - d)
    return np.hypot(d[..., 0], d[..., 1])


def _signature(system, pts):
    """Which smooth piece of H each point sits in (band of y, band of F-image x)."""
    if system.family in ("toral", "generalized"):
        y = pts[..., 1]
        sy = np.full(y.shape, -1)
        for k, (lo, hi) in enumerate(system.p_bands):
            sy = np.where((y >= lo) & (y <= hi), k, sy)
        fx = system.F(pts)[..., 0]
        sx = np.full(y.shape, -1)
        for k, (lo, hi) in enumerate(system.q_bands):
            sx = np.where((fx >= lo) & (fx <= hi), k, sx)
        return sy * 4 + sx
    rp, _ = system._radii(pts)
    _, rm = system._radii(system.Phi(pts))
    a = (rp >= system.r0) & (rp <= system.r1)
    b = (rm >= system.r0) & (rm <= system.r1)
    return a.astype(int) * 2 + b.astype(int)


@dataclass(frozen=True)
class CurveGrowth:
    lengths: list
    pieces: int
    samples: int


def _iterate_curve(system, params, seed_fn, steps, forward=True, gap=RESAMPLE_GAP, budget=RESAMPLE_BUDGET):
    """Images of a parametrised seed curve under ``steps`` iterates, densely resampled."""
    pts = seed_fn(params)
    for _ in range(steps):
        pts = system.forward(pts) if forward else system.inverse(pts)
    while True:
        g = _gap(system, pts[:-1], pts[1:])
        bad = np.nonzero(g > gap)[0]
        if bad.size == 0:
            return params, pts
        if params.size + bad.size > budget:
            raise MemoryError("resampling budget exceeded")
        mids = 0.5 * (params[bad] + params[bad + 1])
        mp = seed_fn(mids)
        for _ in range(steps):
            mp = system.forward(mp) if forward else system.inverse(mp)
        params = np.insert(params, bad + 1, mids)
        pts = np.insert(pts, bad + 1, mp, axis=0)


def _polyline_seed(seed):
    seed = np.asarray(seed, dtype=float)
    seglen = np.hypot(*np.diff(seed, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seglen)])
    if cum[-1] <= 0:
        raise ValueError("seed segment must have positive length")
    s = cum / cum[-1]

    def seed_fn(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.interp(t, s, seed[:, 0]), np.interp(t, s, seed[:, 1])], axis=-1)

    return seed_fn, s


def curve_growth(system, seed_segment, steps: int, gap: float = RESAMPLE_GAP) -> CurveGrowth:
    """Length of the image of a polyline after 0..steps iterates, and the number of
    smooth pieces the final image splits into at the singular set."""
    seed_fn, knots = _polyline_seed(seed_segment)
    params = np.unique(np.concatenate([knots, np.linspace(0, 1, 65)]))
    lengths = []
    sig_history = None
    for n in range(steps + 1):
        params, pts = _iterate_curve(system, params, seed_fn, n, gap=gap)
        lengths.append(float(np.sum(_gap(system, pts[:-1], pts[1:]))))
    # cuts: where consecutive samples sit in different smooth pieces of some iterate
    pts = seed_fn(params)
    sig_history = np.zeros(params.shape, dtype=np.int64)
    for n in range(steps):
        sig_history = sig_history * 16 + _signature(system, pts)
        pts = system.forward(pts)
    pieces = 1 + int(np.count_nonzero(np.diff(sig_history)))
    return CurveGrowth(lengths, pieces, int(params.size))


# --------------------------------------------------------------------------
# intersections of unstable and stable segments


@dataclass(frozen=True)
class Intersection:
    n: int
    m: int
    point: tuple
    unstable_length: float
    stable_length: float


@dataclass(frozen=True)
class NotFound:
    budget: int
    skipped: int = 0


def _segment_crossings(system, P, Q):
    """First crossing between polylines P and Q on the torus (wrap-aware) or in the plane."""
    L = getattr(system, "period", None) if system.family in ("toral", "generalized") else None
    a0, a1 = P[:-1], P[1:]
    b0, b1 = Q[:-1], Q[1:]
    if L is not None:
        a1 = a0 + (a1 - a0 - L * np.round((a1 - a0) / L))
        b1 = b0 + (b1 - b0 - L * np.round((b1 - b0) / L))
    cell = max(float(np.max(_gap(system, P[:-1], P[1:]), initial=0)), float(np.max(_gap(system, Q[:-1], Q[1:]), initial=0)), 1e-6) * 2.0
    origin = getattr(system, "origin", 0.0) if L is not None else 0.0

    def keys(pts):
        rel = pts - origin
        if L is not None:
            rel = np.mod(rel, L)
        return np.floor(rel / cell).astype(np.int64)

    ka = keys(a0)
    kb = keys(b0)
    ncell = int(math.ceil(L / cell)) if L is not None else None
    buckets = {}
    for idx, (i, j) in enumerate(map(tuple, kb)):
        buckets.setdefault((i, j), []).append(idx)
    for ia, (i, j) in enumerate(map(tuple, ka)):
        cand = []
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                key = (i + di, j + dj)
                if ncell is not None:
                    key = (key[0] % ncell, key[1] % ncell)
                cand.extend(buckets.get(key, ()))
        if not cand:
            continue
        cand = np.asarray(cand)
        p0, p1 = a0[ia], a1[ia]
        q0, q1 = b0[cand], b1[cand]
        if L is not None:
            shift = L * np.round((q0 - p0) / L)
            q0, q1 = q0 - shift, q1 - shift
        r = p1 - p0
        s = q1 - q0
        denom = r[0] * s[:, 1] - r[1] * s[:, 0]
        qp = q0 - p0
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / denom
            u = (qp[:, 0] * r[1] - qp[:, 1] * r[0]) / denom
        hit = (denom != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
        if np.any(hit):
            k = int(np.argmax(hit))
            pt = p0 + t[k] * r
            if L is not None:
                pt = system.canonical(pt)
            return tuple(float(c) for c in pt)
    return None


def manifold_intersection_demo(system, point_a, point_b, budget: int = 20, half_length: float = 5e-3,
                               iterations: int = 40, gap: float = 1e-2, max_samples: int = 200_000):
    """Smallest n + m (within ``budget``) at which H^n of a short unstable segment at A
    crosses H^{-m} of a short stable segment at B.

    The images are polylines (the maps are piecewise affine), so a coarse
    resampling gap only has to resolve the corners.  Pairs whose images would
    need more than ``max_samples`` points are skipped and counted.
    """
    a = np.asarray(point_a, dtype=float)
    b = np.asarray(point_b, dtype=float)
    eu = unstable_direction_estimate(system, a, iterations).direction
    es = stable_direction_estimate(system, b, iterations).direction
    fu, _ = _polyline_seed(np.array([a - half_length * eu, a + half_length * eu]))
    fs, _ = _polyline_seed(np.array([b - half_length * es, b + half_length * es]))
    cache_u, cache_s = {}, {}
    skipped = 0

    def image(cache, fn, n, forward):
        if n not in cache:
            try:
                cache[n] = _iterate_curve(system, np.linspace(0, 1, 33), fn, n, forward=forward,
                                          gap=gap, budget=max_samples)[1]
            except MemoryError:
                cache[n] = None
        return cache[n]

    for total in range(budget + 1):
        for n in range(total + 1):
            m = total - n
            P = image(cache_u, fu, n, True)
            Q = image(cache_s, fs, m, False)
            if P is None or Q is None:
                skipped += 1
                continue
            hit = _segment_crossings(system, P, Q)
            if hit is not None:
                lu = float(np.sum(_gap(system, P[:-1], P[1:])))
                ls = float(np.sum(_gap(system, Q[:-1], Q[1:])))
                return Intersection(n, m, hit, lu, ls)
    return NotFound(budget, skipped)


# --------------------------------------------------------------------------
# measure of neighbourhoods of the singular set


@dataclass(frozen=True)
class SingularFit:
    exponent: float
    coefficient: float
    epsilons: tuple
    measures: tuple


def singular_neighborhood_measure(system, epsilons: Sequence[float], samples: int = 10 ** 6,
                                  seed_or_rng=0, iterates: int = 1) -> SingularFit:
    """Fraction of R within distance eps of s0 for each eps, and the fitted power law c1 eps^a."""
    eps = np.asarray(sorted(float(e) for e in epsilons))
    if eps.size < 3:
        raise ValueError("need at least three epsilon values")
    if eps[-1] / eps[0] < 10.0 - 1e-9:
        raise ValueError("epsilon values must span at least a decade")
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else np.random.default_rng(seed_or_rng)
    z = system.sample_uniform(rng, samples)
    d = system.singular_distance(z, iterates)
    counts = np.array([np.count_nonzero(d < e) for e in eps])
    if counts[0] < 100:
        raise ValueError("too few samples land in the smallest neighbourhood")
    meas = counts / samples
    slope, intercept = np.polyfit(np.log(eps), np.log(meas), 1)
    return SingularFit(float(slope), float(math.exp(intercept)), tuple(eps.tolist()), tuple(meas.tolist()))
