"""Conley-Moser horseshoe for the toral map G^k o F^j: the quadrilateral M,
its horizontal and vertical strips, symbolic coding on the invariant Cantor
set, periodic orbits and the constant hyperbolic splitting there.

All geometry is done with convex polygons in the unit square that contains
S = [x0, x1] x [y0, y1].  On each strip the map is affine, so strips, their
images and nested cylinders stay exact straight-edged polygons.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .twist_maps import ToralLTM, jacobian

GEOM_TOL = 1e-9
_TOUCH_AREA = 1e-15
_DEGENERATE_AREA = 1e-9
PERIODIC_TOL = 1e-9


class DegenerateIntersection(ValueError):
    """A strip intersection is too thin to be told apart from a tangency."""


class NotInLambda(ValueError):
    """The orbit leaves the union of the horizontal strips."""


class RefinementStagnation(RuntimeError):
    """Nested refinement or root polishing failed to reach the tolerance."""


# --------------------------------------------------------------------------
# convex polygons


def polygon_area(poly) -> float:
    """Signed area; positive for counter-clockwise vertex order."""
    p = np.asarray(poly, dtype=float)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _ccw(poly) -> np.ndarray:
    p = np.asarray(poly, dtype=float)
    return p[::-1].copy() if polygon_area(p) < 0 else p


def _dedupe(poly, tol: float = 1e-15) -> np.ndarray:
    out = []
    for v in poly:
        if not out or np.max(np.abs(v - out[-1])) > tol:
            out.append(v)
    while len(out) > 1 and np.max(np.abs(out[0] - out[-1])) <= tol:
        out.pop()
    return np.array(out).reshape(-1, 2)


def clip_halfplane(poly, a: float, b: float, c: float) -> np.ndarray:
    """Part of a convex polygon with a*x + b*y <= c (Sutherland-Hodgman step)."""
    p = np.asarray(poly, dtype=float)
    if len(p) == 0:
        return p.reshape(0, 2)
    vals = p @ np.array([a, b]) - c
    out = []
    n = len(p)
    for i in range(n):
        cur, nxt = p[i], p[(i + 1) % n]
        fc, fn = vals[i], vals[(i + 1) % n]
        if fc <= 0:
            out.append(cur)
        if (fc < 0 < fn) or (fn < 0 < fc):
            t = fc / (fc - fn)
            out.append(cur + t * (nxt - cur))
    return _dedupe(np.array(out).reshape(-1, 2))


def clip_convex(poly, window) -> np.ndarray:
    """Intersection of a convex polygon with a convex window."""
    w = _ccw(window)
    out = np.asarray(poly, dtype=float)
    for i in range(len(w)):
        p, q = w[i], w[(i + 1) % len(w)]
        d = q - p
        # left of p->q: cross(d, z - p) >= 0  <=>  d_y x - d_x y <= d_y p_x - d_x p_y
        out = clip_halfplane(out, d[1], -d[0], d[1] * p[0] - d[0] * p[1])
        if len(out) == 0:
            break
    return out


def polygon_contains(poly, point, eps: float = 1e-12) -> bool:
    w = _ccw(poly)
    z = np.asarray(point, dtype=float)
    for i in range(len(w)):
        p, q = w[i], w[(i + 1) % len(w)]
        d = q - p
        if d[0] * (z[1] - p[1]) - d[1] * (z[0] - p[0]) < -eps * math.hypot(d[0], d[1]):
            return False
    return True


def polygon_diameter(poly) -> float:
    p = np.asarray(poly, dtype=float)
    if len(p) < 2:
        return 0.0
    return float(max(np.linalg.norm(a - b) for a, b in itertools.combinations(p, 2)))


@dataclass(frozen=True, eq=False)
class Line:
    point: np.ndarray
    direction: np.ndarray

    def distance(self, z) -> float:
        d = self.direction / np.linalg.norm(self.direction)
        r = np.asarray(z, dtype=float) - self.point
        return float(abs(d[0] * r[1] - d[1] * r[0]))

    def intersect(self, other: "Line") -> np.ndarray:
        m = np.column_stack([self.direction, -other.direction])
        t = np.linalg.solve(m, other.point - self.point)
        return self.point + t[0] * self.direction


@dataclass(frozen=True, eq=False)
class AffinePiece:
    """z -> matrix @ z + offset, the branch of the map on one strip."""

    matrix: np.ndarray
    offset: np.ndarray

    def __call__(self, pts):
        return np.asarray(pts, dtype=float) @ self.matrix.T + self.offset

    def inverse(self) -> "AffinePiece":
        inv = np.linalg.inv(self.matrix)
        return AffinePiece(inv, -inv @ self.offset)


# --------------------------------------------------------------------------
# curves, strips and M


@dataclass(frozen=True, eq=False)
class LipschitzCurve:
    """Polyline graph over x (horizontal) or over y (vertical)."""

    vertices: np.ndarray
    lipschitz: float
    over: str = "x"

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        a, b = (0, 1) if self.over == "x" else (1, 0)
        v = v[np.argsort(v[:, a])]
        object.__setattr__(self, "vertices", v)
        d = np.diff(v, axis=0)
        if np.any(d[:, a] <= 0):
            raise ValueError("curve is not a graph over its parameter")
        if np.any(np.abs(d[:, b] / d[:, a]) > self.lipschitz * (1 + 1e-12)):
            raise ValueError("segment slope exceeds the Lipschitz bound")

    def line(self) -> Line:
        return Line(self.vertices[0], self.vertices[-1] - self.vertices[0])

    def value_gap(self, z) -> float:
        """Gap from z to the straight extension of the curve, measured along the graph axis."""
        a, b = (0, 1) if self.over == "x" else (1, 0)
        p, q = self.vertices[0], self.vertices[-1]
        t = (z[a] - p[a]) / (q[a] - p[a])
        return float(abs(z[b] - (p[b] + t * (q[b] - p[b]))))


@dataclass(frozen=True, eq=False)
class Strip:
    orientation: str
    polygon: np.ndarray
    lower: LipschitzCurve
    upper: LipschitzCurve
    width: float
    touches: frozenset

    @property
    def lower_left(self) -> tuple[float, float]:
        return float(self.polygon[:, 0].min()), float(self.polygon[:, 1].min())

    def contains(self, z, eps: float = 1e-12) -> bool:
        return polygon_contains(self.polygon, z, eps)

    def to_dict(self) -> dict:
        return {
            "orientation": self.orientation,
            "polygon": self.polygon.tolist(),
            "width": self.width,
            "boundary_slopes": [self.lower.lipschitz, self.upper.lipschitz],
        }


@dataclass(frozen=True, eq=False)
class QuadrilateralM:
    """The parallelogram bounded by the pieces of sigma_1, sigma_2, tau_1, tau_2.

    ``anchors`` are the construction corner points each boundary line starts
    from: (x0, y1) on sigma_1, (x1, y0) on sigma_2, (x0, y0) on tau_1 and
    (x1, y1) on tau_2.
    """

    vertices: np.ndarray
    edges: dict
    lines: dict
    anchors: dict

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    @property
    def diameter(self) -> float:
        return polygon_diameter(self.vertices)

    def slope(self, tag: str) -> float:
        d = self.lines[tag].direction
        return float(d[1] / d[0])

    def contains(self, z, eps: float = 1e-12) -> bool:
        return polygon_contains(self.vertices, z, eps)

    def tags_touched(self, poly, tol: float = GEOM_TOL) -> frozenset:
        return frozenset(t for t, ln in self.lines.items() if any(ln.distance(v) <= tol for v in poly))


def _check_config(config: ToralLTM) -> int:
    if not isinstance(config, ToralLTM):
        raise TypeError("the horseshoe is built for the toral map H_{j,k}")
    n = (config.j - 1) * (config.k - 1)
    if config.j < 2 or config.k < 2 or n < 2:
        raise ValueError(f"need j, k >= 2 and (j-1)(k-1) >= 2, got j={config.j}, k={config.k}")
    return n


def build_quadrilateral_M(config: ToralLTM) -> QuadrilateralM:
    _check_config(config)
    x0, x1, y0, y1, j, k = config.x0, config.x1, config.y0, config.y1, config.j, config.k
    h, w = y1 - y0, x1 - x0
    sigma_dir = np.array([float(j), -h])  # F^{-j} of a vertical segment in P
    tau_dir = np.array([w, float(k)])  # G^k of a horizontal segment in Q
    anchors = {
        "sigma1": np.array([x0, y1]),
        "sigma2": np.array([x1, y0]),
        "tau1": np.array([x0, y0]),
        "tau2": np.array([x1, y1]),
    }
    lines = {
        "sigma1": Line(anchors["sigma1"], sigma_dir),
        "sigma2": Line(anchors["sigma2"], sigma_dir),
        "tau1": Line(anchors["tau1"], tau_dir),
        "tau2": Line(anchors["tau2"], tau_dir),
    }
    corner = {(s, t): lines[s].intersect(lines[t]) for s in ("sigma1", "sigma2") for t in ("tau1", "tau2")}
    cycle = [("sigma2", "tau1"), ("sigma2", "tau2"), ("sigma1", "tau2"), ("sigma1", "tau1")]
    verts = np.array([corner[c] for c in cycle])
    tags = ["sigma2", "tau2", "sigma1", "tau1"]
    if polygon_area(verts) < 0:
        verts = verts[::-1].copy()
        cycle = cycle[::-1]
        tags = [tags[(-i - 2) % 4] for i in range(4)]
    edges = {}
    for i in range(4):
        a, b = cycle[i], cycle[(i + 1) % 4]
        common = (set(a) & set(b)).pop()
        edges[common] = (verts[i], verts[(i + 1) % 4])
    return QuadrilateralM(verts, edges, lines, anchors)


def return_matrix(config: ToralLTM) -> np.ndarray:
    """[[1, j alpha], [k beta, 1 + j k alpha beta]], the Jacobian on the strips."""
    a, b = config.j * config.alpha, config.k * config.beta
    return np.array([[1.0, a], [b, 1.0 + a * b]])


def _branch(config: ToralLTM, n: int, shift) -> AffinePiece:
    """G^k o F^j on points whose F^j-image lies in the n-th lift of Q, then shifted."""
    ja, kb = config.j * config.alpha, config.k * config.beta
    off = np.array([-ja * config.y0, -ja * kb * config.y0 - kb * (n + config.x0)]) + np.asarray(shift, float)
    return AffinePiece(return_matrix(config), off)


def _make_strip(poly, M: QuadrilateralM, orientation: str) -> Strip:
    poly = _ccw(poly)
    touches = M.tags_touched(poly)
    side_tags = ("tau1", "tau2") if orientation == "horizontal" else ("sigma1", "sigma2")
    n = len(poly)
    free = []
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        on_side = any(M.lines[t].distance(a) <= GEOM_TOL and M.lines[t].distance(b) <= GEOM_TOL for t in side_tags)
        if not on_side:
            free.append((a, b))
    if len(free) != 2:
        raise DegenerateIntersection(f"{orientation} strip has {len(free)} free edges instead of 2")
    over = "x" if orientation == "horizontal" else "y"
    a_ax, b_ax = (0, 1) if over == "x" else (1, 0)
    curves = []
    for a, b in free:
        d = b - a
        curves.append(LipschitzCurve(np.array([a, b]), abs(d[b_ax] / d[a_ax]), over))
    curves.sort(key=lambda c: c.vertices[:, b_ax].mean())
    lower, upper = curves
    width = max(
        max(upper.value_gap(v) for v in lower.vertices),
        max(lower.value_gap(v) for v in upper.vertices),
    )
    return Strip(orientation, poly, lower, upper, float(width), touches)


@dataclass(frozen=True, eq=False)
class StripFamily:
    """H_i and V_i = H(H_i) with the affine branch carrying one onto the other.

    Symbols 1..N follow the lexicographic order of the lower-left corners of
    the bounding boxes of the horizontal strips.
    """

    horizontal: tuple
    vertical: tuple
    branches: tuple

    @property
    def N(self) -> int:
        return len(self.horizontal)


def extract_strips(M: QuadrilateralM, config: ToralLTM) -> StripFamily:
    N = _check_config(config)
    ja = config.j * config.alpha
    xs = M.vertices[:, 0] + ja * (M.vertices[:, 1] - config.y0)
    found = []
    for n in range(math.floor(xs.min() - config.x1), math.ceil(xs.max() - config.x0) + 1):
        piece = clip_halfplane(M.vertices, 1.0, ja, config.x1 + n + ja * config.y0)
        piece = clip_halfplane(piece, -1.0, -ja, -(config.x0 + n + ja * config.y0))
        if len(piece) < 3 or abs(polygon_area(piece)) <= _TOUCH_AREA:
            continue
        base = _branch(config, n, (0.0, 0.0))
        img = base(piece)
        lo_a = math.ceil(M.vertices[:, 0].min() - img[:, 0].max()) - 1
        hi_a = math.floor(M.vertices[:, 0].max() - img[:, 0].min()) + 1
        lo_b = math.ceil(M.vertices[:, 1].min() - img[:, 1].max()) - 1
        hi_b = math.floor(M.vertices[:, 1].max() - img[:, 1].min()) + 1
        for a in range(lo_a, hi_a + 1):
            for b in range(lo_b, hi_b + 1):
                v = clip_convex(img + np.array([a, b]), M.vertices)
                area = abs(polygon_area(v)) if len(v) >= 3 else 0.0
                if area <= _TOUCH_AREA:
                    continue
                if area < _DEGENERATE_AREA * M.area:
                    raise DegenerateIntersection(f"sliver of area {area:.3g} in M n H(M)")
                br = _branch(config, n, (a, b))
                found.append((br.inverse()(v), v, br))
    if len(found) != N:
        raise DegenerateIntersection(f"expected {N} strips, found {len(found)}")
    hs = [_make_strip(h, M, "horizontal") for h, _, _ in found]
    vs = [_make_strip(v, M, "vertical") for _, v, _ in found]
    order = sorted(range(N), key=lambda i: hs[i].lower_left)
    return StripFamily(
        tuple(hs[i] for i in order), tuple(vs[i] for i in order), tuple(found[i][2] for i in order)
    )


# --------------------------------------------------------------------------
# Conley-Moser conditions


@dataclass(frozen=True)
class ConleyMoserReport:
    cond1: bool
    cond2: bool
    cond3: bool
    mvmh: float
    mh: float
    mv: float
    nh: float
    nv: float
    measured_nh: float
    measured_nv: float
    boundary_error: float
    strips_only_touch_own_sides: bool

    @property
    def all_pass(self) -> bool:
        return self.cond1 and self.cond2 and self.cond3

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["all_pass"] = self.all_pass
        return d


def _wrapped_gap(a, b) -> np.ndarray:
    d = np.asarray(a, float) - np.asarray(b, float)
    return d - np.round(d)


def _segment_distance(z, a, b) -> float:
    """Distance on the torus from z to the segment [a, b]."""
    best = math.inf
    for s in itertools.product((-1, 0, 1), repeat=2):
        q = np.asarray(z, float) + np.array(s)
        d = b - a
        t = float(np.clip(np.dot(q - a, d) / np.dot(d, d), 0.0, 1.0))
        best = min(best, float(np.linalg.norm(q - (a + t * d))))
    return best


def verify_conley_moser(M: QuadrilateralM, strips: StripFamily, config: ToralLTM,
                        samples: int = 17) -> ConleyMoserReport:
    N = strips.N
    mh = max(max(s.lower.lipschitz, s.upper.lipschitz) for s in strips.horizontal)
    mv = max(max(s.lower.lipschitz, s.upper.lipschitz) for s in strips.vertical)
    mvmh = mh * mv
    cond1 = bool(0.0 <= mvmh < 1.0)

    # boundaries of H_i pushed through the actual torus map land on those of V_i
    err = 0.0
    for hs, vs in zip(strips.horizontal, strips.vertical):
        for src, dst in ((hs.lower, vs), (hs.upper, vs)):
            targets = [M.edges["sigma1"], M.edges["sigma2"]]
            for t in np.linspace(0.0, 1.0, samples):
                z = src.vertices[0] + t * (src.vertices[-1] - src.vertices[0])
                img = config.forward_point(z)
                err = max(err, min(_segment_distance(img, a, b) for a, b in targets))
        for side in ("tau1", "tau2"):
            a, b = [v for v in hs.polygon if M.lines[side].distance(v) <= GEOM_TOL][:2]
            for t in np.linspace(0.0, 1.0, samples):
                img = config.forward_point(a + t * (b - a))
                err = max(err, min(_segment_distance(img, c.vertices[0], c.vertices[-1]) for c in (vs.lower, vs.upper)))
        mapped = strips.branches[strips.horizontal.index(hs)](hs.polygon)
        for v in mapped:
            err = max(err, min(float(np.linalg.norm(v - u)) for u in vs.polygon))
    sides_ok = all(s.touches == frozenset({"tau1", "tau2"}) for s in strips.horizontal) and all(
        s.touches == frozenset({"sigma1", "sigma2"}) for s in strips.vertical
    )
    disjoint = all(
        len(clip_convex(a.polygon, b.polygon)) < 3 or abs(polygon_area(clip_convex(a.polygon, b.polygon))) <= _TOUCH_AREA
        for fam in (strips.horizontal, strips.vertical)
        for a, b in itertools.combinations(fam, 2)
    )
    cond2 = err <= GEOM_TOL and sides_ok and disjoint

    # one refinement level: H^{-1}(H_i') n H_i and H(V_i') n V_i
    nh = nv = 1.0 / N
    ratio_h = ratio_v = 0.0
    strips_ok = True
    for i, br in enumerate(strips.branches):
        inv = br.inverse()
        for parent_h, parent_v in zip(strips.horizontal, strips.vertical):
            sub = clip_convex(parent_h.polygon, strips.vertical[i].polygon)
            sub_v = clip_convex(parent_v.polygon, strips.horizontal[i].polygon)
            try:
                th = _make_strip(inv(sub), M, "horizontal")
                tv = _make_strip(br(sub_v), M, "vertical")
            except (DegenerateIntersection, ValueError):
                strips_ok = False
                continue
            strips_ok &= th.lower.lipschitz <= mh * (1 + 1e-9) and tv.lower.lipschitz <= mv * (1 + 1e-9)
            ratio_h = max(ratio_h, th.width / parent_h.width)
            ratio_v = max(ratio_v, tv.width / parent_v.width)
    cond3 = strips_ok and ratio_h <= nh + GEOM_TOL and ratio_v <= nv + GEOM_TOL
    return ConleyMoserReport(cond1, cond2, cond3, mvmh, mh, mv, nh, nv, ratio_h, ratio_v, err, sides_ok)


# --------------------------------------------------------------------------
# symbolic coding


@dataclass(frozen=True)
class SymbolSequence:
    """Symbols s_t for t = start, ..., start + len - 1; ``periodic`` marks a cyclic word."""

    symbols: tuple
    alphabet: int
    start: int = 0
    periodic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if not self.symbols:
            raise ValueError("empty symbol window")
        if any(not 1 <= s <= self.alphabet for s in self.symbols):
            raise ValueError(f"symbols must lie in 1..{self.alphabet}")

    @classmethod
    def cyclic(cls, word: Sequence[int], alphabet: int) -> "SymbolSequence":
        return cls(tuple(word), alphabet, 0, True)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def stop(self) -> int:
        return self.start + len(self.symbols)

    def at(self, t: int) -> int:
        if self.periodic:
            return self.symbols[(t - self.start) % len(self.symbols)]
        if not self.start <= t < self.stop:
            raise IndexError(f"index {t} outside the window")
        return self.symbols[t - self.start]

    def window(self, lo: int, hi: int) -> "SymbolSequence":
        return SymbolSequence(tuple(self.at(t) for t in range(lo, hi)), self.alphabet, lo, False)

    def shift(self) -> "SymbolSequence":
        """The left shift: s'_t = s_{t+1}."""
        return SymbolSequence(self.symbols, self.alphabet, self.start - 1, self.periodic)


@dataclass(frozen=True, eq=False)
class Horseshoe:
    config: ToralLTM
    M: QuadrilateralM
    strips: StripFamily

    @property
    def N(self) -> int:
        return self.strips.N

    def symbol_of(self, z, eps: float = 1e-12) -> Optional[int]:
        z = np.asarray(z, float) % 1.0
        for i, s in enumerate(self.strips.horizontal):
            if s.contains(z, eps):
                return i + 1
        return None


@functools.lru_cache(maxsize=32)
def build_horseshoe(config: ToralLTM) -> Horseshoe:
    M = build_quadrilateral_M(config)
    return Horseshoe(config, M, extract_strips(M, config))


def _as_horseshoe(obj) -> Horseshoe:
    return obj if isinstance(obj, Horseshoe) else build_horseshoe(obj)


def itinerary(system: Union[Horseshoe, ToralLTM], point, length: int, backward: int = 0) -> SymbolSequence:
    """Symbols s_{-backward}, ..., s_{length-1} with H^t(point) in H_{s_t}."""
    hs = _as_horseshoe(system)
    if length < 1 or backward < 0:
        raise ValueError("need length >= 1 and backward >= 0")
    syms = []
    z = tuple(float(c) for c in point)
    for t in range(length):
        s = hs.symbol_of(z)
        if s is None:
            raise NotInLambda(f"orbit leaves the horizontal strips at iterate {t}")
        syms.append(s)
        z = hs.config.forward_point(z)
    back = []
    z = tuple(float(c) for c in point)
    for t in range(1, backward + 1):
        z = hs.config.inverse_point(z)
        s = hs.symbol_of(z)
        if s is None:
            raise NotInLambda(f"orbit leaves the horizontal strips at iterate {-t}")
        back.append(s)
    return SymbolSequence(tuple(back[::-1] + syms), hs.N, -backward, False)


@dataclass(frozen=True, eq=False)
class Cylinder:
    polygon: np.ndarray
    center: np.ndarray
    diameter: float
    area: float


def _cylinder_polygon(hs: Horseshoe, seq: SymbolSequence, lo: int, hi: int) -> np.ndarray:
    st = hs.strips
    region = None
    for t in range(hi - 1, max(lo, 0) - 1, -1):
        i = seq.at(t) - 1
        if region is None:
            region = st.horizontal[i].polygon
        else:
            region = st.branches[i].inverse()(clip_convex(region, st.vertical[i].polygon))
        if len(region) < 3:
            return np.zeros((0, 2))
    back = None
    for t in range(lo, min(hi, 0)):
        i = seq.at(t) - 1
        if back is None:
            back = st.vertical[i].polygon
        else:
            back = st.branches[i](clip_convex(back, st.horizontal[i].polygon))
        if len(back) < 3:
            return np.zeros((0, 2))
    if region is None:
        return back
    if back is None:
        return region
    return clip_convex(region, back)


def locate(system: Union[Horseshoe, ToralLTM], sequence: SymbolSequence) -> Cylinder:
    """The cylinder of points whose itinerary matches the window of ``sequence``."""
    hs = _as_horseshoe(system)
    if sequence.alphabet != hs.N:
        raise ValueError(f"sequence alphabet {sequence.alphabet} differs from N = {hs.N}")
    poly = _cylinder_polygon(hs, sequence, sequence.start, sequence.stop)
    area = abs(polygon_area(poly)) if len(poly) >= 3 else 0.0
    if area == 0.0:
        raise RefinementStagnation("cylinder collapsed below floating-point resolution")
    return Cylinder(poly, poly.mean(axis=0), polygon_diameter(poly), area)


# --------------------------------------------------------------------------
# periodic orbits


def _periodic_residual(config: ToralLTM, z, p: int) -> np.ndarray:
    w = tuple(float(c) for c in z)
    for _ in range(p):
        w = config.forward_point(w)
    return _wrapped_gap(w, z)


def periodic_point(sequence: SymbolSequence, system: Union[Horseshoe, ToralLTM],
                   depth: int = 40, tol: float = PERIODIC_TOL) -> np.ndarray:
    """Point of period len(sequence) whose itinerary repeats the cyclic word.

    The nested cylinder of the periodically extended window is refined one
    symbol at a time (alternating future and past) until it is below 1e-11
    across, cannot be refined further in double precision, or ``depth``
    symbols are used.  Newton steps on H^p(z) - z then polish the centre, and
    a scan of neighbouring floating-point values picks the smallest residual.
    """
    hs = _as_horseshoe(system)
    word = tuple(sequence.symbols)
    p = len(word)
    seq = SymbolSequence.cyclic(word, hs.N)
    lo, hi = 0, 1
    poly = _cylinder_polygon(hs, seq, lo, hi)
    for used in range(1, depth):
        nlo, nhi = (lo, hi + 1) if used % 2 else (lo - 1, hi)
        nxt = _cylinder_polygon(hs, seq, nlo, nhi)
        if len(nxt) < 3 or polygon_area(nxt) == 0.0:
            break
        poly, lo, hi = nxt, nlo, nhi
        if polygon_diameter(poly) < 1e-11:
            break
    if len(poly) < 3:
        raise RefinementStagnation("empty cylinder for the requested word")
    z = poly.mean(axis=0)
    cfg = hs.config
    for _ in range(8):
        r = _periodic_residual(cfg, z, p)
        if np.max(np.abs(r)) < 1e-15:
            break
        jac = jacobian(cfg, z, p)
        if not jac.defined:
            raise RefinementStagnation(f"orbit meets the singular set ({jac.reason})")
        z = z - np.linalg.solve(jac.matrix - np.eye(2), r)
    best, best_r = z, float(np.linalg.norm(_periodic_residual(cfg, z, p)))
    ulps = [np.spacing(c) for c in z]
    for dx, dy in itertools.product(range(-3, 4), repeat=2):
        cand = z + np.array([dx * ulps[0], dy * ulps[1]])
        r = float(np.linalg.norm(_periodic_residual(cfg, cand, p)))
        if r < best_r:
            best, best_r = cand, r
    if best_r >= tol:
        raise RefinementStagnation(f"periodic residual {best_r:.3g} above {tol:g}")
    got = itinerary(hs, best, p)
    if got.symbols != word:
        raise RefinementStagnation(f"itinerary {got.symbols} does not match the word {word}")
    return best


def primitive_words(alphabet: int, period: int) -> list[tuple]:
    """One representative (least rotation) of every primitive cyclic word."""
    out = []
    for w in itertools.product(range(1, alphabet + 1), repeat=period):
        rots = [w[i:] + w[:i] for i in range(period)]
        if w == min(rots) and len(set(rots)) == period:
            out.append(w)
    return out


# --------------------------------------------------------------------------
# hyperbolic splitting on the invariant set


@dataclass(frozen=True, eq=False)
class HyperbolicSplitting:
    lambda_plus: float
    lambda_minus: float
    v_plus: np.ndarray
    v_minus: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        if not self.lambda_plus > 1.0:
            raise ValueError("expanding eigenvalue must exceed 1")
        if abs(self.lambda_plus * self.lambda_minus - 1.0) > 1e-12:
            raise ValueError("eigenvalues of an area-preserving matrix multiply to 1")


def hyperbolic_splitting(config: ToralLTM) -> HyperbolicSplitting:
    """Eigen-structure of [[1, j alpha], [k beta, 1 + j k alpha beta]].

    The trace is 2 + j k alpha beta, so the eigenvalues are the roots of
    l^2 - (2 + jk alpha beta) l + 1; eigenvectors are (j alpha, l - 1).
    """
    A = return_matrix(config)
    s = config.j * config.k * config.alpha * config.beta
    if not s > 0:
        raise ValueError("j k alpha beta must be positive for real distinct eigenvalues")
    tr = 2.0 + s
    lp = 0.5 * (tr + math.sqrt(tr * tr - 4.0))
    lm = 1.0 / lp
    ja = config.j * config.alpha
    return HyperbolicSplitting(lp, lm, np.array([ja, lp - 1.0]), np.array([ja, lm - 1.0]), A)


def eigenvalues_2x2(matrix, det: Optional[float] = None) -> tuple[float, float]:
    """Real eigenvalues (larger, smaller) of a 2x2 matrix without cancellation.

    The small root is det / large root, so it keeps full relative accuracy even
    when the entries are large; pass ``det`` when it is known exactly.
    """
    m = np.asarray(matrix, dtype=float)
    tr = float(m[0, 0] + m[1, 1])
    d = float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) if det is None else float(det)
    disc = tr * tr - 4.0 * d
    if disc < 0:
        raise ValueError("complex eigenvalues")
    big = 0.5 * (tr + math.copysign(math.sqrt(disc), tr))
    small = d / big
    return (big, small) if abs(big) >= abs(small) else (small, big)


@dataclass(frozen=True)
class UniformHyperbolicityReport:
    jacobian_error: float
    invariance_error: float
    rate_error: float
    points: int

    @property
    def holds(self) -> bool:
        return self.jacobian_error <= 1e-12 and self.invariance_error <= 1e-12 and self.rate_error <= 1e-12


def uniform_hyperbolicity_check(system: Union[Horseshoe, ToralLTM], points) -> UniformHyperbolicityReport:
    """At each point the Jacobian equals the constant matrix A, and A v_- = l_- v_-,
    A v_+ = l_+ v_+ with |A v_s| = l_- |v_s| and |A^-1 v_u| = l_- |v_u|.

    These one-step identities give the n-step ones by induction, so the
    splitting is uniformly hyperbolic with constant 1 and rate l_-.
    """
    hs = _as_horseshoe(system)
    points = [tuple(float(c) for c in z) for z in points]
    sp = hyperbolic_splitting(hs.config)
    A = sp.matrix
    jac_err = 0.0
    scale = np.max(np.abs(A))
    for z in points:
        mat, reason = hs.config.step_jacobian(z)
        if mat is None:
            raise NotInLambda(f"point meets the singular set ({reason})")
        jac_err = max(jac_err, float(np.max(np.abs(mat - A))) / scale)
    us, uu = sp.v_minus / np.linalg.norm(sp.v_minus), sp.v_plus / np.linalg.norm(sp.v_plus)
    inv_err = max(
        float(np.linalg.norm(A @ us - sp.lambda_minus * us)) / scale,
        float(np.linalg.norm(A @ uu - sp.lambda_plus * uu)) / (scale * sp.lambda_plus),
    )
    Ainv = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]])
    rate_err = max(
        abs(np.linalg.norm(A @ us) - sp.lambda_minus) / scale,
        abs(np.linalg.norm(Ainv @ uu) - sp.lambda_minus) / scale,
    )
    return UniformHyperbolicityReport(jac_err, inv_err, float(rate_err), len(points))
