"""The torus-to-sphere quotient E, its chart inverses, the involution J and
the checks that the four-annulus toral map covers the sphere map."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .phase_spaces import EPS_BOUNDARY
from .special_functions import SPHERE_MODULUS, complete_elliptic_K, inverse_amplitude, sncndn

_K_DEFAULT = complete_elliptic_K(SPHERE_MODULUS)


def embed_E(x, y, K: Optional[float] = None):
    """E(x, y) = (sn x dn y, cn x cn y, dn x sn y); shape (..., 3)."""
    del K  # E depends only on the modulus; K is accepted for a uniform signature
    snx, cnx, dnx = sncndn(x, SPHERE_MODULUS)
    sny, cny, dny = sncndn(y, SPHERE_MODULUS)
    return np.stack(np.broadcast_arrays(snx * dny, cnx * cny, dnx * sny), axis=-1)


def E_partials(x, y, K: Optional[float] = None):
    """The two partial derivatives of E, each of shape (..., 3)."""
    k2 = SPHERE_MODULUS ** 2
    snx, cnx, dnx = sncndn(x, SPHERE_MODULUS)
    sny, cny, dny = sncndn(y, SPHERE_MODULUS)
    ex = np.stack([cnx * dnx * dny, -snx * dnx * cny, -k2 * snx * cnx * sny], axis=-1)
    ey = np.stack([-k2 * snx * sny * cny, -cnx * sny * dny, dnx * cny * dny], axis=-1)
    return ex, ey


def _invert_C(u, v, w):
    """Preimage of (u, v, w) under E restricted to S^1 x (-K, K)."""
    s, t = v, w
    b = 2.0 * t * t + s * s - 1.0
    root = np.sqrt(b * b + 4.0 * s * s)
    with np.errstate(divide="ignore", invalid="ignore"):
        # the two algebraically equal roots; pick the one free of cancellation
        X = np.where(b >= 0.0, 0.5 * (b + root), np.where(root - b > 0.0, 2.0 * s * s / (root - b), 0.0))
    X = np.clip(X, 0.0, 1.0)
    Y = np.clip(2.0 * t * t / (1.0 + X), 0.0, 1.0)
    dn_y = np.sqrt(1.0 - 0.5 * Y)
    dn_x = np.sqrt(0.5 * (1.0 + X))
    sn_x = np.clip(u / dn_y, -1.0, 1.0)
    cn_x = np.where(s < 0.0, -1.0, 1.0) * np.sqrt(X)
    sn_y = np.clip(w / dn_x, -1.0, 1.0)
    cn_y = np.sqrt(1.0 - Y)
    x = inverse_amplitude(np.arctan2(sn_x, cn_x), SPHERE_MODULUS)
    y = inverse_amplitude(np.arctan2(sn_y, cn_y), SPHERE_MODULUS)
    return x, y


def invert_E_on_chart(p, chart: str, K: Optional[float] = None):
    """(x, y) with E(x, y) = p, taken from the chart C = S^1 x (-K, K) or C' = (-K, K) x S^1.

    On C the cn-value of x comes from a quadratic in cn^2(x) and the sn-value
    of y from sn^2(y) = 2w^2 / (1 + cn^2(x)); C' is the same construction with
    the roles of u and w exchanged.
    """
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError("sphere points have three components")
    if np.any(np.abs(np.sum(p * p, axis=-1) - 1.0) > 1e-8):
        raise ValueError("point is not on the unit sphere")
    u, v, w = p[..., 0], p[..., 1], p[..., 2]
    if chart == "C":
        x, y = _invert_C(u, v, w)
    elif chart in ("Cprime", "C'"):
        y, x = _invert_C(w, v, u)
    else:
        raise ValueError("chart must be 'C' or 'Cprime'")
    if np.ndim(x) == 0:
        return float(x), float(y)
    return x, y


def involution_J(x, y, K: float = _K_DEFAULT):
    """J(x, y) = (2K - x, 2K - y)."""
    return 2.0 * K - np.asarray(x, dtype=float), 2.0 * K - np.asarray(y, dtype=float)


def map_N(x, y, x0: float, y0: float):
    """N(x, y) = (x0/y0 * y, x), carrying C = S^1 x [-y0, y0] onto C' = [-x0, x0] x S^1."""
    return (x0 / y0) * np.asarray(y, dtype=float), np.asarray(x, dtype=float)


def map_N_det(x0: float, y0: float) -> float:
    return -x0 / y0


def immersion_det(x, y):
    """-sn x dn y (dn^2 x cn^2 y + 1/2 cn^2 x sn^2 y), the (v, w) minor of DE."""
    snx, cnx, dnx = sncndn(x, SPHERE_MODULUS)
    sny, cny, dny = sncndn(y, SPHERE_MODULUS)
    return -snx * dny * (dnx ** 2 * cny ** 2 + 0.5 * cnx ** 2 * sny ** 2)


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    argmax: tuple
    samples: int
    rejected: int


def semiconjugacy_residual(system, samples: int, seed_or_rng) -> ResidualReport:
    """max over uniform z in R of |E(H z) - Theta(E z)| (chordal distance).

    ``system`` is a SphereLTM; H is its covering four-annulus map.  Samples
    within the boundary tolerance of the singular set are discarded.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else np.random.default_rng(seed_or_rng)
    torus = system.torus_system()
    z = torus.sample_uniform(rng, samples)
    keep = torus.singular_distance(z, 1) > EPS_BOUNDARY
    z = z[keep]
    hz = torus.forward(z)
    lhs = embed_E(hz[:, 0], hz[:, 1])
    rhs = system.forward(embed_E(z[:, 0], z[:, 1]))
    res = np.linalg.norm(lhs - rhs, axis=-1)
    i = int(np.argmax(res))
    return ResidualReport(float(res[i]), tuple(float(c) for c in z[i]), int(keep.sum()), int((~keep).sum()))


@dataclass(frozen=True)
class InvolutionReport:
    e_of_j: float
    j_of_f: float
    samples: int


def involution_residuals(system, samples: int, seed_or_rng) -> InvolutionReport:
    """max |E(J z) - E(z)| over uniform z on the torus and the largest circle
    distance between J(F(z)) and F(J(z)) over uniform z in P0."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else np.random.default_rng(seed_or_rng)
    torus = system.torus_system()
    K, L = torus.K, torus.period
    z = torus.origin + L * rng.random((samples, 2))
    jx, jy = involution_J(z[:, 0], z[:, 1], K)
    e_err = np.linalg.norm(embed_E(jx, jy) - embed_E(z[:, 0], z[:, 1]), axis=-1).max()
    p0 = np.column_stack([torus.origin + L * rng.random(samples), rng.uniform(-torus.y0, torus.y0, samples)])
    jf = np.stack(involution_J(*torus.F(p0).T, K), axis=-1)
    fj = torus.F(np.stack(involution_J(p0[:, 0], p0[:, 1], K), axis=-1))
    d = np.mod(jf - fj, L)
    f_err = np.minimum(d, L - d).max()
    return InvolutionReport(float(e_err), float(f_err), samples)


@dataclass(frozen=True)
class SphereCap:
    """{p : p . axis >= height}."""

    axis: tuple
    height: float

    def __call__(self, p):
        a = np.asarray(self.axis, dtype=float)
        return np.asarray(p, dtype=float) @ (a / np.linalg.norm(a)) >= self.height


@dataclass(frozen=True)
class PreservationReport:
    measure: float
    image_measure: float
    discrepancy: float
    std_error: float
    samples: int

    @property
    def within_3sigma(self) -> bool:
        return self.discrepancy <= 3.0 * self.std_error


def pushforward_preservation(system, region: Callable, samples: int, seed_or_rng) -> PreservationReport:
    """Monte-Carlo comparison of the pushforward measure of a region and of its image.

    Samples z are uniform in R and p = E(z) is distributed by the pushforward
    measure.  p lies in Theta(B) exactly when Theta^{-1}(p) lies in B, so both
    estimates come from the same sample stream and the standard error is that
    of the paired difference.
    """
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else np.random.default_rng(seed_or_rng)
    torus = system.torus_system()
    z = torus.sample_uniform(rng, samples)
    p = embed_E(z[:, 0], z[:, 1])
    pb = system.inverse(p)
    a = np.asarray(region(p), dtype=float)
    b = np.asarray(region(pb), dtype=float)
    if a.sum() == 0:
        raise ValueError("region has estimated measure zero")
    diff = a - b
    se = float(diff.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("inf")
    return PreservationReport(float(a.mean()), float(b.mean()), float(abs(diff.mean())), se, samples)
