"""Jacobi elliptic functions and the complete elliptic integral of the first kind.

Everything here is computed with the arithmetic-geometric mean (the descending
Landen ladder).  The parameter called ``k`` is always the *modulus*, so the
"parameter" in the Abramowitz-Stegun sense is ``m = k**2``.  The default
modulus used by the sphere embedding is ``sqrt(2)/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SPHERE_MODULUS = math.sqrt(2.0) / 2.0

_AGM_TOL = 2.0 ** -54
_MAX_LADDER = 40


@dataclass(frozen=True)
class EllipticTriple:
    sn: float
    cn: float
    dn: float


def _check_modulus(k: float) -> float:
    k = float(k)
    if not (0.0 < k < 1.0) or not math.isfinite(k):
        raise ValueError(f"modulus k must lie in (0, 1), got {k!r}")
    return k


@lru_cache(maxsize=64)
def _ladder(k: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """AGM sequences a_n and c_n for modulus k (b_0 is the complementary modulus)."""
    a, b, c = 1.0, math.sqrt((1.0 - k) * (1.0 + k)), k
    a_seq, c_seq = [a], [c]
    for _ in range(_MAX_LADDER):
        if abs(c) <= _AGM_TOL * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return tuple(a_seq), tuple(c_seq)


def complete_elliptic_K(k: float) -> float:
    """Quarter period K(k) = integral over [0, pi/2] of (1 - k^2 sin^2 t)^(-1/2)."""
    k = _check_modulus(k)
    a_seq, _ = _ladder(k)
    return math.pi / (2.0 * a_seq[-1])


def _amplitude_reduced(t: np.ndarray, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude phi_0 and the first ladder angle phi_1 for already-reduced t."""
    a_seq, c_seq = _ladder(k)
    n = len(a_seq) - 1
    phi = (2.0 ** n) * a_seq[n] * t
    phi_prev = phi
    for i in range(n, 0, -1):
        phi_prev = phi
        phi = 0.5 * (phi + np.arcsin(c_seq[i] / a_seq[i] * np.sin(phi)))
    return phi, phi_prev


def _reduce(t, k: float):
    period = 4.0 * complete_elliptic_K(k)
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("argument must be finite")
    turns = np.round(t / period)
    return t - turns * period, turns


def amplitude(t, k: float = SPHERE_MODULUS):
    """Jacobi amplitude am(t, k); continuous and increasing, am(t + 4K) = am(t) + 2 pi."""
    k = _check_modulus(k)
    scalar = np.ndim(t) == 0
    tr, turns = _reduce(t, k)
    phi, _ = _amplitude_reduced(tr, k)
    out = phi + 2.0 * math.pi * turns
    return float(out) if scalar else out


def sncndn(t, k: float = SPHERE_MODULUS):
    """Vectorised (sn, cn, dn); returns floats for scalar input, arrays otherwise."""
    k = _check_modulus(k)
    scalar = np.ndim(t) == 0
    tr, _ = _reduce(t, k)
    phi0, phi1 = _amplitude_reduced(tr, k)
    sn = np.sin(phi0)
    cn = np.cos(phi0)
    with np.errstate(divide="ignore", invalid="ignore"):
        dn = cn / np.cos(phi1 - phi0)
    # The ratio is 0/0 at the quarter period; fall back to the identity there.
    near = np.abs(cn) < 0.05
    if np.any(near):
        dn = np.where(near, np.sqrt(1.0 - (k * sn) ** 2), dn)
    if scalar:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn


def jacobi_elliptic(t: float, k: float = SPHERE_MODULUS) -> EllipticTriple:
    """sn, cn, dn at a single argument."""
    sn, cn, dn = sncndn(float(t), k)
    return EllipticTriple(sn, cn, dn)


def inverse_amplitude(phi, k: float = SPHERE_MODULUS, tol: float = 1e-10):
    """Solve am(t, k) = phi for t by Newton iteration (am' = dn >= k' > 0).

    Convergence is quadratic, so stopping once the last correction is below
    ``tol`` leaves an error of order tol**2.
    """
    k = _check_modulus(k)
    scalar = np.ndim(phi) == 0
    phi = np.asarray(phi, dtype=float)
    K = complete_elliptic_K(k)
    kp = math.sqrt(1.0 - k * k)
    t = phi * (2.0 * K / math.pi)
    for _ in range(50):
        tr, turns = _reduce(t, k)
        phi0, phi1 = _amplitude_reduced(tr, k)
        am = phi0 + 2.0 * math.pi * turns
        dn = np.sqrt(1.0 - (k * np.sin(phi0)) ** 2)
        step = (am - phi) / np.maximum(dn, kp)
        t = t - step
        if np.all(np.abs(step) <= tol):
            break
    else:
        raise ArithmeticError("inverse amplitude did not converge")
    return float(t) if scalar else t
