"""Membership and boundary classification for the tetrablock and the
symmetrized bidisc.

A point ``(x1, x2, x3)`` lies in the open tetrablock iff ``|x3| < 1`` and the
unique pair

    beta1 = (x1 - conj(x2) x3) / (1 - |x3|^2)
    beta2 = (x2 - conj(x1) x3) / (1 - |x3|^2)

has ``|beta1| + |beta2| < 1``; the closure uses ``<=``. The distinguished
boundary is the part of the closure with ``|x3| = 1``, equivalently
``x1 = conj(x2) x3``, ``|x3| = 1``, ``|x2| <= 1``.
"""

from __future__ import annotations

import cmath
import enum
import math
from typing import NamedTuple

import numpy as np

from .errors import TetrablockError

BAND = 1e-9
_EPS = np.finfo(float).eps


class RegionTag(str, enum.Enum):
    INTERIOR = "Interior"
    DISTINGUISHED_BOUNDARY = "DistinguishedBoundary"
    OTHER_TOP_BOUNDARY = "OtherTopBoundary"
    CLOSURE_INTERIOR_FACE = "ClosureInteriorFace"
    OUTSIDE = "Outside"

    def __str__(self) -> str:
        return self.value


CLOSURE_TAGS = frozenset(
    {
        RegionTag.INTERIOR,
        RegionTag.DISTINGUISHED_BOUNDARY,
        RegionTag.OTHER_TOP_BOUNDARY,
        RegionTag.CLOSURE_INTERIOR_FACE,
    }
)


class TetraPoint(NamedTuple):
    x1: complex
    x2: complex
    x3: complex


class BetaPair(NamedTuple):
    beta1: complex
    beta2: complex


class GammaPoint(NamedTuple):
    s: complex
    p: complex


def in_closure(tag: RegionTag) -> bool:
    return tag in CLOSURE_TAGS


def _point(pt) -> TetraPoint:
    x1, x2, x3 = (complex(v) for v in pt)
    return TetraPoint(x1, x2, x3)


def beta_decompose(pt, tol: float = BAND) -> BetaPair:
    x1, x2, x3 = _point(pt)
    r = abs(x3)
    if r >= 1.0 - tol:
        raise TetrablockError(f"beta undefined on |x3|=1 (|x3| = {r!r})")
    den = 1.0 - r * r
    return BetaPair((x1 - x2.conjugate() * x3) / den, (x2 - x1.conjugate() * x3) / den)


def beta_compose(beta1: complex, beta2: complex, x3: complex) -> TetraPoint:
    """Inverse of :func:`beta_decompose` for fixed ``x3``."""
    beta1, beta2, x3 = complex(beta1), complex(beta2), complex(x3)
    return TetraPoint(beta1 + beta2.conjugate() * x3, beta2 + beta1.conjugate() * x3, x3)


def classify_tetra(pt, closed: bool = False, tol: float = BAND) -> RegionTag:
    """Region of ``pt`` relative to the tetrablock.

    The ``|x3| = 1`` band is tested first so that the beta formulas are never
    evaluated where they are undefined. With ``closed=True`` every point of
    the closure with ``|x3| < 1`` is reported as ``ClosureInteriorFace``.
    """
    x1, x2, x3 = _point(pt)
    r = abs(x3)
    if abs(r - 1.0) <= tol:
        if abs(x2) <= 1.0 + tol and abs(x1 - x2.conjugate() * x3) <= tol:
            return RegionTag.DISTINGUISHED_BOUNDARY
        return RegionTag.OUTSIDE
    if r > 1.0:
        return RegionTag.OUTSIDE
    b1, b2 = beta_decompose((x1, x2, x3), tol=0.0)
    s = abs(b1) + abs(b2)
    if closed:
        return RegionTag.CLOSURE_INTERIOR_FACE if s <= 1.0 + tol else RegionTag.OUTSIDE
    if s < 1.0 - tol:
        return RegionTag.INTERIOR
    if s <= 1.0 + tol:
        return RegionTag.OTHER_TOP_BOUNDARY
    return RegionTag.OUTSIDE


def classify_many(points: np.ndarray, closed: bool = False, tol: float = BAND) -> list[RegionTag]:
    return [classify_tetra(p, closed=closed, tol=tol) for p in np.asarray(points)]


def kernel_check(pt, grid: int = 128, tol: float = BAND) -> tuple[bool, float]:
    """Decide whether ``1 - z x1 - w x2 + z w x3`` is zero-free on the closed
    bidisc, independently of the beta formulas.

    For fixed ``w`` the expression is ``a(w) - z b(w)`` with
    ``a = 1 - w x2`` and ``b = x1 - w x3``; its minimum modulus over
    ``|z| <= 1`` is ``max(|a| - |b|, 0)``, attained on ``|z| = 1``. When
    ``|x2| < 1`` the ratio ``b/a`` is holomorphic in ``w`` on the closed disc,
    so by the maximum-modulus principle ``|b| < |a|`` for all ``|w| <= 1``
    iff it holds on ``|w| = 1``. The ``w`` circle is sampled at ``grid``
    points. The returned minimum is the sampled torus minimum of the
    expression (zero when a zero is found).
    """
    if grid < 8:
        raise ValueError("grid must be >= 8")
    x1, x2, x3 = _point(pt)
    if abs(x2) >= 1.0:
        # 1 - w x2 vanishes at w = 1/x2 in the closed disc, with z = 0
        return False, 0.0
    w = np.exp(2j * np.pi * np.arange(grid) / grid)
    margin = np.abs(1.0 - w * x2) - np.abs(x1 - w * x3)
    m = float(margin.min())
    m = max(m, 0.0)
    return m > tol, m


def _quadratic_roots(s: complex, p: complex) -> tuple[complex, complex]:
    disc = cmath.sqrt(s * s - 4.0 * p)
    # avoid cancellation: take the larger root first, the other from Vieta
    r1 = 0.5 * (s + disc) if abs(s + disc) >= abs(s - disc) else 0.5 * (s - disc)
    r2 = p / r1 if r1 != 0 else 0.5 * (s - disc if abs(s + disc) >= abs(s - disc) else s + disc)
    return r1, r2


def gamma_roots(gp) -> tuple[complex, complex]:
    """Roots of ``lambda^2 - s lambda + p``."""
    s, p = (complex(v) for v in gp)
    return _quadratic_roots(s, p)


def gamma_classify(gp, tol: float = BAND) -> RegionTag:
    """Region of ``(s, p)`` relative to the symmetrized bidisc.

    Near-double roots are only determined to about ``sqrt(eps)`` by the
    quadratic formula, so the modulus band is widened by that amount.
    """
    s, p = (complex(v) for v in gp)
    r1, r2 = _quadratic_roots(s, p)
    band = tol + 2.0 * math.sqrt(_EPS * (abs(s) ** 2 + 4.0 * abs(p)))
    m1, m2 = abs(r1), abs(r2)
    if max(m1, m2) < 1.0 - band:
        return RegionTag.INTERIOR
    if max(m1, m2) > 1.0 + band:
        return RegionTag.OUTSIDE
    if min(m1, m2) >= 1.0 - band:
        return RegionTag.DISTINGUISHED_BOUNDARY
    return RegionTag.OTHER_TOP_BOUNDARY


def gamma_lift_check(pt, samples: int = 64, tol: float = BAND) -> bool:
    """True iff ``(x1 + z x2, z x3)`` lies in the closed symmetrized bidisc
    for every sampled ``z`` on the unit circle."""
    if samples < 8:
        raise ValueError("samples must be >= 8")
    x1, x2, x3 = _point(pt)
    for k in range(samples):
        z = cmath.exp(2j * math.pi * k / samples)
        if gamma_classify((x1 + z * x2, z * x3), tol=tol) is RegionTag.OUTSIDE:
            return False
    return True


def in_bDE(pt, tol: float = BAND) -> bool:
    """Membership in ``{(x1, x2, x1 x2) : |x1| = |x2| = 1}``."""
    x1, x2, x3 = _point(pt)
    return abs(abs(x1) - 1.0) <= tol and abs(abs(x2) - 1.0) <= tol and abs(x3 - x1 * x2) <= tol
