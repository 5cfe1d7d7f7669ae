"""Exact moduli of disk quadrilaterals and planar modulus bounds.

The modulus of the family of curves connecting two disjoint boundary arcs
of the disk depends only on the cross ratio lambda > 1 of the four corner
points.  Mapping the quadrilateral to a rectangle via elliptic integrals
gives

    mod(lambda) = K(k') / (2 K(k)),   k = (sqrt(lambda) - sqrt(lambda-1))^2,

with K the complete elliptic integral of the first kind and k' the
complementary modulus.  The conjugate quadrilateral has cross ratio
lambda* = lambda / (lambda - 1) and reciprocal modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import GeodesicBox
from .currents import liouville_box

LAMBDA_MIN_GAP = 1e-9   # reject lambda - 1 below this
LAMBDA_MAX = 1e12       # reject lambda above this

_AGM_TOL = 1e-14
_AGM_MAX_ITER = 40


@dataclass(frozen=True)
class Modulus:
    """A computed modulus with its provenance and error estimate."""

    value: float
    method: str  # "elliptic" or "grid"
    error_estimate: float = 0.0

    def __post_init__(self):
        if not (self.value > 0.0):
            raise ValueError(f"modulus must be positive, got {self.value}")
        if self.error_estimate < 0.0:
            raise ValueError("error estimate must be nonnegative")


def _agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of positive a, b."""
    for _ in range(_AGM_MAX_ITER):
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, 0 <= k < 1.

    Evaluated as pi / (2 AGM(1, k')) with k' = sqrt(1 - k^2); relative error
    is at the AGM tolerance (1e-14).
    """
    if not (0.0 <= k < 1.0):
        raise ValueError(f"modulus k must lie in [0, 1), got {k}")
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * _agm(1.0, kp))


def _elliptic_K_complement(k: float) -> float:
    """K(k') = K(sqrt(1-k^2)) without forming k' (stable for tiny k)."""
    if not (0.0 < k <= 1.0):
        raise ValueError(f"modulus k must lie in (0, 1], got {k}")
    return math.pi / (2.0 * _agm(1.0, k))


def quad_modulus(lam: float) -> Modulus:
    """Modulus of the connecting family of a disk quadrilateral of cross ratio lam.

    Strictly increasing in lam; self-dual at lam = 2 where the value is 1.
    """
    if not (lam > 1.0 + LAMBDA_MIN_GAP):
        raise ValueError(f"cross ratio must exceed 1 + {LAMBDA_MIN_GAP}, got {lam}")
    if lam > LAMBDA_MAX:
        raise ValueError(f"cross ratio {lam} beyond validated range {LAMBDA_MAX}")
    # k = (sqrt(lam) - sqrt(lam-1))^2 via the reciprocal form, avoiding
    # cancellation for large lam.
    k = 1.0 / (math.sqrt(lam) + math.sqrt(lam - 1.0)) ** 2
    value = _elliptic_K_complement(k) / (2.0 * elliptic_K(k))
    return Modulus(value=value, method="elliptic", error_estimate=1e-12 * value)


def _modulus_asymptotic(L: float) -> float:
    """mod = L/pi + (2/pi) log 4, valid to below 1e-12 once L > log(1e12)."""
    return (L + 2.0 * math.log(4.0)) / math.pi


def quad_modulus_from_log(L: float) -> Modulus:
    """Modulus of the quadrilateral with Liouville measure L = log(lambda).

    Nearly degenerate quadrilaterals (lambda close to 1) go through the
    conjugate family, whose cross ratio lambda/(lambda - 1) is large and
    well conditioned, and the duality identity returns the value.  Beyond
    the elliptic formula's validated range the governing asymptote
    mod ~ L/pi + (2/pi) log 4 takes over, where its error is below the
    arithmetic tolerance.
    """
    if not (L > 0.0):
        raise ValueError(f"Liouville measure must be positive, got {L}")
    log_max = math.log(LAMBDA_MAX)
    if L > log_max:
        v = _modulus_asymptotic(L)
        return Modulus(value=v, method="elliptic", error_estimate=1e-12 * v)
    lam_minus_1 = math.expm1(L)
    if lam_minus_1 >= LAMBDA_MIN_GAP:
        return quad_modulus(1.0 + lam_minus_1)
    # conjugate cross ratio log(lambda*) = L - log(lambda - 1)
    L_star = L - math.log(lam_minus_1)
    if L_star > log_max:
        dual_value = _modulus_asymptotic(L_star)
        err = 1e-12
    else:
        dual = quad_modulus(math.exp(L_star))
        dual_value, err = dual.value, dual.error_estimate
    return Modulus(
        value=1.0 / dual_value,
        method="elliptic",
        error_estimate=err / dual_value**2,
    )


def quad_modulus_box(box: GeodesicBox) -> Modulus:
    """Modulus of the family connecting the arcs [a,b] and [c,d] of a box."""
    return quad_modulus_from_log(liouville_box(box))


def conjugate_box(box: GeodesicBox) -> GeodesicBox:
    """Box of the complementary arc pair; moduli multiply to 1."""
    return box.conjugate()


def annulus_modulus(r: float, R: float) -> float:
    """Modulus of the family connecting the two circles of a round annulus."""
    if not (0.0 < r < R):
        raise ValueError(f"need 0 < r < R, got r={r}, R={R}")
    return 2.0 * math.pi / math.log(R / r)


def mod_upper_bound(delta: float) -> float:
    """Upper bound pi (1 + 1/(2 delta))^2 for the modulus of a connecting
    family in the plane with relative distance delta between the continua.

    delta = 0 returns +inf.
    """
    if delta < 0.0:
        raise ValueError("relative distance must be nonnegative")
    if delta == 0.0:
        return math.inf
    return math.pi * (1.0 + 0.5 / delta) ** 2


class Continuum:
    """Compact connected planar set given as a polyline (or a single segment)."""

    def __init__(self, points):
        pts = np.asarray(points, dtype=complex).ravel()
        if pts.size < 1:
            raise ValueError("continuum needs at least one point")
        self.points = pts

    @classmethod
    def segment(cls, z0: complex, z1: complex) -> "Continuum":
        return cls([z0, z1])

    @property
    def diameter(self) -> float:
        pts = self.points
        if pts.size == 1:
            return 0.0
        diff = pts[:, None] - pts[None, :]
        return float(np.abs(diff).max())


def _seg_point_dist(a: complex, b: complex, p: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(p - a)
    t = ((p - a) * ab.conjugate()).real / denom
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


def _seg_seg_dist(a0, a1, b0, b1) -> float:
    # segments intersect -> distance zero
    def orient(p, q, r):
        return ((q - p).conjugate() * (r - p)).imag

    d1, d2 = orient(a0, a1, b0), orient(a0, a1, b1)
    d3, d4 = orient(b0, b1, a0), orient(b0, b1, a1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return 0.0
    return min(
        _seg_point_dist(a0, a1, b0),
        _seg_point_dist(a0, a1, b1),
        _seg_point_dist(b0, b1, a0),
        _seg_point_dist(b0, b1, a1),
    )


def _polyline_dist(E: Continuum, F: Continuum) -> float:
    pe, pf = E.points, F.points
    if pe.size == 1 and pf.size == 1:
        return abs(pe[0] - pf[0])
    best = math.inf
    segs_e = [(pe[i], pe[i + 1]) for i in range(max(pe.size - 1, 1) if pe.size > 1 else 0)] or [(pe[0], pe[0])]
    segs_f = [(pf[i], pf[i + 1]) for i in range(max(pf.size - 1, 1) if pf.size > 1 else 0)] or [(pf[0], pf[0])]
    for a0, a1 in segs_e:
        for b0, b1 in segs_f:
            best = min(best, _seg_seg_dist(a0, a1, b0, b1))
    return best


def rel_distance(E: Continuum, F: Continuum) -> float:
    """Relative distance dist(E, F) / min(diam E, diam F).

    The smaller set must have positive diameter.
    """
    dmin = min(E.diameter, F.diameter)
    if dmin <= 0.0:
        raise ValueError("minimum diameter must be positive")
    return _polyline_dist(E, F) / dmin
