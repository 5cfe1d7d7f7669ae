"""Points, geodesics and boxes on the unit circle, plus circle maps.

Angles are canonical representatives in [0, 2*pi).  A geodesic of the disk
is an unordered pair of distinct boundary points; a box is a counterclockwise
quadruple (a, b, c, d) and stands for the set of geodesics with one endpoint
on the arc [a, b] and the other on [c, d].
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class InvalidBoxError(ValueError):
    """Quadruple is not a valid counterclockwise box of geodesics."""


class InvalidBoundaryMapError(ValueError):
    """Circle map failed its monotonicity certificate."""


def canon_angle(theta: float) -> float:
    """Reduce an angle to its canonical representative in [0, 2*pi)."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:  # fmod rounding at the seam
        t -= TWO_PI
    return t


@dataclass(frozen=True)
class CirclePoint:
    """A point of the unit circle, stored by canonical angle."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", canon_angle(self.theta))

    @classmethod
    def from_complex(cls, z: complex) -> "CirclePoint":
        if z == 0:
            raise ValueError("zero has no direction")
        return cls(cmath.phase(z))

    @property
    def z(self) -> complex:
        return cmath.exp(1j * self.theta)


@dataclass(frozen=True)
class Geodesic:
    """Unordered pair of distinct ideal endpoints."""

    p: CirclePoint
    q: CirclePoint

    def __post_init__(self):
        if self.p.theta == self.q.theta:
            raise ValueError("geodesic endpoints must be distinct")

    @classmethod
    def from_angles(cls, tp: float, tq: float) -> "Geodesic":
        return cls(CirclePoint(tp), CirclePoint(tq))


def ccw_gap(lo: float, hi: float) -> float:
    """Counterclockwise angular distance from lo to hi, in (0, 2*pi]."""
    d = canon_angle(hi - lo)
    return TWO_PI if d == 0.0 else d


def arc_contains(lo: float, hi: float, theta: float) -> bool:
    """Whether theta lies on the closed counterclockwise arc from lo to hi."""
    return ccw_gap(lo, theta) <= ccw_gap(lo, hi) or canon_angle(theta) == canon_angle(lo)


@dataclass(frozen=True)
class GeodesicBox:
    """Counterclockwise quadruple (a, b, c, d) with disjoint arcs [a,b], [c,d]."""

    a: CirclePoint
    b: CirclePoint
    c: CirclePoint
    d: CirclePoint

    def __post_init__(self):
        ta = self.a.theta
        rb = ccw_gap(ta, self.b.theta)
        rc = ccw_gap(ta, self.c.theta)
        rd = ccw_gap(ta, self.d.theta)
        if not (0.0 < rb < rc < rd < TWO_PI):
            raise InvalidBoxError(
                "corners must be pairwise distinct and in counterclockwise order; "
                f"got offsets ({rb}, {rc}, {rd}) from a={ta}"
            )

    @classmethod
    def from_angles(cls, ta, tb, tc, td) -> "GeodesicBox":
        return cls(CirclePoint(ta), CirclePoint(tb), CirclePoint(tc), CirclePoint(td))

    @property
    def angles(self) -> tuple[float, float, float, float]:
        return (self.a.theta, self.b.theta, self.c.theta, self.d.theta)

    @property
    def corners(self) -> tuple[complex, complex, complex, complex]:
        return (self.a.z, self.b.z, self.c.z, self.d.z)

    def separates(self, g: Geodesic) -> bool:
        """One endpoint on [a,b] and the other on [c,d], in either order."""
        ta, tb, tc, td = self.angles
        in_ab = lambda t: arc_contains(ta, tb, t)
        in_cd = lambda t: arc_contains(tc, td, t)
        tp, tq = g.p.theta, g.q.theta
        return (in_ab(tp) and in_cd(tq)) or (in_ab(tq) and in_cd(tp))

    def conjugate(self) -> "GeodesicBox":
        """Box of the complementary arc pair ([b,c], [d,a])."""
        return GeodesicBox(self.b, self.c, self.d, self.a)


def _log_chord(t1: float, t2: float) -> float:
    """log |e^{i t1} - e^{i t2}| computed through the half-angle sine."""
    s = 2.0 * abs(math.sin(0.5 * (t1 - t2)))
    return math.log(s) if s > 0.0 else -math.inf


def _log1p_exp(D: float) -> float:
    """log(1 + e^D), stable over the whole real line."""
    if D == math.inf:
        return math.inf
    if D > 30.0:
        return D + math.log1p(math.exp(-D))
    return math.log1p(math.exp(D))


def log_cross_ratio_angles(ta: float, tb: float, tc: float, td: float) -> float:
    """log of the cross ratio lambda = (a-c)(b-d) / ((a-d)(b-c)) of a
    counterclockwise quadruple of unit-modulus points.

    Uses the identity lambda - 1 = (a-b)(c-d) / ((a-d)(b-c)), whose factors
    are differences of adjacent corners: log(lambda) stays fully accurate
    both for nearly degenerate boxes (lambda -> 1) and for huge boxes, where
    forming lambda directly would cancel or overflow.  Chord lengths enter
    as |2 sin((t1-t2)/2)|.
    """
    D = (
        _log_chord(ta, tb)
        + _log_chord(tc, td)
        - _log_chord(ta, td)
        - _log_chord(tb, tc)
    )
    return _log1p_exp(D)


# ---------------------------------------------------------------------------
# Extended-real cross ratios.
#
# Boundary points of the upper half-plane are encoded as (sign, v) meaning
# sign * exp(v), with v = -inf for 0 and v = +inf for the point at infinity.
# Working with log-magnitudes keeps cross ratios exact even when the
# magnitudes overflow any floating-point range (deep deformations).
# ---------------------------------------------------------------------------

ExtReal = tuple[int, float]  # (sign in {-1, 0, +1}, log magnitude)

HP_ZERO: ExtReal = (0, -math.inf)
HP_INF: ExtReal = (0, math.inf)


def ext_real(x: float) -> ExtReal:
    """Encode an ordinary nonzero real as (sign, log|x|)."""
    if x == 0.0:
        return HP_ZERO
    if math.isinf(x):
        return HP_INF
    return (1 if x > 0 else -1, math.log(abs(x)))


def _log_abs_diff(p: ExtReal, q: ExtReal) -> float:
    """log |P - Q| for extended reals P = sp*e^{vp}, Q = sq*e^{vq}."""
    sp, vp = p
    sq, vq = q
    if vp == math.inf or vq == math.inf:
        raise ValueError("difference with the point at infinity must cancel")
    if vp == -math.inf:
        return vq
    if vq == -math.inf:
        return vp
    hi, lo = (vp, vq) if vp >= vq else (vq, vp)
    if sp == sq:
        if vp == vq:
            return -math.inf
        # e^hi - e^lo, computed as hi + log(1 - e^(lo-hi))
        return hi + math.log(-math.expm1(lo - hi))
    return hi + math.log1p(math.exp(lo - hi))


def log_cross_ratio_ext(a: ExtReal, b: ExtReal, c: ExtReal, d: ExtReal) -> float:
    """log of the cross ratio (a-c)(b-d) / ((a-d)(b-c)) for a cyclically
    ordered quadruple of extended reals on the boundary circle R u {inf}.

    Evaluated through lambda - 1 = (a-b)(c-d) / ((a-d)(b-c)) in log
    magnitudes, which is exact for arbitrarily separated or nearly touching
    quadruples.  At most one corner may sit at infinity; the two factors
    containing it cancel against each other.
    """
    pts = [a, b, c, d]
    at_inf = [i for i, (_, v) in enumerate(pts) if v == math.inf]
    if len(at_inf) > 1:
        raise ValueError("at most one corner may sit at infinity")
    num_pairs = [(0, 1), (2, 3)]
    den_pairs = [(0, 3), (1, 2)]
    D = 0.0
    for (i, j) in num_pairs:
        if i in at_inf or j in at_inf:
            continue  # cancels with the denominator factor through infinity
        D += _log_abs_diff(pts[i], pts[j])
    for (i, j) in den_pairs:
        if i in at_inf or j in at_inf:
            continue
        D -= _log_abs_diff(pts[i], pts[j])
    return _log1p_exp(D)


@dataclass(frozen=True)
class MobiusDisk:
    """Disk automorphism z -> e^{i alpha} (z - a) / (1 - conj(a) z), |a| < 1."""

    a: complex = 0j
    alpha: float = 0.0

    def __post_init__(self):
        if abs(self.a) >= 1.0:
            raise ValueError("parameter a must lie inside the unit disk")

    def __call__(self, z: complex) -> complex:
        return cmath.exp(1j * self.alpha) * (z - self.a) / (1.0 - self.a.conjugate() * z)

    def map_angle(self, theta: float) -> float:
        return canon_angle(cmath.phase(self(cmath.exp(1j * theta))))

    def map_point(self, p: CirclePoint) -> CirclePoint:
        return CirclePoint(self.map_angle(p.theta))


class BoundaryMap:
    """Orientation-preserving circle homeomorphism with a monotonicity certificate.

    Wraps an angle function theta -> theta'.  On construction the map is
    sampled on a grid and its degree-1 lift must be strictly increasing;
    otherwise the certificate fails and the map is rejected.
    """

    def __init__(self, angle_fn, name: str = "boundary-map", certify: int = 4096):
        self._fn = angle_fn
        self.name = name
        if certify:
            self.certify_monotone(certify)

    def map_angle(self, theta: float) -> float:
        return canon_angle(self._fn(theta))

    def map_point(self, p: CirclePoint) -> CirclePoint:
        return CirclePoint(self.map_angle(p.theta))

    def map_box(self, box: GeodesicBox) -> GeodesicBox:
        ta, tb, tc, td = box.angles
        try:
            return GeodesicBox.from_angles(
                self.map_angle(ta), self.map_angle(tb),
                self.map_angle(tc), self.map_angle(td),
            )
        except InvalidBoxError as exc:
            raise InvalidBoundaryMapError(
                f"{self.name} collapsed a box; deformation too strong for "
                "angle arithmetic"
            ) from exc

    def map_angles(self, thetas) -> np.ndarray:
        thetas = np.asarray(thetas, dtype=float)
        return np.array([self.map_angle(t) for t in thetas.ravel()]).reshape(thetas.shape)

    def certify_monotone(self, n: int = 4096) -> None:
        thetas = np.linspace(0.0, TWO_PI, n, endpoint=False)
        images = self.map_angles(thetas)
        # strictly increasing lift: consecutive ccw gaps positive, summing to 2*pi
        gaps = np.diff(np.concatenate([images, images[:1]])) % TWO_PI
        if np.any(gaps <= 0.0) or abs(gaps.sum() - TWO_PI) > 1e-9:
            raise InvalidBoundaryMapError(
                f"{self.name}: lift is not strictly increasing on a {n}-point grid"
            )

    @staticmethod
    def identity() -> "BoundaryMap":
        return BoundaryMap(lambda t: t, name="identity", certify=0)

    @staticmethod
    def from_mobius(m: MobiusDisk) -> "BoundaryMap":
        return BoundaryMap(m.map_angle, name="mobius", certify=0)
