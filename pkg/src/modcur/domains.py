"""The horizontal strip, the chimney domain, their Riemann maps and the
boundary actions of the shrink/stretch deformations.

Strip S = {0 < Im z < 1}.  Its Riemann map to the disk is the closed form

    phi_S(z) = (e^{pi z} - i) / (e^{pi z} + i),

normalized by phi(0) = -i, phi(i) = i, phi(x+iy) -> +-1 as x -> +-inf.
In half-plane coordinates W = e^{pi z} the boundary is R u {inf}: the bottom
side carries W = e^{pi x} > 0, the top side W = -e^{pi x} < 0, the left end
W = 0 and the right end W = inf.

Chimney C = {Im z < 0} u {|Re z| < 1}.  A Schwarz-Christoffel map from the
upper half-plane onto C with prevertices -1, 0, 1, inf has derivative
-(2/pi) sqrt(w^2-1)/w, which integrates in closed form:

    f(w) = s - (2/pi) (g - atan g),  g = sqrt(w-1) sqrt(w+1),

with s = -1 on {Re w >= 0} and s = +1 on {Re w < 0} (the two branches of
atan glue continuously across the imaginary axis).  Then f(±1) = ∓1, the
channel prevertex w = 0 is the chimney top and w = inf the lower end.  The
Mobius involution m(w) = (i - w)/(1 - i w) carries the half-plane to the
disk with m(-1) = 1, m(1) = -1, m(0) = i, m(inf) = -i, so phi_C = m o f^{-1}
has the normalization phi_C(±1) = ±1, chimney top -> i, lower end -> -i.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .circle import (
    TWO_PI,
    BoundaryMap,
    CirclePoint,
    ExtReal,
    GeodesicBox,
    HP_INF,
    HP_ZERO,
    arc_contains,
    canon_angle,
    ccw_gap,
    log_cross_ratio_ext,
)
from .currents import MeasuredLamination

STRIP = "strip"
CHIMNEY = "chimney"

# strip sides
BOTTOM, TOP = "bottom", "top"
LEFT_END, RIGHT_END = "left-end", "right-end"

# chimney sides, in counterclockwise boundary order
RIGHT_RAY, RIGHT_WALL = "right-ray", "right-wall"
LEFT_WALL, LEFT_RAY = "left-wall", "left-ray"
CHIMNEY_TOP, LOWER_INF = "chimney-top", "lower-inf"

HORIZONTAL_SHRINK = "horizontal-shrink"
VERTICAL_SHRINK = "vertical-shrink"


class DomainError(ValueError):
    """Point or arc incompatible with the requested domain."""


# ---------------------------------------------------------------------------
# strip map
# ---------------------------------------------------------------------------

def strip_map(z: complex) -> complex:
    """Riemann map of the closed strip onto the closed disk."""
    y = complex(z).imag
    if not (-1e-12 <= y <= 1.0 + 1e-12):
        raise DomainError(f"{z} is not in the closure of the strip")
    w = cmath.exp(math.pi * z)
    return (w - 1j) / (w + 1j)


def _atan_exp(v):
    """atan(exp(v)) with asymptotic branches for |v| large."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    hi = v > 36.0
    lo = v < -36.0
    mid = ~(hi | lo)
    out[hi] = 0.5 * math.pi - np.exp(-v[hi])
    out[lo] = np.exp(v[lo])
    out[mid] = np.arctan(np.exp(v[mid]))
    return out


@dataclass(frozen=True)
class StripPrimeEnd:
    """Prime end of the strip: a boundary point (side, x) or one of the two
    infinite ends, kept symbolic."""

    side: str
    x: float = math.nan

    def __post_init__(self):
        if self.side in (BOTTOM, TOP):
            if not math.isfinite(self.x):
                raise DomainError("finite coordinate required on a side")
        elif self.side not in (LEFT_END, RIGHT_END):
            raise DomainError(f"unknown strip side {self.side!r}")

    def angle(self) -> float:
        """Angle of the image point on the circle."""
        if self.side == LEFT_END:
            return math.pi
        if self.side == RIGHT_END:
            return 0.0
        s = 1.0 if self.side == BOTTOM else -1.0
        return canon_angle(math.pi + 2.0 * s * float(_atan_exp(math.pi * self.x)))

    def halfplane(self, scale: float = 1.0) -> ExtReal:
        """(sign, log magnitude) of W = e^{pi * scale * x} on the side's sign,
        i.e. the half-plane boundary coordinate after H_scale."""
        if self.side == LEFT_END:
            return HP_ZERO
        if self.side == RIGHT_END:
            return HP_INF
        sign = 1 if self.side == BOTTOM else -1
        return (sign, math.pi * scale * self.x)

    def deform(self, d: "Deformation") -> "StripPrimeEnd":
        if d.kind != HORIZONTAL_SHRINK:
            raise DomainError("strip prime ends deform by horizontal maps")
        if self.side in (LEFT_END, RIGHT_END):
            return self
        return StripPrimeEnd(self.side, d.epsilon * self.x)


def strip_map_inverse(w) -> StripPrimeEnd:
    """Boundary prime end with strip_map image w (a CirclePoint, angle or
    unit-modulus complex).  The angles 0 and pi return the infinite ends."""
    if isinstance(w, CirclePoint):
        theta = w.theta
    elif isinstance(w, complex):
        theta = canon_angle(cmath.phase(w))
    else:
        theta = canon_angle(float(w))
    if theta == 0.0:
        return StripPrimeEnd(RIGHT_END)
    if theta == math.pi:
        return StripPrimeEnd(LEFT_END)
    W = -1.0 / math.tan(0.5 * theta)
    if theta < math.pi:  # top side, W < 0
        return StripPrimeEnd(TOP, math.log(-W) / math.pi)
    return StripPrimeEnd(BOTTOM, math.log(W) / math.pi)


# ---------------------------------------------------------------------------
# chimney map
# ---------------------------------------------------------------------------

def _chimney_g(w):
    """sqrt(w-1) sqrt(w+1) with the upper-half-plane branches."""
    w = np.asarray(w, dtype=complex)
    return np.sqrt(w - 1.0) * np.sqrt(w + 1.0)


def chimney_from_halfplane(w) -> complex:
    """The half-plane-to-chimney map f; valid on the closed upper half-plane."""
    w = complex(w)
    if w.imag < -1e-12:
        raise DomainError("argument must lie in the closed upper half-plane")
    g = complex(_chimney_g(w))
    base = -1.0 if w.real >= 0.0 else 1.0
    return base - (2.0 / math.pi) * (g - np.arctan(g))


def chimney_halfplane_inverse(z: complex, w0: complex = None) -> complex:
    """Interior inverse of f by Newton iteration (derivative in closed form)."""
    z = complex(z)
    starts = [w0] if w0 is not None else [1j, 2j, 0.25j, 0.7 + 0.7j, -0.7 + 0.7j, 4j]
    for start in starts:
        w = complex(start)
        for _ in range(80):
            fw = chimney_from_halfplane(w)
            dfw = -(2.0 / math.pi) * complex(_chimney_g(w)) / w
            if dfw == 0:
                break
            step = (fw - z) / dfw
            w_new = w - step
            if w_new.imag <= 0:
                w_new = complex(w_new.real, max(1e-12, w.imag * 0.5))
            w = w_new
            if abs(step) < 1e-14 * (1.0 + abs(w)):
                break
        if abs(chimney_from_halfplane(w) - z) < 1e-10 * (1.0 + abs(z)):
            return w
    raise DomainError(f"halfplane inverse did not converge at z = {z}")


def _halfplane_to_disk(w) -> complex:
    """Mobius involution m(w) = (i - w)/(1 - i w), half-plane onto disk."""
    w = complex(w)
    return (1j - w) / (1.0 - 1j * w)


def _disk_angle_of_real(w: float) -> float:
    """Angle of m(w) for real w; m(inf) = -i is handled by the caller."""
    return canon_angle(math.atan2(1.0 - w * w, -2.0 * w))


def _real_w_of_angle(theta: float) -> float:
    """m^{-1} on the boundary: w = -cos(theta) / (1 + sin(theta))."""
    s = math.sin(theta)
    if 1.0 + s == 0.0:
        return math.inf
    return -math.cos(theta) / (1.0 + s)


def _solve_ray(T):
    """Solve s - atan(s) = T for s >= 0 (vectorized Newton)."""
    T = np.asarray(T, dtype=float)
    u = np.cbrt(3.0 * T)
    s = np.where(T < 0.7, u * (1.0 + 0.2 * u * u), T + 0.5 * math.pi)
    for _ in range(60):
        F = s - np.arctan(s) - T
        dF = s * s / (1.0 + s * s)
        step = np.divide(F, dF, out=np.zeros_like(F), where=dF > 1e-300)
        s = np.maximum(s - step, 0.0)
        if np.all(np.abs(step) <= 1e-15 * (1.0 + s)):
            break
    return s


def _solve_wall(T):
    """Solve atanh(Y) - Y = T for Y in [0, 1); returns delta = 1 - Y."""
    T = np.asarray(T, dtype=float)
    delta = np.empty_like(T)

    small = T < 0.7
    u = np.cbrt(3.0 * T[small])
    Y = u * (1.0 - 0.2 * u * u)
    # Newton polish on G(Y) = atanh(Y) - Y - T
    for _ in range(40):
        G = np.arctanh(Y) - Y - T[small]
        dG = Y * Y / (1.0 - Y * Y)
        step = np.divide(G, dG, out=np.zeros_like(G), where=dG > 1e-300)
        Y = np.clip(Y - step, 0.0, 1.0 - 1e-17)
        if np.all(np.abs(step) <= 1e-15 * (1.0 + Y)):
            break
    delta[small] = 1.0 - Y

    big = ~small
    if np.any(big):
        Tb = T[big]
        # fixed point delta = (2 - delta) exp(-2 (T + 1 - delta))
        d = 2.0 * np.exp(-2.0 * (Tb + 1.0))
        for _ in range(60):
            d_new = (2.0 - d) * np.exp(-2.0 * (Tb + 1.0 - d))
            if np.all(np.abs(d_new - d) <= 1e-16 * (d_new + 1e-300)):
                d = d_new
                break
            d = d_new
        delta[big] = d
    return delta


def _wall_height_from_w(w_abs: float) -> float:
    """Height y of the wall point with half-plane coordinate |w| in (0, 1]."""
    if w_abs > 1.0:
        raise DomainError("wall coordinate must have |w| <= 1")
    Y2 = (1.0 - w_abs) * (1.0 + w_abs)
    Y = math.sqrt(Y2)
    one_minus_Y = w_abs * w_abs / (1.0 + Y)
    atanh_Y = 0.5 * math.log((1.0 + Y) / one_minus_Y)
    return (2.0 / math.pi) * (atanh_Y - Y)


def _ray_x_from_w(w_abs: float) -> float:
    """Offset |x| - 1 of the ray point with half-plane coordinate |w| >= 1."""
    s = math.sqrt((w_abs - 1.0) * (w_abs + 1.0))
    return (2.0 / math.pi) * (s - math.atan(s))


@dataclass(frozen=True)
class ChimneyPrimeEnd:
    """Prime end of the chimney: (side, coordinate) or one of the two
    symbolic infinite ends.  Rays carry x, walls carry y >= 0."""

    side: str
    coord: float = math.nan

    def __post_init__(self):
        if self.side in (LEFT_RAY, RIGHT_RAY):
            if not math.isfinite(self.coord):
                raise DomainError("ray prime ends need a finite x")
            if self.side == LEFT_RAY and self.coord > -1.0:
                raise DomainError("left ray requires x <= -1")
            if self.side == RIGHT_RAY and self.coord < 1.0:
                raise DomainError("right ray requires x >= 1")
        elif self.side in (LEFT_WALL, RIGHT_WALL):
            if not (math.isfinite(self.coord) and self.coord >= 0.0):
                raise DomainError("wall prime ends need a finite y >= 0")
        elif self.side not in (CHIMNEY_TOP, LOWER_INF):
            raise DomainError(f"unknown chimney side {self.side!r}")

    def z(self) -> complex:
        if self.side == LEFT_RAY or self.side == RIGHT_RAY:
            return complex(self.coord, 0.0)
        if self.side == LEFT_WALL:
            return complex(-1.0, self.coord)
        if self.side == RIGHT_WALL:
            return complex(1.0, self.coord)
        raise DomainError(f"{self.side} is an infinite prime end")

    def halfplane_w(self) -> float:
        """Real half-plane coordinate (math.inf for the lower end)."""
        if self.side == CHIMNEY_TOP:
            return 0.0
        if self.side == LOWER_INF:
            return math.inf
        if self.side == LEFT_RAY:
            T = 0.5 * math.pi * (-1.0 - self.coord)
            s = float(_solve_ray(T))
            return math.sqrt(1.0 + s * s)
        if self.side == RIGHT_RAY:
            T = 0.5 * math.pi * (self.coord - 1.0)
            s = float(_solve_ray(T))
            return -math.sqrt(1.0 + s * s)
        # walls
        T = 0.5 * math.pi * self.coord
        delta = float(_solve_wall(T))
        w_abs = math.sqrt(delta * (2.0 - delta))
        return w_abs if self.side == LEFT_WALL else -w_abs

    def angle(self) -> float:
        if self.side == LOWER_INF:
            return 1.5 * math.pi
        if self.side == CHIMNEY_TOP:
            return 0.5 * math.pi
        return _disk_angle_of_real(self.halfplane_w())

    def deform(self, d: "Deformation") -> "ChimneyPrimeEnd":
        if d.kind != VERTICAL_SHRINK:
            raise DomainError("chimney prime ends deform by vertical maps")
        if self.side in (LEFT_WALL, RIGHT_WALL):
            return ChimneyPrimeEnd(self.side, d.epsilon * self.coord)
        return self


def chimney_prime_end_of_w(w: float) -> ChimneyPrimeEnd:
    """Boundary prime end with half-plane coordinate w (math.inf allowed)."""
    if math.isinf(w):
        return ChimneyPrimeEnd(LOWER_INF)
    if w == 0.0:
        return ChimneyPrimeEnd(CHIMNEY_TOP)
    if w >= 1.0:
        return ChimneyPrimeEnd(LEFT_RAY, -1.0 - _ray_x_from_w(w))
    if w <= -1.0:
        return ChimneyPrimeEnd(RIGHT_RAY, 1.0 + _ray_x_from_w(-w))
    if w > 0.0:
        return ChimneyPrimeEnd(LEFT_WALL, _wall_height_from_w(w))
    return ChimneyPrimeEnd(RIGHT_WALL, _wall_height_from_w(-w))


def chimney_map_boundary(p: ChimneyPrimeEnd) -> CirclePoint:
    """Boundary value of the normalized chimney Riemann map."""
    return CirclePoint(p.angle())


def chimney_map(z: complex) -> complex:
    """Normalized Riemann map of the chimney onto the disk (interior points)."""
    z = complex(z)
    inside = (z.imag < 0.0) or (abs(z.real) < 1.0)
    if not inside:
        raise DomainError(f"{z} is not in the chimney domain")
    w = chimney_halfplane_inverse(z)
    return _halfplane_to_disk(w)


def chimney_map_inverse_angle(theta: float) -> ChimneyPrimeEnd:
    """Boundary prime end whose image has the given angle."""
    theta = canon_angle(theta)
    if theta == 0.5 * math.pi:
        return ChimneyPrimeEnd(CHIMNEY_TOP)
    if theta == 1.5 * math.pi:
        return ChimneyPrimeEnd(LOWER_INF)
    return chimney_prime_end_of_w(_real_w_of_angle(theta))


# ---------------------------------------------------------------------------
# deformations and boundary maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Deformation:
    """Affine deformation: H_eps(x, y) = (eps x, y) on the strip, or
    T_eps(x, y) = (x, eps y) on the chimney."""

    kind: str
    epsilon: float

    def __post_init__(self):
        if self.kind not in (HORIZONTAL_SHRINK, VERTICAL_SHRINK):
            raise DomainError(f"unknown deformation kind {self.kind!r}")
        if not (self.epsilon > 0.0):
            raise DomainError("epsilon must be positive")


def strip_walk_key(p: StripPrimeEnd) -> tuple:
    """Position of a strip prime end in the ccw boundary walk (exact)."""
    if p.side == BOTTOM:
        return (0, p.x)
    if p.side == RIGHT_END:
        return (1, 0.0)
    if p.side == TOP:
        return (2, -p.x)
    return (3, 0.0)  # left end


def chimney_walk_key(p: ChimneyPrimeEnd) -> tuple:
    """Position of a chimney prime end in the ccw boundary walk (exact).

    The two corners are normalized to their wall representation so that the
    ray endpoint x = +-1 and the wall endpoint y = 0 compare equal.
    """
    if p.side == RIGHT_RAY:
        return (1, 0.0) if p.coord == 1.0 else (0, -p.coord)
    if p.side == RIGHT_WALL:
        return (1, p.coord)
    if p.side == CHIMNEY_TOP:
        return (2, 0.0)
    if p.side == LEFT_WALL:
        return (3, -p.coord)
    if p.side == LEFT_RAY:
        return (3, 0.0) if p.coord == -1.0 else (4, -p.coord)
    return (5, 0.0)  # lower infinity


def cyclic_strictly_between(ks: tuple, kp: tuple, ke: tuple) -> bool:
    """Whether walk position kp lies strictly inside the ccw interval
    (ks, ke) of a cyclically ordered boundary."""
    if ks == ke:
        raise ValueError("empty or full interval has no interior test")
    if ks < ke:
        return ks < kp < ke
    return kp > ks or kp < ke


@dataclass(frozen=True)
class PrimeEndArc:
    """Counterclockwise interval of prime ends from `start` to `end`."""

    domain: str
    start: object
    end: object

    def angles(self) -> tuple[float, float]:
        return (self.start.angle(), self.end.angle())

    def contains_angle(self, theta: float) -> bool:
        lo, hi = self.angles()
        return arc_contains(lo, hi, theta)

    def endpoint_gap_to(self, theta: float) -> float:
        lo, hi = self.angles()
        return min(
            ccw_gap(lo, theta), ccw_gap(theta, lo),
            ccw_gap(hi, theta), ccw_gap(theta, hi),
        )

    def _key(self, p) -> tuple:
        return strip_walk_key(p) if self.domain == STRIP else chimney_walk_key(p)

    def walk_keys(self) -> tuple[tuple, tuple]:
        return (self._key(self.start), self._key(self.end))

    def contains_key(self, kp: tuple) -> bool:
        """Strict interior membership in the exact boundary walk order."""
        ks, ke = self.walk_keys()
        return cyclic_strictly_between(ks, kp, ke)

    def has_endpoint_key(self, kp: tuple) -> bool:
        ks, ke = self.walk_keys()
        return ks == kp or ke == kp


def deform_arc(d: Deformation, arc: PrimeEndArc) -> PrimeEndArc:
    """Image of a prime-end arc under the deformation; sides are preserved."""
    if arc.domain == STRIP and d.kind != HORIZONTAL_SHRINK:
        raise DomainError("strip arcs deform by horizontal-shrink maps")
    if arc.domain == CHIMNEY and d.kind != VERTICAL_SHRINK:
        raise DomainError("chimney arcs deform by vertical-shrink maps")
    return replace(arc, start=arc.start.deform(d), end=arc.end.deform(d))


class StripBoundaryMap(BoundaryMap):
    """Boundary action of the horizontal map H_s on the circle.

    Exact on prime ends: (side, x) -> (side, s x).  Cross ratios of image
    boxes are evaluated in log half-plane coordinates, which stays exact for
    arbitrarily strong stretches where circle angles would collapse.
    """

    def __init__(self, scale: float, certify: int = 0):
        if not (scale > 0.0):
            raise DomainError("scale must be positive")
        self.scale = scale
        super().__init__(self._angle, name=f"strip-H[{scale:g}]", certify=certify)

    def _angle(self, theta: float) -> float:
        p = strip_map_inverse(theta)
        return p.deform(Deformation(HORIZONTAL_SHRINK, self.scale)).angle()

    def map_angles(self, thetas) -> np.ndarray:
        """Vectorized boundary action: theta -> pi +- 2 atan(|W|^s) with
        W = -cot(theta/2), evaluated in the log domain."""
        th = np.asarray(thetas, dtype=float)
        out = np.array(th, copy=True)
        reg = (th != 0.0) & (th != math.pi)
        W = -1.0 / np.tan(0.5 * th[reg])
        v = self.scale * np.log(np.abs(W))
        att = _atan_exp(v)
        out[reg] = np.where(W > 0.0, math.pi + 2.0 * att, math.pi - 2.0 * att)
        return np.mod(out, TWO_PI)

    def pullback_log_cross_ratio(self, box: GeodesicBox) -> float:
        ends = [strip_map_inverse(t) for t in box.angles]
        coords = [p.halfplane(self.scale) for p in ends]
        return log_cross_ratio_ext(*coords)


class ChimneyBoundaryMap(BoundaryMap):
    """Boundary action of the vertical shrink T_eps on the circle."""

    def __init__(self, epsilon: float, certify: int = 0):
        if not (epsilon > 0.0):
            raise DomainError("epsilon must be positive")
        self.epsilon = epsilon
        self._deformation = Deformation(VERTICAL_SHRINK, epsilon)
        super().__init__(self._angle, name=f"chimney-T[{epsilon:g}]", certify=certify)

    def map_prime_end(self, p: ChimneyPrimeEnd) -> ChimneyPrimeEnd:
        return p.deform(self._deformation)

    def _angle(self, theta: float) -> float:
        p = chimney_map_inverse_angle(theta)
        return self.map_prime_end(p).angle()

    def map_angles(self, thetas) -> np.ndarray:
        """Vectorized boundary action.  T_eps fixes the rays and the two
        infinite prime ends; wall points move by y -> eps y."""
        th = np.asarray(thetas, dtype=float)
        out = np.array(th, copy=True)
        s = np.sin(th)
        denom = 1.0 + s
        w = np.where(denom > 0.0, -np.cos(th) / np.where(denom > 0, denom, 1.0),
                     math.inf)
        wall = (np.abs(w) < 1.0) & (np.abs(w) > 0.0) & (denom > 0.0)
        if np.any(wall):
            wv = w[wall]
            aw = np.abs(wv)
            Y = np.sqrt((1.0 - aw) * (1.0 + aw))
            one_minus_Y = aw * aw / (1.0 + Y)
            atanh_Y = 0.5 * np.log((1.0 + Y) / one_minus_Y)
            y = (2.0 / math.pi) * (atanh_Y - Y)
            delta = _solve_wall(0.5 * math.pi * self.epsilon * y)
            aw2 = np.sqrt(delta * (2.0 - delta))
            w2 = np.where(wv > 0.0, aw2, -aw2)
            out[wall] = np.mod(np.arctan2(1.0 - w2 * w2, -2.0 * w2), TWO_PI)
        return out


def boundary_map_h(d: Deformation) -> BoundaryMap:
    """Circle map phi o d o phi^{-1} for a deformation of its domain."""
    if d.kind == HORIZONTAL_SHRINK:
        return StripBoundaryMap(d.epsilon)
    return ChimneyBoundaryMap(d.epsilon)


# ---------------------------------------------------------------------------
# canonical arcs and the vertical lamination of the strip
# ---------------------------------------------------------------------------

def canonical_arcs(domain: str) -> tuple[PrimeEndArc, PrimeEndArc]:
    """The reference arc pair (I0, J0) of the domain.

    Strip:   I0 = (-inf, 0) u (-inf + i, i), through the left end;
             J0 = (1, inf) u (1 + i, inf + i), through the right end.
    Chimney: I0 = (1 + i, 1 + i inf) on the right wall; J0 = (1, 2).
    """
    if domain == STRIP:
        i0 = PrimeEndArc(STRIP, StripPrimeEnd(TOP, 0.0), StripPrimeEnd(BOTTOM, 0.0))
        j0 = PrimeEndArc(STRIP, StripPrimeEnd(BOTTOM, 1.0), StripPrimeEnd(TOP, 1.0))
        return i0, j0
    if domain == CHIMNEY:
        i0 = PrimeEndArc(
            CHIMNEY, ChimneyPrimeEnd(RIGHT_WALL, 1.0), ChimneyPrimeEnd(CHIMNEY_TOP)
        )
        j0 = PrimeEndArc(
            CHIMNEY, ChimneyPrimeEnd(RIGHT_RAY, 2.0), ChimneyPrimeEnd(RIGHT_RAY, 1.0)
        )
        return i0, j0
    raise DomainError(f"unknown domain {domain!r}")


def _interval_intersection_length(a, b):
    """Total length of the intersection of two unions of x-intervals."""
    total = 0.0
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if hi > lo:
                total += hi - lo
    return total


def _strip_x_intervals(lo: float, hi: float, side: str):
    """x-intervals of the given side whose image angles fill the ccw arc
    (lo, hi) intersected with that side's semicircle.

    The arc is split at the seam angles 0 (right end) and pi (left end),
    which map to x = +-inf.
    """
    length = ccw_gap(lo, hi)
    marks = [(0.0, canon_angle(lo)), (length, canon_angle(hi))]
    for seam in (0.0, math.pi):
        c = ccw_gap(lo, seam)
        if 0.0 < c < length:
            marks.append((c, seam))
    marks.sort(key=lambda m: m[0])

    def x_of(theta):
        p = strip_map_inverse(theta)
        if p.side == LEFT_END:
            return -math.inf
        if p.side == RIGHT_END:
            return math.inf
        return p.x

    intervals = []
    for (o1, t1), (o2, t2) in zip(marks[:-1], marks[1:]):
        if o2 <= o1:
            continue
        mid = canon_angle(lo + 0.5 * (o1 + o2))
        on_bottom = math.pi < mid < TWO_PI
        if (side == BOTTOM) != on_bottom:
            continue
        x1, x2 = x_of(t1), x_of(t2)
        pair = (x1, x2) if side == BOTTOM else (x2, x1)  # top angle falls with x
        if pair[1] > pair[0]:
            intervals.append(pair)
    return intervals


class StripVerticalLamination(MeasuredLamination):
    """The vertical foliation of the strip as a measured lamination.

    The leaf over parameter x joins phi(x) to phi(x + i); the transverse
    measure of a box is the Lebesgue measure of the parameter set whose
    leaves have one ideal endpoint on each arc.
    """

    support_angles = (0.0, math.pi)  # accumulation points of leaf endpoints

    def box_measure(self, box: GeodesicBox) -> float:
        ta, tb, tc, td = box.angles
        ab_bot = _strip_x_intervals(ta, tb, BOTTOM)
        ab_top = _strip_x_intervals(ta, tb, TOP)
        cd_bot = _strip_x_intervals(tc, td, BOTTOM)
        cd_top = _strip_x_intervals(tc, td, TOP)
        return (
            _interval_intersection_length(ab_bot, cd_top)
            + _interval_intersection_length(cd_bot, ab_top)
        )

    def charges_boundary(self, box: GeodesicBox, margin: float) -> bool:
        for tc in box.angles:
            for t in self.support_angles:
                if min(ccw_gap(t, tc), ccw_gap(tc, t)) < margin:
                    return True
        return False


def strip_vertical_lamination() -> StripVerticalLamination:
    return StripVerticalLamination()


def strip_parameter_box(x1: float, x2: float) -> GeodesicBox:
    """Box whose vertical-lamination measure is x2 - x1: arcs are the images
    of [x1, x2] on the bottom and on the top side."""
    if not x2 > x1:
        raise DomainError("need x1 < x2")
    return GeodesicBox.from_angles(
        StripPrimeEnd(BOTTOM, x1).angle(),
        StripPrimeEnd(BOTTOM, x2).angle(),
        StripPrimeEnd(TOP, x2).angle(),
        StripPrimeEnd(TOP, x1).angle(),
    )


def strip_separating_box(xa: float, xb: float, xc: float, xd: float) -> GeodesicBox:
    """Box whose arcs straddle the two strip ends: [a, b] runs from the top
    point over xa through the left end to the bottom point over xb, and
    [c, d] from the bottom point over xc through the right end to the top
    point over xd.  Requires xb < xc."""
    if not xb < xc:
        raise DomainError("need xb < xc")
    return GeodesicBox.from_angles(
        StripPrimeEnd(TOP, xa).angle(),
        StripPrimeEnd(BOTTOM, xb).angle(),
        StripPrimeEnd(BOTTOM, xc).angle(),
        StripPrimeEnd(TOP, xd).angle(),
    )


# spec-facing type surfaces for the two Riemann maps -------------------------

@dataclass(frozen=True)
class RiemannMap:
    """Handle bundling evaluation, boundary values and inversion for one of
    the two normalized maps."""

    domain: str

    def __call__(self, z: complex) -> complex:
        return strip_map(z) if self.domain == STRIP else chimney_map(z)

    def boundary_angle(self, prime_end) -> float:
        return prime_end.angle()

    def inverse_angle(self, theta: float):
        if self.domain == STRIP:
            return strip_map_inverse(theta)
        return chimney_map_inverse_angle(theta)

    @property
    def normalization(self) -> dict:
        if self.domain == STRIP:
            return {"0": -1j, "i": 1j, "x->+inf": 1.0, "x->-inf": -1.0}
        return {"1": 1.0, "-1": -1.0, "chimney-top": 1j, "lower-inf": -1j}
