"""End-to-end verification pipelines: modulus-ratio tables for the strip and
chimney deformations and weak* convergence tables for scaled pull-back
currents.

Ratio tables track mod G^eps_{I,J} / mod G^eps_{I0,J0} against the
classified limit (0 or 1 for the strip, 0/1/2 for the chimney).  Current
tables track eps * (pull-back Liouville) for the strip shrink and
eps* * (pull-back) for the stretch and chimney flows, with
eps* = 1 / mod G^eps_{I0,J0}.  Limits are extrapolated linearly in the rate
variable of the corresponding theorem (eps, respectively eps*), which the
tails follow to first order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle import GeodesicBox, ccw_gap, log_cross_ratio_angles, log_cross_ratio_ext
from .conformal import Modulus, quad_modulus_from_log
from .currents import DiracLamination, pullback_liouville
from .delgrid import chimney_family_domain, grid_modulus, strip_family_domain
from .domains import (
    BOTTOM,
    CHIMNEY,
    CHIMNEY_TOP,
    Deformation,
    HORIZONTAL_SHRINK,
    LEFT_RAY,
    LEFT_WALL,
    LOWER_INF,
    RIGHT_RAY,
    RIGHT_WALL,
    STRIP,
    TOP,
    VERTICAL_SHRINK,
    ChimneyPrimeEnd,
    PrimeEndArc,
    StripBoundaryMap,
    StripPrimeEnd,
    canonical_arcs,
    deform_arc,
    strip_parameter_box,
    strip_separating_box,
    strip_vertical_lamination,
)

ANGLE_REJECT_TOL = 1e-9


class ScenarioError(ValueError):
    """Scenario arcs invalid or unclassifiable."""


def geometric_schedule(k_min: int = 1, k_max: int = 16) -> np.ndarray:
    """The default eps schedule 2^-k_min .. 2^-k_max."""
    return 2.0 ** -np.arange(k_min, k_max + 1, dtype=float)


@dataclass(frozen=True)
class Scenario:
    """A connecting-family scenario on one of the two domains."""

    scenario_id: str
    domain: str
    I: PrimeEndArc
    J: PrimeEndArc
    method: str = "elliptic"  # elliptic | grid | both

    def __post_init__(self):
        if self.domain not in (STRIP, CHIMNEY):
            raise ScenarioError(f"unknown domain {self.domain!r}")
        # arcs must be disjoint: neither endpoint of J inside I and vice versa
        for k in self.J.walk_keys():
            if self.I.contains_key(k):
                raise ScenarioError(f"{self.scenario_id}: arcs overlap")
        for k in self.I.walk_keys():
            if self.J.contains_key(k):
                raise ScenarioError(f"{self.scenario_id}: arcs overlap")
        # finite modulus at eps = 1 (arc closures disjoint)
        L = family_log_cross_ratio(self.domain, self.I, self.J, 1.0)
        if not (L > 0.0 and math.isfinite(L)):
            raise ScenarioError(f"{self.scenario_id}: degenerate family at eps=1")


@dataclass(frozen=True)
class ScaleSchedule:
    """Scaling sequence for a current pipeline: eps for the strip shrink,
    eps* = 1/mod G^eps_{I0,J0} for the stretch and chimney flows."""

    kind: str  # "epsilon" | "epsilon-star"
    epsilons: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in ("epsilon", "epsilon-star"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        eps = np.asarray(self.epsilons, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if np.any(np.diff(eps) >= 0.0):
            raise ValueError("epsilon schedule must be strictly decreasing")
        if np.any(vals <= 0.0) or np.any(np.diff(vals) >= 0.0):
            raise ValueError("scale values must be positive and decreasing")
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "values", vals)


def _deformation(domain: str, eps: float) -> Deformation:
    kind = HORIZONTAL_SHRINK if domain == STRIP else VERTICAL_SHRINK
    return Deformation(kind, eps)


def family_log_cross_ratio(domain: str, I: PrimeEndArc, J: PrimeEndArc,
                           eps: float) -> float:
    """Liouville measure of the box of the deformed arc pair."""
    d = _deformation(domain, eps)
    Ie, Je = deform_arc(d, I), deform_arc(d, J)
    if domain == STRIP:
        coords = [Ie.start.halfplane(), Ie.end.halfplane(),
                  Je.start.halfplane(), Je.end.halfplane()]
        return log_cross_ratio_ext(*coords)
    a, b = Ie.angles()
    c, dd = Je.angles()
    return log_cross_ratio_angles(a, b, c, dd)


def family_modulus(domain: str, I: PrimeEndArc, J: PrimeEndArc,
                   eps: float) -> Modulus:
    """mod G^eps_{I,J} through the Riemann map and the elliptic formula."""
    return quad_modulus_from_log(family_log_cross_ratio(domain, I, J, eps))


def reference_modulus(domain: str, eps: float) -> Modulus:
    """mod G^eps_{I0,J0} for the domain's canonical arc pair."""
    I0, J0 = canonical_arcs(domain)
    return family_modulus(domain, I0, J0, eps)


def epsilon_star_schedule(domain: str, epsilons) -> ScaleSchedule:
    """eps* = 1/mod G^eps_{I0,J0}, positive and strictly decreasing."""
    eps = np.asarray(list(epsilons), dtype=float)
    vals = np.array([1.0 / reference_modulus(domain, e).value for e in eps])
    return ScaleSchedule("epsilon-star", eps, vals)


# ---------------------------------------------------------------------------
# classification of expected ratio limits
# ---------------------------------------------------------------------------

_STRIP_LEFT_KEY = (3, 0.0)
_STRIP_RIGHT_KEY = (1, 0.0)
_CHIMNEY_TOP_KEY = (2, 0.0)
_CHIMNEY_CORNER_KEYS = ((1, 0.0), (3, 0.0))  # z = +1 and z = -1


def _reject_endpoints_at(arc: PrimeEndArc, keys, what: str) -> None:
    for k in keys:
        if arc.has_endpoint_key(k):
            raise ScenarioError(
                f"arc endpoint exactly at a classification point ({what}); "
                "unclassifiable scenario rejected"
            )


def classify_strip(I: PrimeEndArc, J: PrimeEndArc) -> float:
    """Expected ratio limit for the strip: 1 when the arc pair straddles the
    two strip ends (in either orientation), 0 otherwise."""
    ends = (_STRIP_LEFT_KEY, _STRIP_RIGHT_KEY)
    _reject_endpoints_at(I, ends, "strip end")
    _reject_endpoints_at(J, ends, "strip end")
    left_in_I, right_in_I = (I.contains_key(k) for k in ends)
    left_in_J, right_in_J = (J.contains_key(k) for k in ends)
    if (left_in_I and right_in_J) or (right_in_I and left_in_J):
        return 1.0
    return 0.0


def classify_chimney(I: PrimeEndArc, J: PrimeEndArc) -> float:
    """Expected ratio limit for the chimney: 0 when the chimney top is not
    interior to I, otherwise the number of corners +-1 covered by J."""
    specials = (_CHIMNEY_TOP_KEY,) + _CHIMNEY_CORNER_KEYS
    _reject_endpoints_at(I, specials, "chimney top/corner")
    _reject_endpoints_at(J, specials, "chimney top/corner")
    if not I.contains_key(_CHIMNEY_TOP_KEY):
        return 0.0
    return float(sum(1 for k in _CHIMNEY_CORNER_KEYS if J.contains_key(k)))


# ---------------------------------------------------------------------------
# grid-path domains from arcs
# ---------------------------------------------------------------------------

def _strip_side_intervals(arc: PrimeEndArc):
    """Finite-coordinate intervals of the arc on each strip side plus flags
    for passing through the two ends; assumes the arc endpoints are regular
    side points."""
    s, e = arc.start, arc.end
    has_left = arc.contains_angle(math.pi)
    has_right = arc.contains_angle(0.0)
    pieces = {BOTTOM: [], TOP: []}

    def seg(side, a, b):
        pieces[side].append((a, b))

    if not has_left and not has_right:
        if s.side != e.side:
            raise ScenarioError("arc crossing no end must stay on one side")
        if s.side == BOTTOM:
            seg(BOTTOM, s.x, e.x)
        else:
            seg(TOP, e.x, s.x)
        return pieces, has_left, has_right

    if has_left and not has_right:
        # ccw through the left end: start on top, end on bottom
        seg(TOP, -math.inf, s.x)
        seg(BOTTOM, -math.inf, e.x)
        return pieces, has_left, has_right
    if has_right and not has_left:
        # ccw through the right end: start on bottom, end on top
        seg(BOTTOM, s.x, math.inf)
        seg(TOP, e.x, math.inf)
        return pieces, has_left, has_right
    raise ScenarioError("arc through both strip ends leaves no complement")


def strip_grid_domain(I: PrimeEndArc, J: PrimeEndArc, eps: float,
                      R: float = 12.0, n: int = 12):
    """Truncated-strip mesh for mod G^eps_{I,J}."""
    d = _deformation(STRIP, eps)
    Ie, Je = deform_arc(d, I), deform_arc(d, J)
    pi_, il, ir = _strip_side_intervals(Ie)
    pj_, jl, jr = _strip_side_intervals(Je)

    sides = {}
    min_gap = math.inf
    for side in (BOTTOM, TOP):
        marks = [(a, b, "I") for (a, b) in pi_[side]]
        marks += [(a, b, "J") for (a, b) in pj_[side]]
        marks.sort(key=lambda t: (t[0], t[1]))
        breaks, labels = [], []
        cursor = -math.inf
        for (a, b, lab) in marks:
            if a > cursor:
                labels.append(None)  # unlabeled gap before this mark
            if math.isfinite(a):
                breaks.append(a)
            if math.isfinite(b):
                breaks.append(b)
            labels.append(lab)
            cursor = b
        if not marks or math.isfinite(marks[-1][1]):
            labels.append(None)  # trailing unlabeled piece to the truncation
        sides[side] = (breaks, labels)
        for x1, x2 in zip(breaks[:-1], breaks[1:]):
            if x2 > x1:
                min_gap = min(min_gap, x2 - x1)

    left_label = "I" if il else ("J" if jl else None)
    right_label = "I" if ir else ("J" if jr else None)
    y_fine = None
    if math.isfinite(min_gap):
        y_fine = min_gap / 6.0
    all_breaks = [abs(b) for b in sides[BOTTOM][0] + sides[TOP][0]]
    if all_breaks:
        R = max(R, 1.4 * max(all_breaks))
    return strip_family_domain(sides[BOTTOM], sides[TOP],
                               left_label=left_label, right_label=right_label,
                               R=R, n=n, y_fine=y_fine)


_CHIMNEY_SIDE_RANK = {RIGHT_RAY: 0, RIGHT_WALL: 1, CHIMNEY_TOP: 2,
                      LEFT_WALL: 3, LEFT_RAY: 4, LOWER_INF: 5}


def _chimney_walk_key(p: ChimneyPrimeEnd):
    rank = _CHIMNEY_SIDE_RANK[p.side]
    if p.side == RIGHT_RAY:
        return (rank, -p.coord)
    if p.side == RIGHT_WALL:
        return (rank, p.coord)
    if p.side == LEFT_WALL:
        return (rank, -p.coord)
    if p.side == LEFT_RAY:
        return (rank, -p.coord)
    return (rank, 0.0)


def _is_ahead(side, enter, target):
    """Whether `target` lies at or after `enter` walking ccw along `side`."""
    if side == RIGHT_WALL:
        return target >= enter
    return target <= enter  # rays and left wall walk toward smaller coords


def _chimney_side_intervals(arc: PrimeEndArc):
    """Per-side coordinate intervals covered by a chimney arc, walking the
    boundary counterclockwise from start to end.

    Returns ({side: [(lo, hi), ...]}, flags) where the flags mark the two
    infinite prime ends when the arc passes strictly through them; an arc
    merely ending at an infinite prime end does not set its flag.
    """
    segs = {RIGHT_RAY: [], RIGHT_WALL: [], LEFT_WALL: [], LEFT_RAY: []}
    flags = {CHIMNEY_TOP: False, LOWER_INF: False}

    # full segments in ccw walk order: (side, entry coord, exit coord)
    FULL = [
        (RIGHT_RAY, math.inf, 1.0),
        (RIGHT_WALL, 0.0, math.inf),
        (CHIMNEY_TOP, None, None),
        (LEFT_WALL, math.inf, 0.0),
        (LEFT_RAY, -1.0, -math.inf),
        (LOWER_INF, None, None),
    ]
    n = len(FULL)
    idx = {side: i for i, (side, _, _) in enumerate(FULL)}
    s, e = arc.start, arc.end

    def record(side, c_in, c_out):
        lo, hi = min(c_in, c_out), max(c_in, c_out)
        if hi > lo:
            segs[side].append((lo, hi))

    i = idx[s.side]
    at_start = True
    for _ in range(2 * n + 2):
        side, c_in, c_out = FULL[i]
        symbol = side in (CHIMNEY_TOP, LOWER_INF)
        enter = s.coord if (at_start and not symbol) else c_in
        terminal = side == e.side and (
            (symbol and not at_start)
            or (not symbol and _is_ahead(side, enter, e.coord)
                and not (at_start and symbol))
        )
        if terminal and not symbol:
            record(side, enter, e.coord)
            return segs, flags
        if terminal:
            return segs, flags  # endpoint at an infinite prime end: no flag
        if symbol:
            if not at_start:
                flags[side] = True  # passed strictly through
        else:
            record(side, enter, c_out)
        i = (i + 1) % n
        at_start = False
    raise ScenarioError("arc walk did not terminate")


def chimney_grid_domain(I: PrimeEndArc, J: PrimeEndArc, eps: float,
                        R: float = 10.0, H: float = 8.0, n: int = 16,
                        half: bool = False):
    """Truncated-chimney mesh for mod G^eps_{I,J}."""
    d = _deformation(CHIMNEY, eps)
    Ie, Je = deform_arc(d, I), deform_arc(d, J)
    segs_i, flags_i = _chimney_side_intervals(Ie)
    segs_j, flags_j = _chimney_side_intervals(Je)

    def side_breaks(side):
        marks = [(a, b, "I") for a, b in segs_i[side]]
        marks += [(a, b, "J") for a, b in segs_j[side]]
        marks.sort(key=lambda t: (t[0], t[1]))
        breaks, labels = [], [None]
        for a, b, lab in marks:
            if math.isfinite(a):
                breaks.append(a)
            else:
                labels.pop()
            labels.append(lab)
            if math.isfinite(b):
                breaks.append(b)
                labels.append(None)
        return breaks, labels

    top_label = "I" if flags_i[CHIMNEY_TOP] else ("J" if flags_j[CHIMNEY_TOP] else None)
    far_label = "I" if flags_i[LOWER_INF] else ("J" if flags_j[LOWER_INF] else None)
    return chimney_family_domain(
        left_ray=side_breaks(LEFT_RAY),
        left_wall=side_breaks(LEFT_WALL),
        right_wall=side_breaks(RIGHT_WALL),
        right_ray=side_breaks(RIGHT_RAY),
        far_label=far_label, top_label=top_label,
        half=half, R=R, H=H, n=n,
    )


def family_modulus_grid(domain: str, I: PrimeEndArc, J: PrimeEndArc,
                        eps: float, n: int = None) -> Modulus:
    if domain == STRIP:
        return grid_modulus(strip_grid_domain(I, J, eps, n=n or 12))
    return grid_modulus(chimney_grid_domain(I, J, eps, n=n or 16))


# ---------------------------------------------------------------------------
# ratio tables
# ---------------------------------------------------------------------------

@dataclass
class RatioRow:
    epsilon: float
    modulus_I0J0: float
    modulus_IJ: float
    ratio: float
    grid_modulus_I0J0: float = math.nan
    grid_modulus_IJ: float = math.nan
    grid_ratio: float = math.nan


@dataclass
class RatioTable:
    scenario_id: str
    domain: str
    expected_limit: float
    rows: list
    method: str

    @property
    def final_gap(self) -> float:
        return abs(self.rows[-1].ratio - self.expected_limit)

    def gap_monotone_tail(self, n_tail: int = 8) -> bool:
        gaps = [abs(r.ratio - self.expected_limit) for r in self.rows[-n_tail:]]
        return all(g2 < g1 for g1, g2 in zip(gaps[:-1], gaps[1:]))

    @property
    def max_grid_disagreement(self) -> float:
        worst = 0.0
        for r in self.rows:
            if math.isfinite(r.grid_modulus_IJ):
                worst = max(worst,
                            abs(r.grid_modulus_IJ - r.modulus_IJ) / r.modulus_IJ,
                            abs(r.grid_modulus_I0J0 - r.modulus_I0J0) / r.modulus_I0J0)
        return worst


def _ratio_table(domain: str, I: PrimeEndArc, J: PrimeEndArc, schedule,
                 expected: float, scenario_id: str, method: str,
                 grid_eps_min: float, grid_n: int) -> RatioTable:
    rows = []
    for eps in schedule:
        m0 = reference_modulus(domain, eps).value
        m = family_modulus(domain, I, J, eps).value
        row = RatioRow(epsilon=eps, modulus_I0J0=m0, modulus_IJ=m, ratio=m / m0)
        if method in ("grid", "both") and eps >= grid_eps_min:
            I0, J0 = canonical_arcs(domain)
            g0 = family_modulus_grid(domain, I0, J0, eps, n=grid_n).value
            g = family_modulus_grid(domain, I, J, eps, n=grid_n).value
            row.grid_modulus_I0J0 = g0
            row.grid_modulus_IJ = g
            row.grid_ratio = g / g0
        rows.append(row)
    return RatioTable(scenario_id=scenario_id, domain=domain,
                      expected_limit=expected, rows=rows, method=method)


def ratio_table_strip(I: PrimeEndArc, J: PrimeEndArc, schedule=None,
                      scenario_id: str = "strip", method: str = "elliptic",
                      grid_eps_min: float = 2.0 ** -8,
                      grid_n: int = 12) -> RatioTable:
    """mod G^eps_{I,J} / mod G^eps_{I0,J0} with the classified limit."""
    schedule = geometric_schedule() if schedule is None else np.asarray(schedule)
    expected = classify_strip(I, J)
    return _ratio_table(STRIP, I, J, schedule, expected, scenario_id,
                        method, grid_eps_min, grid_n)


def ratio_table_chimney(I: PrimeEndArc, J: PrimeEndArc, schedule=None,
                        scenario_id: str = "chimney", method: str = "elliptic",
                        grid_eps_min: float = 2.0 ** -8,
                        grid_n: int = 16) -> RatioTable:
    schedule = geometric_schedule() if schedule is None else np.asarray(schedule)
    expected = classify_chimney(I, J)
    return _ratio_table(CHIMNEY, I, J, schedule, expected, scenario_id,
                        method, grid_eps_min, grid_n)


# ---------------------------------------------------------------------------
# current pipelines
# ---------------------------------------------------------------------------

@dataclass
class CurrentRow:
    box_id: str
    values: np.ndarray
    limit: float
    target: float
    gap: float
    rate: float


@dataclass
class CurrentTable:
    pipeline: str
    schedule: ScaleSchedule
    rows: list
    constant: float = math.nan       # fitted global normalization
    constant_residual: float = math.nan

    def row(self, box_id: str) -> CurrentRow:
        for r in self.rows:
            if r.box_id == box_id:
                return r
        raise KeyError(box_id)


def fit_limit_linear(rate_values, values, n_tail: int = 6):
    """Intercept of the linear fit value = limit + slope * rate_value over
    the tail of the schedule; first-order exact for the pipelines here."""
    rv = np.asarray(rate_values, dtype=float)
    vv = np.asarray(values, dtype=float)
    n = min(n_tail, len(rv))
    if n < 2:
        return float(vv[-1]), 0.0
    A = np.vstack([np.ones(n), rv[-n:]]).T
    coef, *_ = np.linalg.lstsq(A, vv[-n:], rcond=None)
    return float(coef[0]), float(coef[1])


def _loglog_rate(rate_values, values, limit) -> float:
    resid = np.abs(np.asarray(values) - limit)
    mask = resid > 1e-13
    if mask.sum() < 4:
        return math.nan
    return float(np.polyfit(np.log(np.asarray(rate_values)[mask]),
                            np.log(resid[mask]), 1)[0])


def _current_rows(values_per_box, schedule: ScaleSchedule, targets) -> list:
    rows = []
    for box_id, vals in values_per_box.items():
        vals = np.asarray(vals, dtype=float)
        limit, _ = fit_limit_linear(schedule.values, vals)
        tgt = targets.get(box_id, math.nan)
        rows.append(CurrentRow(
            box_id=box_id, values=vals, limit=limit, target=tgt,
            gap=abs(limit - tgt) if math.isfinite(tgt) else math.nan,
            rate=_loglog_rate(schedule.values, vals, limit),
        ))
    return rows


def _clamp_measure(L: float) -> float:
    if L < -1e-9:
        raise ValueError(f"negative box measure {L}")
    return max(L, 0.0)


def strip_shrink_currents(boxes: dict, epsilons=None) -> CurrentTable:
    """eps x (pull-back of Liouville by the boundary map of the vertical
    shrink T_eps).  On the strip the vertical shrink acts as the horizontal
    stretch H_{1/eps} up to conformal rescaling, so the pull-back is
    evaluated exactly in half-plane coordinates.  The fitted constant links
    box limits to the vertical lamination's box measures."""
    eps = geometric_schedule() if epsilons is None else np.asarray(epsilons, float)
    schedule = ScaleSchedule("epsilon", eps, eps.copy())
    lam = strip_vertical_lamination()

    values = {}
    for box_id, box in boxes.items():
        h_eps = [StripBoundaryMap(1.0 / e) for e in eps]
        values[box_id] = [_clamp_measure(e * pullback_liouville(h, box))
                          for e, h in zip(eps, h_eps)]

    measures = {bid: lam.box_measure(box) for bid, box in boxes.items()}
    rows = _current_rows(values, schedule, targets={})

    on_support = [(r, measures[r.box_id]) for r in rows if measures[r.box_id] > 0]
    if on_support:
        num = sum(r.limit * m for r, m in on_support)
        den = sum(m * m for _, m in on_support)
        c = num / den
        resid = max(abs(r.limit - c * m) / (c * m) for r, m in on_support)
    else:
        c, resid = math.nan, math.nan
    for r in rows:
        r.target = (c if math.isfinite(c) else math.nan) * measures[r.box_id]
        r.gap = abs(r.limit - r.target) if math.isfinite(r.target) else math.nan
    return CurrentTable("strip-shrink", schedule, rows,
                        constant=c, constant_residual=resid)


def strip_stretch_currents(boxes: dict, epsilons=None) -> CurrentTable:
    """eps* x (pull-back by the boundary map of the vertical stretch
    T_{1/eps}), realized as the horizontal shrink H_eps.  Boxes separating
    the two strip-end points share a common positive limit; the limit
    lamination is the Dirac mass on the geodesic joining them."""
    eps = geometric_schedule() if epsilons is None else np.asarray(epsilons, float)
    schedule = epsilon_star_schedule(STRIP, eps)

    values = {}
    for box_id, box in boxes.items():
        vals = []
        for e, scale in zip(eps, schedule.values):
            h = StripBoundaryMap(e)
            vals.append(_clamp_measure(scale * pullback_liouville(h, box)))
        values[box_id] = vals

    target_lam = DiracLamination(((_strip_end_geodesic(), 1.0),))
    sep = {bid: target_lam.box_measure(box) for bid, box in boxes.items()}
    rows = _current_rows(values, schedule, targets={})

    separating = [r for r in rows if sep[r.box_id] > 0]
    if separating:
        v = float(np.mean([r.limit for r in separating]))
        spread = (max(r.limit for r in separating) - min(r.limit for r in separating))
        resid = spread / v if v else math.nan
    else:
        v, resid = math.nan, math.nan
    for r in rows:
        r.target = v * sep[r.box_id] if math.isfinite(v) else math.nan
        r.gap = abs(r.limit - r.target) if math.isfinite(r.target) else math.nan
    return CurrentTable("strip-stretch", schedule, rows,
                        constant=v, constant_residual=resid)


def _strip_end_geodesic():
    from .circle import Geodesic
    return Geodesic.from_angles(math.pi, 0.0)  # disk points -1 and +1


def _chimney_dirac_pair():
    from .circle import Geodesic
    top = 0.5 * math.pi
    return (Geodesic.from_angles(top, 0.0),      # (i, 1)
            Geodesic.from_angles(top, math.pi))  # (i, -1)


def chimney_currents(boxes: dict, epsilons=None) -> CurrentTable:
    """eps* x (pull-back by the boundary map of T_eps) on the chimney.

    Boxes are given as counterclockwise quadruples of chimney prime ends;
    the pull-back acts exactly on prime ends (walls scale by eps), keeping
    corner pinches resolvable at every scheduled eps.  Limits follow the
    Dirac pair on the geodesics (i, 1) and (i, -1)."""
    eps = geometric_schedule() if epsilons is None else np.asarray(epsilons, float)
    schedule = epsilon_star_schedule(CHIMNEY, eps)

    values = {}
    for box_id, ends in boxes.items():
        vals = []
        for e, scale in zip(eps, schedule.values):
            d = Deformation(VERTICAL_SHRINK, e)
            angs = [p.deform(d).angle() for p in ends]
            vals.append(_clamp_measure(scale * log_cross_ratio_angles(*angs)))
        values[box_id] = vals

    g1, g2 = _chimney_dirac_pair()
    def pair_count(ends):
        box = GeodesicBox.from_angles(*[p.angle() for p in ends])
        return float(box.separates(g1)) + float(box.separates(g2))

    counts = {bid: pair_count(ends) for bid, ends in boxes.items()}
    rows = _current_rows(values, schedule, targets={})

    singles = [r for r in rows if counts[r.box_id] == 1.0]
    if singles:
        v = float(np.mean([r.limit for r in singles]))
        spread = max(r.limit for r in singles) - min(r.limit for r in singles)
        resid = spread / v if v else math.nan
    else:
        v, resid = math.nan, math.nan
    for r in rows:
        r.target = v * counts[r.box_id] if math.isfinite(v) else math.nan
        r.gap = abs(r.limit - r.target) if math.isfinite(r.target) else math.nan
    return CurrentTable("chimney", schedule, rows,
                        constant=v, constant_residual=resid)


def rate_report(table: CurrentTable, min_points: int = 4) -> dict:
    """Log-log slopes of |value - limit| against the schedule's rate
    variable, per box; at least `min_points` usable points required."""
    out = {}
    for r in table.rows:
        resid = np.abs(r.values - r.limit)
        usable = int(np.sum(resid > 1e-13))
        if usable < min_points:
            raise ValueError(
                f"{table.pipeline}/{r.box_id}: only {usable} usable points"
            )
        out[r.box_id] = _loglog_rate(table.schedule.values, r.values, r.limit)
    return out


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

CSV_COLUMNS = [
    "scenario-id", "epsilon", "modulus_I0J0", "modulus_IJ", "ratio",
    "expected_limit", "box-id", "scaled_measure", "target", "gap", "method",
]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "" if math.isnan(x) else f"{x:.12g}"
    return str(x)


def ratio_csv_records(table: RatioTable) -> list:
    records = []
    for r in table.rows:
        records.append({
            "scenario-id": table.scenario_id, "epsilon": r.epsilon,
            "modulus_I0J0": r.modulus_I0J0, "modulus_IJ": r.modulus_IJ,
            "ratio": r.ratio, "expected_limit": table.expected_limit,
            "box-id": None, "scaled_measure": None, "target": None,
            "gap": abs(r.ratio - table.expected_limit), "method": "elliptic",
        })
        if math.isfinite(r.grid_ratio):
            records.append({
                "scenario-id": table.scenario_id, "epsilon": r.epsilon,
                "modulus_I0J0": r.grid_modulus_I0J0,
                "modulus_IJ": r.grid_modulus_IJ,
                "ratio": r.grid_ratio, "expected_limit": table.expected_limit,
                "box-id": None, "scaled_measure": None, "target": None,
                "gap": abs(r.grid_ratio - table.expected_limit),
                "method": "grid",
            })
    return records


def current_csv_records(table: CurrentTable) -> list:
    records = []
    for r in table.rows:
        for eps, val in zip(table.schedule.epsilons, r.values):
            records.append({
                "scenario-id": table.pipeline, "epsilon": eps,
                "modulus_I0J0": None, "modulus_IJ": None, "ratio": None,
                "expected_limit": None, "box-id": r.box_id,
                "scaled_measure": val, "target": r.target,
                "gap": abs(val - r.target) if math.isfinite(r.target) else None,
                "method": "elliptic",
            })
    return records


def write_csv(path, records) -> None:
    import csv as _csv
    with open(path, "w", newline="") as fh:
        w = _csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for rec in records:
            w.writerow({k: _fmt(rec.get(k)) for k in CSV_COLUMNS})


# ---------------------------------------------------------------------------
# default scenarios and boxes (the verification corpus)
# ---------------------------------------------------------------------------

def _strip_left_arc(p, q):
    """(-inf, p) u (-inf + i, q + i), through the left end."""
    return PrimeEndArc(STRIP, StripPrimeEnd(TOP, q), StripPrimeEnd(BOTTOM, p))


def _strip_right_arc(r, s):
    """(r, inf) u (s + i, inf + i), through the right end."""
    return PrimeEndArc(STRIP, StripPrimeEnd(BOTTOM, r), StripPrimeEnd(TOP, s))


def _strip_bottom_arc(x1, x2):
    return PrimeEndArc(STRIP, StripPrimeEnd(BOTTOM, x1), StripPrimeEnd(BOTTOM, x2))


def _strip_top_arc(x1, x2):
    return PrimeEndArc(STRIP, StripPrimeEnd(TOP, x2), StripPrimeEnd(TOP, x1))


def default_strip_scenarios() -> list:
    """Three scenarios per case of the strip ratio table."""
    return [
        Scenario("strip-lim1-a", STRIP, _strip_left_arc(0.4, -0.3), _strip_right_arc(0.9, 1.1)),
        Scenario("strip-lim1-b", STRIP, _strip_left_arc(-0.5, 0.2), _strip_right_arc(0.6, 0.7)),
        Scenario("strip-lim1-c", STRIP, _strip_left_arc(0.1, 0.3), _strip_right_arc(1.4, 1.2)),
        Scenario("strip-lim1-mir-a", STRIP, _strip_right_arc(0.9, 1.1), _strip_left_arc(0.4, -0.3)),
        Scenario("strip-lim1-mir-b", STRIP, _strip_right_arc(0.6, 0.7), _strip_left_arc(-0.5, 0.2)),
        Scenario("strip-lim1-mir-c", STRIP, _strip_right_arc(1.4, 1.2), _strip_left_arc(0.1, 0.3)),
        Scenario("strip-lim0-a", STRIP, _strip_bottom_arc(0.0, 1.0), _strip_bottom_arc(30.0, 31.0)),
        Scenario("strip-lim0-b", STRIP, _strip_bottom_arc(-2.5, -2.0), _strip_top_arc(2.0, 2.5)),
        Scenario("strip-lim0-c", STRIP, _strip_bottom_arc(0.0, 1.0), _strip_top_arc(0.0, 1.0)),
    ]


def default_chimney_scenarios() -> list:
    """Scenarios with expected limits 1 (both orientations), 2 and 0."""
    pe = ChimneyPrimeEnd
    return [
        Scenario("chimney-lim1", CHIMNEY,
                 PrimeEndArc(CHIMNEY, pe(RIGHT_WALL, 1.2), pe(LEFT_WALL, 3.0)),
                 PrimeEndArc(CHIMNEY, pe(RIGHT_RAY, 2.2), pe(RIGHT_WALL, 0.2))),
        Scenario("chimney-lim1-mir", CHIMNEY,
                 PrimeEndArc(CHIMNEY, pe(RIGHT_WALL, 3.0), pe(LEFT_WALL, 1.2)),
                 PrimeEndArc(CHIMNEY, pe(LEFT_WALL, 0.2), pe(LEFT_RAY, -2.2))),
        Scenario("chimney-lim2", CHIMNEY,
                 PrimeEndArc(CHIMNEY, pe(RIGHT_WALL, 2.0), pe(LEFT_WALL, 2.0)),
                 PrimeEndArc(CHIMNEY, pe(LEFT_WALL, 0.4), pe(RIGHT_WALL, 0.4))),
        Scenario("chimney-lim0", CHIMNEY,
                 PrimeEndArc(CHIMNEY, pe(RIGHT_WALL, 2.0), pe(RIGHT_WALL, 2.5)),
                 PrimeEndArc(CHIMNEY, pe(RIGHT_RAY, 4.0), pe(RIGHT_RAY, 2.0))),
    ]


def default_strip_shrink_boxes() -> dict:
    off_support = GeodesicBox.from_angles(
        StripPrimeEnd(BOTTOM, 0.0).angle(), StripPrimeEnd(BOTTOM, 1.0).angle(),
        StripPrimeEnd(BOTTOM, 2.0).angle(), StripPrimeEnd(BOTTOM, 3.0).angle())
    return {
        "param-0-1": strip_parameter_box(0.0, 1.0),
        "param-2-5": strip_parameter_box(2.0, 5.0),
        "off-support": off_support,
    }


def default_strip_stretch_boxes() -> dict:
    return {
        "sep-a": strip_separating_box(-1.0, -0.5, 0.5, 1.0),
        "sep-b": strip_separating_box(-1.5, -0.4, 0.8, 0.9),
        "sep-c": strip_separating_box(-0.8, -0.7, 0.5, 1.4),
        "nonsep": strip_parameter_box(0.0, 1.0),
    }


def default_chimney_boxes() -> dict:
    pe = ChimneyPrimeEnd
    return {
        "pair-i-1": (pe(RIGHT_WALL, 3.0), pe(LEFT_WALL, 3.0),
                     pe(RIGHT_RAY, 1.5), pe(RIGHT_WALL, 0.5)),
        "pair-i-m1": (pe(RIGHT_WALL, 3.0), pe(LEFT_WALL, 3.0),
                      pe(LEFT_WALL, 0.5), pe(LEFT_RAY, -1.5)),
        "both-pairs": (pe(RIGHT_WALL, 3.0), pe(LEFT_WALL, 3.0),
                       pe(LEFT_WALL, 0.5), pe(RIGHT_WALL, 0.5)),
        "away-right": (pe(RIGHT_RAY, 3.0), pe(RIGHT_RAY, 1.5),
                       pe(RIGHT_WALL, 0.3), pe(RIGHT_WALL, 0.8)),
        "away-left": (pe(LEFT_WALL, 0.8), pe(LEFT_WALL, 0.3),
                      pe(LEFT_RAY, -1.5), pe(LEFT_RAY, -3.0)),
    }
