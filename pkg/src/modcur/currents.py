"""The Liouville measure on boxes of geodesics, measured laminations and
weak* comparison of scaled box measures.

The Liouville measure of a box equals the log cross ratio of its four
corners; it is invariant under disk Mobius transformations and additive
under splitting an arc.  Pull-backs by circle homeomorphisms act through
(h* L)(B) = L(h(B)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle import (
    BoundaryMap,
    Geodesic,
    GeodesicBox,
    arc_contains,
    ccw_gap,
    log_cross_ratio_angles,
)


def liouville_box(box: GeodesicBox) -> float:
    """Liouville measure of a box: log ((a-c)(b-d)) / ((a-d)(b-c))."""
    return log_cross_ratio_angles(*box.angles)


def pullback_liouville(h: BoundaryMap, box: GeodesicBox) -> float:
    """(h* L)(box) = L(h(box)) for a monotone circle map h.

    Maps that carry an exact representation of their boundary action may
    provide `pullback_log_cross_ratio` for evaluation beyond floating-point
    angle resolution; the generic path maps the four corners.
    """
    special = getattr(h, "pullback_log_cross_ratio", None)
    if special is not None:
        return special(box)
    return liouville_box(h.map_box(box))


class MeasuredLamination:
    """A geodesic current supported on pairwise disjoint geodesics.

    Concrete variants implement `box_measure`.
    """

    def box_measure(self, box: GeodesicBox) -> float:
        raise NotImplementedError

    def charges_boundary(self, box: GeodesicBox, margin: float) -> bool:
        """Whether a corner of the box comes within `margin` (in angle) of
        the lamination's endpoint set; used to enforce the weak* box rule."""
        raise NotImplementedError


def _crossing(g1: Geodesic, g2: Geodesic) -> bool:
    """Strict interleaving of endpoint pairs on the circle."""
    p, q = g1.p.theta, g1.q.theta
    r, s = g2.p.theta, g2.q.theta
    if {p, q} & {r, s}:
        return False  # shared ideal endpoint is not a transverse crossing
    def inside(t):  # strictly inside ccw arc (p, q)
        return 0.0 < ccw_gap(p, t) < ccw_gap(p, q)
    return inside(r) != inside(s)


@dataclass(frozen=True)
class DiracLamination(MeasuredLamination):
    """Finite sum of Dirac masses on pairwise disjoint geodesics."""

    atoms: tuple = field(default_factory=tuple)  # ((Geodesic, mass), ...)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        for _, mass in atoms:
            if mass < 0.0:
                raise ValueError("atom masses must be nonnegative")
        for i in range(len(atoms)):
            for j in range(i + 1, len(atoms)):
                if _crossing(atoms[i][0], atoms[j][0]):
                    raise ValueError(
                        f"atoms {i} and {j} cross; not a lamination"
                    )

    def box_measure(self, box: GeodesicBox) -> float:
        return sum(mass for g, mass in self.atoms if box.separates(g))

    def charges_boundary(self, box: GeodesicBox, margin: float) -> bool:
        corner_angles = box.angles
        for g, _ in self.atoms:
            for t in (g.p.theta, g.q.theta):
                for tc in corner_angles:
                    gap = min(ccw_gap(t, tc), ccw_gap(tc, t))
                    if gap < margin:
                        return True
        return False


def lamination_box_measure(lam: MeasuredLamination, box: GeodesicBox) -> float:
    """Mass the lamination assigns to the box of geodesics."""
    return lam.box_measure(box)


@dataclass
class BoxConvergence:
    """Per-box convergence record of a scaled measure sequence."""

    box_id: str
    values: np.ndarray
    limit_estimate: float
    target: float
    gap: float
    rate: float  # empirical log-log slope of |value - limit| vs eps; nan if unusable


@dataclass
class ConvergenceTable:
    epsilons: np.ndarray
    rows: list

    def as_records(self):
        out = []
        for row in self.rows:
            for eps, val in zip(self.epsilons, row.values):
                out.append(
                    {
                        "box-id": row.box_id,
                        "epsilon": eps,
                        "scaled_measure": val,
                        "target": row.target,
                        "gap": row.gap,
                    }
                )
        return out


def _aitken_limit(values: np.ndarray) -> float:
    """Limit estimate: Aitken delta-squared on the last three values,
    falling back to the last value when the step ratio degenerates."""
    if len(values) < 3:
        return float(values[-1])
    v0, v1, v2 = values[-3], values[-2], values[-1]
    denom = (v2 - v1) - (v1 - v0)
    if denom == 0.0 or not math.isfinite(denom):
        return float(v2)
    acc = v2 - (v2 - v1) ** 2 / denom
    # guard against wild extrapolation from a noisy tail
    if not math.isfinite(acc) or abs(acc - v2) > 10.0 * abs(v2 - v0) + 1e-12:
        return float(v2)
    return float(acc)


def _empirical_rate(eps: np.ndarray, values: np.ndarray, limit: float) -> float:
    resid = np.abs(values - limit)
    mask = resid > 1e-14
    if mask.sum() < 4:
        return math.nan
    x = np.log(eps[mask])
    y = np.log(resid[mask])
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


def weakstar_report(
    scaled_measures,
    target: MeasuredLamination,
    boxes,
    box_ids=None,
) -> ConvergenceTable:
    """Tabulate scaled box measures against a limit lamination.

    `scaled_measures` is a sequence of (eps, measure) with eps strictly
    decreasing and measure either a callable box -> value or a mapping
    indexed like `boxes`.  Boxes are assumed to satisfy the boundary-mass
    rule for the target (the caller constructs them with a margin).
    """
    eps = np.array([e for e, _ in scaled_measures], dtype=float)
    if len(eps) == 0:
        raise ValueError("empty measure sequence")
    if np.any(np.diff(eps) >= 0.0):
        raise ValueError("epsilon schedule must be strictly decreasing")
    if box_ids is None:
        box_ids = [f"box{i}" for i in range(len(boxes))]

    rows = []
    for bid, box in zip(box_ids, boxes):
        vals = []
        for _, measure in scaled_measures:
            if callable(measure):
                vals.append(float(measure(box)))
            else:
                vals.append(float(measure[bid]))
        vals = np.array(vals)
        limit = _aitken_limit(vals)
        tgt = target.box_measure(box)
        rows.append(
            BoxConvergence(
                box_id=bid,
                values=vals,
                limit_estimate=limit,
                target=tgt,
                gap=abs(limit - tgt),
                rate=_empirical_rate(eps, vals, limit),
            )
        )
    return ConvergenceTable(epsilons=eps, rows=rows)
