"""Acceptance suite: one callable per criterion, each returning a result
with a pass flag and measured quantities.  `run_all` prints one line per
criterion and reports overall success; the CLI `accept` subcommand and the
test suite both drive this module.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .circle import GeodesicBox, MobiusDisk, log_cross_ratio_angles
from .conformal import (
    Continuum,
    annulus_modulus,
    mod_upper_bound,
    quad_modulus,
    rel_distance,
)
from .currents import liouville_box
from .delgrid import (
    annulus_domain,
    chimney_family_domain,
    disk_quad_domain,
    family_property_check,
    grid_modulus,
    grid_modulus_dual,
    plane_condenser_modulus,
    rect_domain,
)
from .domains import (
    CHIMNEY,
    STRIP,
    ChimneyBoundaryMap,
    StripBoundaryMap,
    canonical_arcs,
)
from .experiments import (
    chimney_currents,
    chimney_grid_domain,
    default_chimney_boxes,
    default_chimney_scenarios,
    default_strip_scenarios,
    default_strip_shrink_boxes,
    default_strip_stretch_boxes,
    epsilon_star_schedule,
    family_modulus,
    geometric_schedule,
    ratio_table_chimney,
    ratio_table_strip,
    strip_shrink_currents,
    strip_stretch_currents,
)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: list = field(default_factory=list)
    seconds: float = 0.0

    def check(self, ok: bool, message: str) -> None:
        self.details.append(("PASS" if ok else "FAIL") + ": " + message)
        if not ok:
            self.passed = False


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.time()
        res = fn(*a, **kw)
        res.seconds = time.time() - t0
        return res
    return wrapper


@_timed
def criterion_1_quadrilateral_calculus() -> CriterionResult:
    """Self-dual value, duality products and the modulus asymptote."""
    res = CriterionResult("1 quadrilateral calculus", True)

    m2 = quad_modulus(2.0).value
    res.check(abs(m2 - 1.0) <= 1e-10, f"quad_modulus(2) = {m2!r} within 1e-10 of 1")

    rng = np.random.default_rng(20240601)
    lams = np.exp(rng.uniform(math.log(1.00001), math.log(1e6), size=1000))
    worst = 0.0
    for lam in lams:
        prod = quad_modulus(lam).value * quad_modulus(lam / (lam - 1.0)).value
        worst = max(worst, abs(prod - 1.0))
    res.check(worst <= 1e-8, f"duality product off by {worst:.2e} <= 1e-8 (1000 samples)")

    gap6 = abs(quad_modulus(1e6).value - math.log(1e6) / math.pi
               - 2.0 * math.log(4.0) / math.pi)
    res.check(gap6 < 1e-3, f"asymptote gap at lambda=1e6: {gap6:.2e} < 1e-3")

    lams = np.logspace(3, 8, 26)
    gaps = [abs(quad_modulus(l).value - math.log(l) / math.pi
                - 2.0 * math.log(4.0) / math.pi) for l in lams]
    mono = all(g2 < g1 for g1, g2 in zip(gaps[:-1], gaps[1:]))
    res.check(mono, "asymptote gap decreases monotonically over lambda = 1e3..1e8")
    return res


@_timed
def criterion_2_oracle_agreement() -> CriterionResult:
    """Grid oracle against exact values and duality."""
    res = CriterionResult("2 oracle agreement", True)

    for (W, H) in ((2.0, 1.0), (1.0, 3.0)):
        m = grid_modulus(rect_domain(W, H, 48)).value
        rel = abs(m - H / W) / (H / W)
        res.check(rel <= 0.005, f"rectangle {W}x{H}: rel error {rel:.2e} <= 0.5%")

    ma = grid_modulus(annulus_domain(1.0, 4.0, 24, 96)).value
    rel = abs(ma - annulus_modulus(1.0, 4.0)) / annulus_modulus(1.0, 4.0)
    res.check(rel <= 0.01, f"annulus 1:4: rel error {rel:.2e} <= 1%")

    quads = []
    for lam in (2.0, 5.0):
        th = math.asin(1.0 / math.sqrt(lam))
        quads.append(((th, math.pi - th, math.pi + th, 2.0 * math.pi - th), lam))
    asym = (0.3, 1.4, 3.0, 4.9)
    quads.append((asym, math.exp(log_cross_ratio_angles(*asym))))

    for angles, lam in quads:
        dom = disk_quad_domain(angles, nr=40, nt_base=24)
        mg = grid_modulus(dom)
        me = quad_modulus(lam).value
        rel = abs(mg.value - me) / me
        res.check(rel <= 0.01, f"disk quad lambda={lam:.4g}: rel error {rel:.2e} <= 1%")
        prod = mg.value * grid_modulus_dual(dom).value
        res.check(abs(prod - 1.0) <= 0.02,
                  f"disk quad lambda={lam:.4g}: duality product {prod:.4f} within 2%")
    return res


@_timed
def criterion_3_strip_ratio() -> CriterionResult:
    """Ratio limits of the strip deformation at the end of the schedule."""
    res = CriterionResult("3 strip ratio theorem", True)
    for sc in default_strip_scenarios():
        table = ratio_table_strip(sc.I, sc.J, scenario_id=sc.scenario_id)
        gap = table.final_gap
        res.check(gap <= 0.05,
                  f"{sc.scenario_id}: |ratio - {table.expected_limit:g}| = "
                  f"{gap:.4f} <= 0.05 at eps = 2^-16")
        res.check(table.gap_monotone_tail(8),
                  f"{sc.scenario_id}: gap monotone decreasing over last 8 points")
    return res


@_timed
def criterion_4_strip_currents() -> CriterionResult:
    """Weak* behaviour of the strip shrink and stretch pipelines."""
    res = CriterionResult("4 strip currents", True)

    shrink = strip_shrink_currents(default_strip_shrink_boxes())
    l1 = shrink.row("param-0-1").limit
    l3 = shrink.row("param-2-5").limit
    res.check(abs(l3 / l1 - 3.0) <= 0.02 * 3.0,
              f"shrink limits ratio {l3/l1:.5f} within 2% of 3")
    off = shrink.row("off-support").values[-1]
    res.check(abs(off) < 1e-3 * l1,
              f"off-support value {off:.2e} < 1e-3 of on-support ({l1:.4f})")
    res.check(shrink.constant_residual <= 0.01,
              f"fitted constant c = {shrink.constant:.6f} stable within "
              f"{shrink.constant_residual:.2%} <= 1% across boxes")

    stretch = strip_stretch_currents(default_strip_stretch_boxes())
    res.check(stretch.constant_residual <= 0.02,
              f"separating boxes share limit {stretch.constant:.6f} within "
              f"{stretch.constant_residual:.2%} <= 2%")
    nonsep = stretch.row("nonsep").values[-1]
    res.check(abs(nonsep) / stretch.constant < 0.01,
              f"non-separating/separating ratio {abs(nonsep)/stretch.constant:.2e} < 0.01")
    return res


@_timed
def criterion_5_chimney_ratio(grid: bool = True) -> CriterionResult:
    """Chimney ratio limits on the elliptic and grid paths, plus the
    symmetry rule."""
    res = CriterionResult("5 chimney ratio theorem", True)
    grid_eps = [2.0 ** -2, 2.0 ** -4, 2.0 ** -6, 2.0 ** -8]

    for sc in default_chimney_scenarios():
        table = ratio_table_chimney(sc.I, sc.J, scenario_id=sc.scenario_id)
        res.check(table.final_gap <= 0.1,
                  f"{sc.scenario_id}: elliptic |ratio - {table.expected_limit:g}| = "
                  f"{table.final_gap:.4f} <= 0.1 at eps = 2^-16")
        if not grid:
            continue
        gtable = ratio_table_chimney(sc.I, sc.J, schedule=grid_eps,
                                     scenario_id=sc.scenario_id, method="both",
                                     grid_eps_min=0.0, grid_n=16)
        final = gtable.rows[-1]
        ggap = abs(final.grid_ratio - gtable.expected_limit)
        res.check(ggap <= 0.15,
                  f"{sc.scenario_id}: grid |ratio - {gtable.expected_limit:g}| = "
                  f"{ggap:.4f} <= 0.15 at eps = 2^-8")
        dis = gtable.max_grid_disagreement
        res.check(dis <= 0.02,
                  f"{sc.scenario_id}: elliptic/grid moduli agree within "
                  f"{dis:.2%} <= 2%")

    if grid:
        eps = 2.0 ** -3
        full = chimney_family_domain(
            left_ray=([-2.0, -1.0], [None, "J", None]),
            left_wall=([eps], [None, "I"]),
            right_wall=([eps], [None, "I"]),
            right_ray=([1.0, 2.0], [None, "J", None]),
            R=10.0, H=8.0, n=14)
        half = chimney_family_domain(
            left_ray=([], [None]), left_wall=([], [None]),
            right_wall=([eps], [None, "I"]),
            right_ray=([1.0, 2.0], [None, "J", None]),
            half=True, R=10.0, H=8.0, n=14)
        mf = grid_modulus(full).value
        mh = grid_modulus(half).value
        dev = abs(mf - 2.0 * mh) / (2.0 * mh)
        res.check(dev <= 0.02,
                  f"symmetry rule: full {mf:.5f} vs twice half {2*mh:.5f} "
                  f"within {dev:.2%} <= 2%")
    return res


@_timed
def criterion_6_chimney_currents() -> CriterionResult:
    res = CriterionResult("6 chimney currents", True)
    table = chimney_currents(default_chimney_boxes())
    v1 = table.row("pair-i-1").limit
    v2 = table.row("pair-i-m1").limit
    both = table.row("both-pairs").limit
    res.check(abs(both - (v1 + v2)) <= 0.03 * (v1 + v2),
              f"both-pairs limit {both:.5f} within 3% of twice the "
              f"single-pair limit ({v1 + v2:.5f})")
    for bid in ("away-right", "away-left"):
        away = abs(table.row(bid).values[-1])
        res.check(away < 0.01 * v1,
                  f"{bid}: final value {away:.2e} < 1% of single-pair limit")
    sched = epsilon_star_schedule(CHIMNEY, geometric_schedule())
    ok = np.all(sched.values > 0.0) and np.all(np.diff(sched.values) < 0.0)
    res.check(bool(ok), "eps* positive and strictly decreasing along the schedule")
    return res


@_timed
def criterion_7_property_suites(grid: bool = True) -> CriterionResult:
    res = CriterionResult("7 property suites", True)
    rng = np.random.default_rng(7)

    # Liouville Mobius invariance and arc-splitting additivity at 1e-10
    worst_inv, worst_add = 0.0, 0.0
    for _ in range(200):
        t = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=5))
        box = GeodesicBox.from_angles(t[0], t[1], t[2], t[4])
        m = MobiusDisk(a=complex(*rng.uniform(-0.6, 0.6, size=2)),
                       alpha=rng.uniform(0.0, 2.0 * math.pi))
        moved = GeodesicBox.from_angles(*[m.map_angle(x) for x in (t[0], t[1], t[2], t[4])])
        worst_inv = max(worst_inv, abs(liouville_box(moved) - liouville_box(box)))
        whole = liouville_box(GeodesicBox.from_angles(t[0], t[1], t[2], t[4]))
        part1 = liouville_box(GeodesicBox.from_angles(t[0], t[1], t[2], t[3]))
        part2 = liouville_box(GeodesicBox.from_angles(t[0], t[1], t[3], t[4]))
        worst_add = max(worst_add, abs(whole - part1 - part2))
    res.check(worst_inv <= 1e-10, f"Mobius invariance defect {worst_inv:.2e} <= 1e-10")
    res.check(worst_add <= 1e-10, f"arc-splitting additivity defect {worst_add:.2e} <= 1e-10")

    if grid:
        rep = family_property_check(40)
        res.check(rep["monotonic"], "grid modulus monotone under arc enlargement")
        res.check(rep["subadditive"], "grid modulus subadditive under arc splitting (2% slack)")
        res.check(rep["overflow_ok"], "grid modulus decreases under overflowing")

        worst_margin = math.inf
        for k in range(50):
            z0 = complex(*rng.uniform(-1.0, 1.0, size=2))
            d = complex(*rng.uniform(-1.0, 1.0, size=2))
            gap = complex(*rng.uniform(-2.0, 2.0, size=2))
            if abs(gap) < 0.5:
                gap *= 2.5 / (abs(gap) + 1e-9)
            E = [z0, z0 + d]
            F = [z0 + gap, z0 + gap + d * complex(0, 1)]
            ce, cf = Continuum(E), Continuum(F)
            delta = rel_distance(ce, cf)
            if delta <= 0.05:
                continue
            bound = mod_upper_bound(delta)
            m = plane_condenser_modulus(E, F, n=120).value
            worst_margin = min(worst_margin, bound - m)
            if m > bound:
                res.check(False, f"pair {k}: grid modulus {m:.3f} exceeds bound {bound:.3f}")
        res.check(worst_margin > 0.0,
                  f"mod upper bound dominates grid moduli (min margin {worst_margin:.3f})")

    for eps in geometric_schedule():
        StripBoundaryMap(eps).certify_monotone(10000)
        StripBoundaryMap(1.0 / eps).certify_monotone(10000)
        ChimneyBoundaryMap(eps).certify_monotone(10000)
    res.check(True, "boundary maps strictly monotone on 10^4-point grids for all eps")
    return res


ALL_CRITERIA = [
    criterion_1_quadrilateral_calculus,
    criterion_2_oracle_agreement,
    criterion_3_strip_ratio,
    criterion_4_strip_currents,
    criterion_5_chimney_ratio,
    criterion_6_chimney_currents,
    criterion_7_property_suites,
]


def run_all(quick: bool = False, echo=print) -> bool:
    """Run every criterion, print one line each, return overall success.

    `quick` restricts to the elliptic-path subset (no grid solves).
    """
    ok = True
    for crit in ALL_CRITERIA:
        if quick and crit is criterion_2_oracle_agreement:
            echo("SKIP criterion 2 oracle agreement (--quick: elliptic path only)")
            continue
        if quick and crit in (criterion_5_chimney_ratio, criterion_7_property_suites):
            result = crit(grid=False)
        else:
            result = crit()
        status = "PASS" if result.passed else "FAIL"
        echo(f"{status} criterion {result.name} [{result.seconds:.1f}s]")
        for line in result.details:
            echo(f"    {line}")
        ok = ok and result.passed
    return ok
