"""Independent grid oracle for moduli of connecting families.

The modulus of the family of curves connecting boundary arcs I and J of a
domain equals the Dirichlet energy of the mixed boundary-value harmonic
potential (u = 0 on I, u = 1 on J, insulated elsewhere).  This module
discretizes that problem with vertex-centered finite volumes on tensor
grids:

* Cartesian rectilinear grids, possibly nonuniform and masked to an
  axis-aligned polygonal domain (rectangle, truncated strip, truncated
  chimney, plane condensers);
* polar grids for the disk and round annuli, with logarithmic radial
  conductances that reproduce annulus moduli exactly.

Each edge carries the conductance of its finite-volume flux window; the
discrete energy sum c (u_a - u_b)^2 converges to the Dirichlet integral and
the scheme satisfies a discrete maximum principle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve

from .conformal import Modulus

LABEL_I = "I"
LABEL_J = "J"
LABEL_GAP_A = "gapA"
LABEL_GAP_B = "gapB"

RESIDUAL_TOL = 1e-10


class MeshError(ValueError):
    """Mesh unusable: arcs missing, too coarse, or solver failure."""


# ---------------------------------------------------------------------------
# graded axes
# ---------------------------------------------------------------------------

def _geom_sizes(L: float, h0: float, h1: float):
    """Cell sizes filling a panel of length L, grading from h0 to h1."""
    if L <= 0:
        raise ValueError("panel length must be positive")
    h0 = min(h0, L)
    h1 = min(h1, L)
    if abs(math.log(h1 / h0)) < 0.05:
        n = max(1, round(L / (0.5 * (h0 + h1))))
        return np.full(n, L / n)
    # geometric cells h0 * r^k, k = 0..n-1, summing to L with last ~ h1
    n_est = max(2, round(abs(math.log(h1 / h0)) / math.log(1.3)) + 1)
    best = None
    for n in range(max(2, n_est - 6), n_est + 20):
        def total(r):
            return h0 * (r**n - 1.0) / (r - 1.0) - L
        grow = h1 > h0
        lo, hi = (1.0 + 1e-12, 8.0) if grow else (1e-3, 1.0 - 1e-12)
        try:
            if total(lo) * total(hi) > 0:
                continue
            r = brentq(total, lo, hi, xtol=1e-14)
        except ValueError:
            continue
        sizes = h0 * r ** np.arange(n)
        if best is None or abs(sizes[-1] - h1) < abs(best[-1] - h1):
            best = sizes
    if best is None:
        n = max(1, round(L / (0.5 * (h0 + h1))))
        return np.full(n, L / n)
    return best * (L / best.sum())


def axis_from_panels(panels) -> np.ndarray:
    """Node coordinates from panels (a, b, h_at_a, h_at_b); panels must abut."""
    coords = [panels[0][0]]
    for (a, b, ha, hb) in panels:
        if abs(a - coords[-1]) > 1e-12:
            raise ValueError("panels must be contiguous")
        sizes = _geom_sizes(b - a, ha, hb)
        coords.extend(list(a + np.cumsum(sizes)))
        coords[-1] = b  # exact endpoint
    return np.array(coords)


def _midpoints(v: np.ndarray, geometric: bool = False) -> np.ndarray:
    mid = np.sqrt(v[:-1] * v[1:]) if geometric else 0.5 * (v[:-1] + v[1:])
    out = np.empty(2 * len(v) - 1)
    out[0::2] = v
    out[1::2] = mid
    return out


# ---------------------------------------------------------------------------
# mesh domain and solver
# ---------------------------------------------------------------------------

@dataclass
class MeshDomain:
    """Tensor-grid discretization with labeled boundary arcs.

    kind 'xy': xs, ys are Cartesian node coordinates; kind 'polar': xs holds
    radii, ys angles (wrapping when `wrap`).  `cell_inside` masks the cells
    of the tensor grid; `label_fn(x, y)` returns one of the arc labels at
    boundary nodes and None elsewhere.  Labels I and J are the Dirichlet
    arcs of the primal problem, gapA/gapB those of the conjugate problem.
    """

    kind: str
    xs: np.ndarray
    ys: np.ndarray
    cell_inside: np.ndarray
    label_fn: object
    wrap: bool = False
    rich_p: float = 2.0
    name: str = ""
    dirichlet_labels: tuple = (LABEL_I, LABEL_J)

    def refine(self) -> "MeshDomain":
        xs = _midpoints(self.xs, geometric=(self.kind == "polar"))
        if self.wrap:
            ys_ext = np.concatenate([self.ys, [self.ys[0] + 2.0 * math.pi]])
            ys = np.empty(2 * len(self.ys))
            ys[0::2] = self.ys
            ys[1::2] = 0.5 * (ys_ext[:-1] + ys_ext[1:])
        else:
            ys = _midpoints(self.ys)
        inside = np.repeat(np.repeat(self.cell_inside, 2, axis=0), 2, axis=1)
        return replace(self, xs=xs, ys=ys, cell_inside=inside)

    def dual(self) -> "MeshDomain":
        """Conjugate quadrilateral: Dirichlet and insulated arcs swapped."""
        return replace(
            self,
            dirichlet_labels=(LABEL_GAP_A, LABEL_GAP_B),
            name=self.name + "-dual",
        )

    @property
    def h_max(self) -> float:
        return float(max(np.diff(self.xs).max(), np.diff(self.ys).max()))


@dataclass
class PotentialSolution:
    """Mixed Dirichlet/Neumann harmonic solve on a mesh."""

    u: np.ndarray           # node potentials, nan outside the domain
    energy: float           # discrete Dirichlet energy = modulus estimate
    residual: float         # relative residual of the linear system
    h: float
    xs: np.ndarray = None
    ys: np.ndarray = None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "u"])
            for i, x in enumerate(self.xs):
                for j, y in enumerate(self.ys):
                    if np.isfinite(self.u[i, j]):
                        w.writerow([f"{x:.12g}", f"{y:.12g}", f"{self.u[i, j]:.12g}"])


def _edges_and_conductances(dom: MeshDomain):
    xs, ys, inside = dom.xs, dom.ys, dom.cell_inside
    nx, ny = len(xs), len(ys)
    ncx = nx - 1
    ncy = ny if dom.wrap else ny - 1
    if inside.shape != (ncx, ncy):
        raise MeshError(f"cell mask shape {inside.shape} != {(ncx, ncy)}")

    if dom.kind == "xy":
        dx = np.diff(xs)
        dy = np.diff(ys)
        rad_res = dx            # "resistance length" across an x-edge
        ang_span = dy           # flux window width contributed by a cell row
        ang_res = dy
        rad_span = dx
    elif dom.kind == "polar":
        dlog = np.diff(np.log(xs))
        dth = (np.diff(ys) if not dom.wrap
               else np.diff(np.concatenate([ys, [ys[0] + 2 * math.pi]])))
        rad_res = dlog          # radial edge: resistance log(r2/r1) per angle
        ang_span = dth
        ang_res = dth           # angular edge: resistance dtheta per log-width
        rad_span = dlog
    else:
        raise MeshError(f"unknown mesh kind {dom.kind!r}")

    edges_a = []
    edges_b = []
    conds = []

    node_id = np.arange(nx * ny).reshape(nx, ny)

    # x-direction (radial) edges between (i, j) and (i+1, j)
    for drow in (-1, 0):
        # contribution of the adjacent cell strip j + drow
        js = np.arange(ny)
        if dom.wrap:
            jc = (js + drow) % ncy
            valid = np.ones(ny, dtype=bool)
        else:
            jc = js + drow
            valid = (jc >= 0) & (jc < ncy)
        ii, jj = np.meshgrid(np.arange(ncx), js[valid], indexing="ij")
        cellj = jc[valid]
        cj = np.broadcast_to(cellj, ii.shape)
        mask = inside[ii, cj]
        c = 0.5 * ang_span[cj] / rad_res[ii]
        edges_a.append(node_id[ii[mask], jj[mask]])
        edges_b.append(node_id[ii[mask] + 1, jj[mask]])
        conds.append(c[mask])

    # y-direction (angular) edges between (i, j) and (i, j+1 [mod])
    for dcol in (-1, 0):
        js = np.arange(ncy)
        ii = np.arange(nx)
        ic = ii + dcol
        valid_i = (ic >= 0) & (ic < ncx)
        ii, jj = np.meshgrid(ii[valid_i], js, indexing="ij")
        ci = np.broadcast_to(ic[valid_i][:, None], ii.shape)
        mask = inside[ci, jj]
        c = 0.5 * rad_span[ci] / ang_res[jj]
        j_next = (jj + 1) % ny if dom.wrap else jj + 1
        edges_a.append(node_id[ii[mask], jj[mask]])
        edges_b.append(node_id[ii[mask], j_next[mask]])
        conds.append(c[mask])

    ea = np.concatenate(edges_a)
    eb = np.concatenate(edges_b)
    cc = np.concatenate(conds)
    # merge the two half-window contributions of each edge
    key = ea.astype(np.int64) * (nx * ny) + eb
    order = np.argsort(key)
    ea, eb, cc, key = ea[order], eb[order], cc[order], key[order]
    uniq, start = np.unique(key, return_index=True)
    csum = np.add.reduceat(cc, start)
    return ea[start], eb[start], csum


def solve_potential(dom: MeshDomain) -> PotentialSolution:
    """Solve the mixed problem and return potential plus Dirichlet energy."""
    xs, ys = dom.xs, dom.ys
    nx, ny = len(xs), len(ys)
    ea, eb, cc = _edges_and_conductances(dom)

    active = np.zeros(nx * ny, dtype=bool)
    active[ea] = True
    active[eb] = True

    lbl0, lbl1 = dom.dirichlet_labels
    dval = np.full(nx * ny, np.nan)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    for flat in np.nonzero(active)[0]:
        lab = dom.label_fn(X.flat[flat], Y.flat[flat])
        if lab == lbl0:
            dval[flat] = 0.0
        elif lab == lbl1:
            dval[flat] = 1.0

    n_i = int(np.sum(dval[active] == 0.0))
    n_j = int(np.sum(dval[active] == 1.0))
    if n_i == 0 or n_j == 0:
        raise MeshError(
            f"{dom.name or 'mesh'}: a Dirichlet arc has no nodes "
            f"(|I|={n_i}, |J|={n_j}); mesh too coarse"
        )

    free = active & np.isnan(dval)
    free_idx = np.full(nx * ny, -1, dtype=np.int64)
    free_idx[free] = np.arange(int(free.sum()))
    nfree = int(free.sum())

    ia, ib = free_idx[ea], free_idx[eb]
    both_free = (ia >= 0) & (ib >= 0)
    a_free = (ia >= 0) & (ib < 0)
    b_free = (ia < 0) & (ib >= 0)

    rows = np.concatenate([ia[both_free], ib[both_free], ia, ib])
    cols = np.concatenate([ib[both_free], ia[both_free], ia, ib])
    vals = np.concatenate([-cc[both_free], -cc[both_free], cc, cc])
    keep = (rows >= 0) & (cols >= 0)
    A = coo_matrix((vals[keep], (rows[keep], cols[keep])), shape=(nfree, nfree)).tocsr()

    b = np.zeros(nfree)
    np.add.at(b, ia[a_free], cc[a_free] * np.nan_to_num(dval[eb[a_free]]))
    np.add.at(b, ib[b_free], cc[b_free] * np.nan_to_num(dval[ea[b_free]]))

    if nfree > 0:
        u_free = spsolve(A, b)
        resid = np.linalg.norm(A @ u_free - b)
        scale = np.linalg.norm(b) if np.linalg.norm(b) > 0 else 1.0
        residual = float(resid / scale)
    else:
        u_free = np.zeros(0)
        residual = 0.0
    if residual > RESIDUAL_TOL:
        raise MeshError(f"{dom.name or 'mesh'}: solver residual {residual:.2e}")

    u = np.full(nx * ny, np.nan)
    u[~np.isnan(dval)] = dval[~np.isnan(dval)]
    u[free] = u_free

    du = u[ea] - u[eb]
    energy = float(np.sum(cc * du * du))

    umin, umax = np.nanmin(u[active]), np.nanmax(u[active])
    if umin < -1e-9 or umax > 1.0 + 1e-9:
        raise MeshError(f"maximum principle violated: [{umin}, {umax}]")

    return PotentialSolution(
        u=u.reshape(nx, ny), energy=energy, residual=residual,
        h=dom.h_max, xs=xs, ys=ys,
    )


def grid_modulus(dom: MeshDomain, richardson: bool = True) -> Modulus:
    """Grid modulus of the connecting family with Richardson refinement.

    Solves at the mesh resolution and once refined; the extrapolated value
    assumes error ~ h^p with p = dom.rich_p, and the level difference is
    reported as the error estimate.
    """
    sol1 = solve_potential(dom)
    if not richardson:
        return Modulus(value=sol1.energy, method="grid", error_estimate=abs(sol1.energy) * 0.05)
    sol2 = solve_potential(dom.refine())
    m1, m2 = sol1.energy, sol2.energy
    w = 1.0 / (2.0 ** dom.rich_p - 1.0)
    value = m2 + (m2 - m1) * w
    return Modulus(value=value, method="grid", error_estimate=abs(m2 - m1))


def grid_modulus_dual(dom: MeshDomain, richardson: bool = True) -> Modulus:
    """Modulus of the conjugate quadrilateral (Dirichlet/insulated swapped)."""
    return grid_modulus(dom.dual(), richardson=richardson)


def truncation_study(domain_factory, radii) -> list:
    """Grid moduli for increasing truncation radii with successive
    differences; certifies the truncation error of unbounded domains."""
    radii = list(radii)
    if any(r2 <= r1 for r1, r2 in zip(radii[:-1], radii[1:])):
        raise ValueError("radii must be strictly increasing")
    rows = []
    prev = None
    for r in radii:
        m = grid_modulus(domain_factory(r))
        diff = abs(m.value - prev) if prev is not None else math.nan
        rows.append({"radius": r, "modulus": m.value, "difference": diff})
        prev = m.value
    return rows


# ---------------------------------------------------------------------------
# domain factories
# ---------------------------------------------------------------------------

def _tol_eq(a, b, tol=1e-9):
    return abs(a - b) <= tol


def rect_domain(W: float, H: float, n: int = 64,
                j_span=None, split=None) -> MeshDomain:
    """Rectangle [0,W] x [0,H]; I = left edge, J = right edge (or the
    sub-interval `j_span` of it).  `split` optionally restricts J to one
    of two pieces of j_span for subadditivity experiments."""
    hx = W / max(8, n)
    hy = H / max(8, round(n * H / W))
    xs = axis_from_panels([(0.0, W, hx, hx)])
    ys = axis_from_panels([(0.0, H, hy, hy)])
    must = set()
    if j_span is not None:
        must.update(j_span)
    if split is not None:
        must.update(split)
    for m in must:
        if not np.any(np.abs(ys - m) < 1e-12):
            ys = np.sort(np.append(ys, m))
    inside = np.ones((len(xs) - 1, len(ys) - 1), dtype=bool)

    jsp = j_span if j_span is not None else (0.0, H)
    spl = split

    def label(x, y):
        if _tol_eq(x, 0.0):
            return LABEL_I
        if _tol_eq(x, W):
            lo, hi = jsp
            if lo - 1e-9 <= y <= hi + 1e-9:
                if spl is None or (spl[0] - 1e-9 <= y <= spl[1] + 1e-9):
                    return LABEL_J
            return LABEL_GAP_A  # unused side piece
        if _tol_eq(y, 0.0):
            return LABEL_GAP_A
        if _tol_eq(y, H):
            return LABEL_GAP_B
        return None

    return MeshDomain("xy", xs, ys, inside, label, name=f"rect{W}x{H}", rich_p=2.0)


def annulus_domain(r: float, R: float, nr: int = 32, nt: int = 128) -> MeshDomain:
    """Round annulus r < |z| < R; I = inner circle, J = outer circle."""
    rs = np.geomspace(r, R, nr + 1)
    ts = np.linspace(0.0, 2.0 * math.pi, nt, endpoint=False)
    inside = np.ones((nr, nt), dtype=bool)

    def label(rr, tt):
        if _tol_eq(rr, r):
            return LABEL_I
        if _tol_eq(rr, R):
            return LABEL_J
        return None

    return MeshDomain("polar", rs, ts, inside, label, wrap=True,
                      name=f"annulus{r}:{R}", rich_p=2.0)


def disk_quad_domain(angles, nr: int = 48, nt_base: int = 16) -> MeshDomain:
    """Disk quadrilateral: Dirichlet arcs [a,b] (I) and [c,d] (J) on the unit
    circle, counterclockwise corner angles given.  A small insulated hole at
    the center stands in for the puncture of the polar grid."""
    ta, tb, tc, td = [float(a) for a in angles]
    corners = [ta, tb, tc, td]
    r0 = 1.0 / 80.0
    rs = np.geomspace(r0, 1.0, nr + 1)

    # theta axis: graded toward each corner, corners are nodes
    pieces = []
    spans = []
    base = corners + [ta + 2.0 * math.pi]
    for t1, t2 in zip(base[:-1], base[1:]):
        L = t2 - t1
        h_mid = L / nt_base
        h_end = min(h_mid, L / 40.0)
        half = L / 2.0
        pieces.append((t1, t1 + half, h_end, h_mid))
        pieces.append((t1 + half, t2, h_mid, h_end))
    ts_full = axis_from_panels(pieces)
    ts = np.mod(ts_full[:-1], 2.0 * math.pi)  # drop duplicated seam node
    order = np.argsort(ts)
    ts = ts[order]
    ts = np.unique(ts)
    inside = np.ones((len(rs) - 1, len(ts)), dtype=bool)

    def in_arc(t, lo, hi):
        span = (hi - lo) % (2.0 * math.pi)
        off = (t - lo) % (2.0 * math.pi)
        return off <= span + 1e-12 or off >= 2.0 * math.pi - 1e-12

    def label(rr, tt):
        if not _tol_eq(rr, 1.0):
            return None
        if in_arc(tt, ta, tb):
            return LABEL_I
        if in_arc(tt, tc, td):
            return LABEL_J
        if in_arc(tt, tb, tc):
            return LABEL_GAP_A
        return LABEL_GAP_B

    return MeshDomain("polar", rs, ts, inside, label, wrap=True,
                      name="disk-quad", rich_p=1.0)


def _axis_with_breaks(lo, hi, breaks, h_coarse, h_floor=1e-7):
    """Graded axis on [lo, hi] with nodes at every break point and spacing
    refined near breaks.  `breaks` is an iterable of points or a mapping
    {point: local spacing}, with None meaning a fraction of the local break
    separation."""
    if not isinstance(breaks, dict):
        breaks = {float(b): None for b in breaks}
    else:
        breaks = {float(k): v for k, v in breaks.items()}
    pts = np.array(sorted({float(lo), float(hi), *breaks}))
    pts = pts[(pts >= lo - 1e-12) & (pts <= hi + 1e-12)]
    fine = {}
    for k, p in enumerate(pts):
        explicit = breaks.get(p)
        if explicit is not None:
            fine[p] = max(h_floor, min(h_coarse, explicit))
            continue
        gaps = []
        if k > 0:
            gaps.append(pts[k] - pts[k - 1])
        if k + 1 < len(pts):
            gaps.append(pts[k + 1] - pts[k])
        loc = max(h_floor, min(gaps) / 6.0) if gaps else h_coarse
        fine[p] = min(h_coarse, loc)
    panels = []
    for a, b in zip(pts[:-1], pts[1:]):
        L = b - a
        if L <= 1e-14:
            continue
        ha, hb = fine[a], fine[b]
        if max(ha, hb) * 2.0 >= L:
            h = min(ha, hb, L / 2.0)
            panels.append((a, b, h, h))
        else:
            mid = 0.5 * (a + b)
            hm = min(h_coarse, L / 4.0)
            panels.append((a, mid, ha, hm))
            panels.append((mid, b, hm, hb))
    return axis_from_panels(panels)


def _interval_label(x, breaks, labels):
    """Label of the interval of the real line containing x, for intervals
    delimited by `breaks` (outermost pieces unbounded)."""
    pts = [-math.inf] + list(breaks) + [math.inf]
    for k in range(len(pts) - 1):
        if pts[k] - 1e-9 <= x <= pts[k + 1] + 1e-9:
            return labels[k] if k < len(labels) else None
    return None


def strip_family_domain(bottom, top, left_label=None, right_label=None,
                        R: float = 12.0, n: int = 12,
                        y_fine: float = None) -> MeshDomain:
    """Truncated strip [-R, R] x [0, 1] with labeled boundary intervals.

    `bottom` and `top` are (breaks, labels) pairs: sorted interval endpoints
    on that side and one label (or None) per interval, outermost intervals
    running to the truncation.  The truncation edges x = +-R take
    left_label/right_label, for arcs passing through a strip end.  `y_fine`
    grades the vertical axis toward both sides, matching the scale of
    narrow boundary gaps.
    """
    (bks_b, labs_b), (bks_t, labs_t) = bottom, top
    h_coarse = 1.0 / n
    xs = _axis_with_breaks(-R, R, set(bks_b) | set(bks_t), h_coarse * 3.0)
    hy = min(h_coarse, y_fine) if y_fine else h_coarse
    ys = axis_from_panels([(0.0, 0.5, hy, h_coarse), (0.5, 1.0, h_coarse, hy)])
    inside = np.ones((len(xs) - 1, len(ys) - 1), dtype=bool)

    def label(x, y):
        if _tol_eq(x, -R):
            return left_label
        if _tol_eq(x, R):
            return right_label
        if _tol_eq(y, 0.0):
            return _interval_label(x, bks_b, labs_b)
        if _tol_eq(y, 1.0):
            return _interval_label(x, bks_t, labs_t)
        return None

    return MeshDomain("xy", xs, ys, inside, label, name="strip-family", rich_p=1.0)


def chimney_family_domain(left_ray, left_wall, right_wall, right_ray,
                          far_label=None, top_label=None, half: bool = False,
                          R: float = 10.0, H: float = 8.0,
                          n: int = 12) -> MeshDomain:
    """Truncated chimney with labeled boundary intervals.

    Each side argument is a (breaks, labels) pair in that side's natural
    coordinate (x on the rays, y >= 0 on the walls).  `far_label` labels the
    truncation of the lower half-plane (|x| = R and y = -R), `top_label` the
    channel cross-cut at y = H.  With `half=True` only {x > 0} is meshed and
    the symmetry axis x = 0 is left insulated (the modulus symmetry rule).
    """
    (bks_lr, labs_lr), (bks_lw, labs_lw) = left_ray, left_wall
    (bks_rw, labs_rw), (bks_rr, labs_rr) = right_wall, right_ray
    h_coarse = 2.0 / n

    wall_scales = [b / 6.0 for b in list(bks_lw) + list(bks_rw) if b > 0.0]
    corner_fine = min(wall_scales) if wall_scales else h_coarse / 4.0

    x_breaks = {-1.0: corner_fine, 0.0: None, 1.0: corner_fine}
    for b in list(bks_lr) + list(bks_rr):
        x_breaks.setdefault(float(b), None)
    x_lo = 0.0 if half else -R
    xs = _axis_with_breaks(x_lo, R, {b: v for b, v in x_breaks.items()
                                     if x_lo <= b <= R}, h_coarse * 2.5)
    y_breaks = {0.0: corner_fine}
    for b in list(bks_lw) + list(bks_rw):
        y_breaks.setdefault(float(b), None)
    ys_up = _axis_with_breaks(0.0, H, {b: v for b, v in y_breaks.items()
                                       if 0.0 <= b <= H}, h_coarse * 2.5)
    ys_dn = _axis_with_breaks(-R, 0.0, {-R: None, 0.0: corner_fine},
                              h_coarse * 2.5)
    ys = np.unique(np.concatenate([ys_dn, ys_up]))

    xc = 0.5 * (xs[:-1] + xs[1:])
    yc = 0.5 * (ys[:-1] + ys[1:])
    XC, YC = np.meshgrid(xc, yc, indexing="ij")
    inside = (YC < 0.0) | (np.abs(XC) < 1.0)

    def label(x, y):
        if _tol_eq(y, H) and abs(x) <= 1.0 + 1e-9:
            return top_label
        if _tol_eq(abs(x), R) or _tol_eq(y, -R):
            return far_label
        if _tol_eq(y, 0.0) and x >= 1.0 - 1e-9:
            return _interval_label(x, bks_rr, labs_rr)
        if _tol_eq(y, 0.0) and x <= -1.0 + 1e-9:
            return _interval_label(x, bks_lr, labs_lr)
        if _tol_eq(x, 1.0) and y >= -1e-9:
            return _interval_label(y, bks_rw, labs_rw)
        if _tol_eq(x, -1.0) and y >= -1e-9:
            return _interval_label(y, bks_lw, labs_lw)
        return None

    return MeshDomain("xy", xs, ys, inside, label,
                      name="chimney-family" + ("-half" if half else ""),
                      rich_p=2.0 / 3.0)


def plane_condenser_modulus(E_points, F_points, pad: float = 4.0,
                            n: int = 180) -> Modulus:
    """Grid modulus of the family connecting two polyline continua in the
    plane: pin nodes along the polylines (u = 0 on E, u = 1 on F) inside a
    large insulated box."""
    pts = np.concatenate([np.asarray(E_points, complex).ravel(),
                          np.asarray(F_points, complex).ravel()])
    span = max(pts.real.max() - pts.real.min(), pts.imag.max() - pts.imag.min(), 1.0)
    cx, cy = pts.real.mean(), pts.imag.mean()
    Rbox = 0.5 * span + pad
    xs = np.linspace(cx - Rbox, cx + Rbox, n + 1)
    ys = np.linspace(cy - Rbox, cy + Rbox, n + 1)
    inside = np.ones((n, n), dtype=bool)
    h = xs[1] - xs[0]

    def near_polyline(x, y, poly):
        z = complex(x, y)
        arr = np.asarray(poly, complex).ravel()
        if len(arr) == 1:
            return abs(z - arr[0]) <= 0.6 * h
        for a, b in zip(arr[:-1], arr[1:]):
            ab = b - a
            t = ((z - a) * ab.conjugate()).real / (abs(ab) ** 2 + 1e-300)
            t = min(1.0, max(0.0, t))
            if abs(z - (a + t * ab)) <= 0.6 * h:
                return True
        return False

    def label(x, y):
        if near_polyline(x, y, E_points):
            return LABEL_I
        if near_polyline(x, y, F_points):
            return LABEL_J
        return None

    dom = MeshDomain("xy", xs, ys, inside, label, name="plane-condenser", rich_p=1.0)
    sol = solve_potential(dom)
    return Modulus(value=sol.energy, method="grid", error_estimate=0.1 * sol.energy)


def family_property_check(n: int = 48) -> dict:
    """Verify monotonicity, subadditivity and overflowing of the modulus on
    explicit rectangle families; returns the measured quantities."""
    W, H = 2.0, 1.0
    full = grid_modulus(rect_domain(W, H, n))
    halfJ = grid_modulus(rect_domain(W, H, n, j_span=(0.0, 0.5 * H)))
    j1 = grid_modulus(rect_domain(W, H, n, j_span=(0.0, H), split=(0.0, 0.5 * H)))
    j2 = grid_modulus(rect_domain(W, H, n, j_span=(0.0, H), split=(0.5 * H, H)))

    # overflowing: every crossing of the long rectangle contains a crossing
    # of the middle third, so the long family has the smaller modulus
    long_rect = grid_modulus(rect_domain(3.0, 1.0, n))
    middle = grid_modulus(rect_domain(1.0, 1.0, n))

    return {
        "monotonic": halfJ.value < full.value,
        "mod_full": full.value,
        "mod_halfJ": halfJ.value,
        "subadditive": full.value <= (j1.value + j2.value) * 1.02,
        "mod_split_sum": j1.value + j2.value,
        "overflow_ok": long_rect.value <= middle.value,
        "mod_long": long_rect.value,
        "mod_middle": middle.value,
    }
