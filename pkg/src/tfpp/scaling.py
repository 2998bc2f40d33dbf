"""Correlation-length estimators and the box-graph cluster approximation.

L_eps(p) is the smallest box side whose blue left-right crossing probability
drops to eps, found on a geometric grid with bisection refinement.  L(p) is
read off a persisted table of critical 4-arm probabilities (built once at
p = 1/2 and reused across a whole p sweep).  The box graph covers a square
ambient region with boxes of side eps = 3^{-n} joined by adjacency or blue
connectivity, and good subgraphs (complete, maximal, boundary-touching,
diameter >= delta) approximate boundary-touching cluster pieces.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .config import Configuration, MCEstimate, derive_seed, sample
from .lattice import (
    AxisBox, Site, SiteWindow, embed, hex_box_overlap,
)

P_C = 0.5


class BudgetError(RuntimeError):
    """Probe budget exhausted before the quantity could be bracketed."""


class RangeError(ValueError):
    """The requested p needs 4-arm data beyond the table's largest radius."""


# ---------------------------------------------------------------------------
# crossing probability


def has_blue_lr_crossing(c: Configuration, R: float, z0: complex = 0j) -> bool:
    """Blue left-right crossing of z0 + [0,R]^2: a blue path (v0, ..., vk)
    with v1..v_{k-1} in the closed box and the segments v0v1, v_{k-1}vk
    meeting the left and right sides.  The endpoints themselves are not
    required to leave the box (a site on a side qualifies through its own
    segment)."""
    w = c.window
    px, py = w.embed_grids()
    x0, y0 = z0.real, z0.imag
    in_box = (px >= x0) & (px <= x0 + R) & (py >= y0) & (py <= y0 + R)
    blue = c.colors
    # interior path sites must stay inside the box
    labels, _ = ndimage.label(blue & in_box, structure=_HEX_STRUCTURE)

    def seg_hits_side(ax, ay, side_x):
        sa = ax - side_x
        sb = px - side_x
        straddle = (np.sign(sa) != np.sign(sb)) | (sa == 0) | (sb == 0)
        denom = sb - sa
        with np.errstate(divide="ignore", invalid="ignore"):
            tpar = np.where(denom != 0, -sa / denom, 0.0)
        ycross = ay + tpar * (py - ay)
        on_line = (sa == 0) & (sb == 0)
        seg_ok = straddle & ~on_line & (ycross >= y0) & (ycross <= y0 + R)
        col_ok = on_line & (np.minimum(ay, py) <= y0 + R) & (np.maximum(ay, py) >= y0)
        return seg_ok | col_ok

    def a_is_blue(dx, dy):
        jy = np.arange(w.ny)[:, None] + dy
        jx = np.arange(w.nx)[None, :] + dx
        inside_win = (jy >= 0) & (jy < w.ny) & (jx >= 0) & (jx < w.nx)
        return blue[np.clip(jy, 0, w.ny - 1), np.clip(jx, 0, w.nx - 1)] & inside_win

    def side_components(side_x: float) -> set[int]:
        comps: set[int] = set()
        for dx, dy in ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)):
            # b = the grid site (plays v1, must be in the box), a = v0
            ax = px + (dx + 0.5 * dy)
            ay = py + (dy * math.sqrt(3) / 2)
            valid = in_box & blue & seg_hits_side(ax, ay, side_x) & a_is_blue(dx, dy)
            comps.update(int(t) for t in np.unique(labels[valid]) if t > 0)
        return comps

    left = side_components(x0)
    if not left:
        return False
    right = side_components(x0 + R)
    if left & right:
        return True
    if R <= 1.0 + 1e-9:
        # single-segment crossings (k = 1): no interior-site requirement
        for dx, dy in ((1, 0), (0, 1), (-1, 1)):
            ax = px + (dx + 0.5 * dy)
            ay = py + (dy * math.sqrt(3) / 2)
            pair_blue = blue & a_is_blue(dx, dy)
            if np.any(pair_blue & seg_hits_side(ax, ay, x0) & seg_hits_side(ax, ay, x0 + R)):
                return True
    return False


_HEX_STRUCTURE = np.array([[0, 1, 1], [1, 1, 1], [1, 1, 0]], dtype=bool)


def crossing_window(R: float, z0: complex = 0j) -> SiteWindow:
    return SiteWindow.covering_box(z0.real - 2.0, z0.real + R + 2.0,
                                   z0.imag - 2.0, z0.imag + R + 2.0)


def crossing_probability(p: float, R: float, samples: int, seed: int) -> MCEstimate:
    """Monte Carlo probability of the blue left-right crossing of [0,R]^2."""
    if R < 1:
        raise ValueError("crossing_probability requires R >= 1")
    window = crossing_window(R)
    hits = np.empty(samples, dtype=np.float64)
    for trial in range(samples):
        c = sample(window, p, derive_seed(seed, "crossing", int(round(R * 1024)), trial))
        hits[trial] = 1.0 if has_blue_lr_crossing(c, R) else 0.0
    return MCEstimate.from_samples(hits)


# ---------------------------------------------------------------------------
# correlation lengths


def correlation_length_eps(p: float, eps: float, samples: int, seed: int,
                           r_max: float = 4096.0) -> tuple[float, dict]:
    """L_eps(p): smallest box side R with crossing probability <= eps, found
    on the geometric grid R_j = 2^{j/4} and refined by bisection to 5%
    relative precision.  Floors at 1.  Probe seeds are keyed by R only, so
    estimates at different p share configurations through the monotone
    coupling (L_eps is then nondecreasing in p sample-by-sample)."""
    if not (0 < eps < 0.5):
        raise ValueError("eps must lie in (0, 1/2)")
    if not (0 <= p < P_C):
        raise ValueError("correlation_length_eps requires p < 1/2")

    probes: dict[float, float] = {}

    def prob(R: float) -> float:
        if R not in probes:
            probes[R] = crossing_probability(p, R, samples, derive_seed(seed, "Leps")).mean
        return probes[R]

    if prob(1.0) <= eps:
        return 1.0, {"probes": probes, "bracket": (1.0, 1.0)}
    j = 0
    lo = 1.0
    hi = None
    while True:
        j += 1
        R = 2.0 ** (j / 4.0)
        if R > r_max:
            raise BudgetError(
                f"correlation_length_eps: crossing probability still above {eps} "
                f"at R={r_max} (p={p})")
        if prob(R) <= eps:
            hi = R
            lo = 2.0 ** ((j - 1) / 4.0)
            break
    while hi / lo > 1.05:
        mid = math.sqrt(lo * hi)
        if prob(mid) <= eps:
            hi = mid
        else:
            lo = mid
    return hi, {"probes": probes, "bracket": (lo, hi)}


@dataclass(frozen=True)
class Pi4Table:
    """Critical 4-arm probabilities pi4(1, R) per radius, with provenance."""

    radii: tuple[float, ...]
    estimates: tuple[MCEstimate, ...]
    seed: int

    def __post_init__(self):
        if list(self.radii) != sorted(set(self.radii)):
            raise ValueError("radii must be strictly increasing")
        for e in self.estimates:
            if not (0.0 <= e.mean <= 1.0):
                raise ValueError("arm probabilities must lie in [0, 1]")

    def scaled(self) -> list[tuple[float, float]]:
        return [(R, R * R * e.mean) for R, e in zip(self.radii, self.estimates)]

    def audit(self) -> list[int]:
        """Indices where R^2 pi4 fails to increase (flags undersampling)."""
        vals = [f for _, f in self.scaled()]
        return [i for i in range(1, len(vals)) if vals[i] <= vals[i - 1]]


def build_pi4_table(radii: Sequence[float], samples: int, seed: int) -> Pi4Table:
    """Estimate pi4(1, R) at p = p_c = 1/2 for each radius."""
    from .arms import ArmEventSpec, estimate_arm_probability
    ests = []
    for R in radii:
        spec = ArmEventSpec(0j, 1.0, float(R), "alternating", 4)
        ests.append(estimate_arm_probability(spec, P_C, samples,
                                             derive_seed(seed, "pi4", int(round(R * 1024)))))
    return Pi4Table(tuple(float(R) for R in radii), tuple(ests), seed)


def save_pi4_table(table: Pi4Table, path) -> None:
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["R", "mean", "stderr", "n", "seed"])
        for R, e in zip(table.radii, table.estimates):
            wr.writerow([repr(float(R)), repr(float(e.mean)), repr(float(e.stderr)),
                         e.n, table.seed])


def load_pi4_table(path) -> Pi4Table:
    radii, ests, seed = [], [], 0
    with open(path, newline="") as f:
        rd = csv.reader(f)
        header = next(rd)
        if header != ["R", "mean", "stderr", "n", "seed"]:
            raise ValueError(f"unexpected pi4 table header: {header}")
        for row in rd:
            radii.append(float(row[0]))
            ests.append(MCEstimate(float(row[1]), float(row[2]), int(row[3])))
            seed = int(row[4])
    return Pi4Table(tuple(radii), tuple(ests), seed)


def correlation_length_L(p: float, table: Pi4Table) -> float:
    """L(p) = inf{R >= 1 : R^2 pi4(1,R) >= 1/(p_c - p)}, interpolating the
    table log-log linearly; deterministic given the table."""
    if not (0 <= p < P_C):
        raise ValueError("correlation_length_L requires p < 1/2")
    target = 1.0 / (P_C - p)
    pts = table.scaled()
    if target > pts[-1][1]:
        raise RangeError(
            f"1/(p_c - p) = {target:.3g} exceeds the table maximum "
            f"{pts[-1][1]:.3g} at R = {pts[-1][0]:g}; extend the table")
    if pts[0][1] >= target:
        return max(1.0, pts[0][0] if len(pts) == 1 else _loglog_solve(
            (1.0, 1.0), pts[0], target))
    for i in range(1, len(pts)):
        if pts[i][1] >= target:
            return _loglog_solve(pts[i - 1], pts[i], target)
    raise AssertionError("unreachable")


def _loglog_solve(p0: tuple[float, float], p1: tuple[float, float], target: float) -> float:
    (r0, f0), (r1, f1) = p0, p1
    if f0 <= 0 or f1 <= 0 or f1 == f0:
        return r1
    t = (math.log(target) - math.log(f0)) / (math.log(f1) - math.log(f0))
    t = min(max(t, 0.0), 1.0)
    return math.exp(math.log(r0) + t * (math.log(r1) - math.log(r0)))


# ---------------------------------------------------------------------------
# box graph (cluster approximation apparatus)


@dataclass(frozen=True)
class BoxGraph:
    """Vertex set: boxes of side eps*S tiling the ambient square (indices
    (a, b) with -3^n <= a, b < 3^n); edges: L-infinity adjacency of indices
    or blue connectivity inside the ambient box."""

    n: int
    ambient: AxisBox
    nodes: tuple[tuple[int, int], ...]
    adjacency: dict = field(repr=False, default_factory=dict)

    @property
    def eps(self) -> float:
        return 3.0 ** (-self.n)

    def box_center(self, node: tuple[int, int]) -> tuple[float, float]:
        a, b = node
        s = self.ambient.r1 * self.eps
        return (self.ambient.cx + s * (a + 0.5), self.ambient.cy + s * (b + 0.5))

    def box_half_side(self) -> float:
        return self.ambient.r1 * self.eps / 2.0

    def has_edge(self, u, v) -> bool:
        return v in self.adjacency.get(u, ())


def _site_boxes(ex: float, ey: float, ambient: AxisBox, eps: float) -> list[tuple[int, int]]:
    """Box indices whose box intersects the hexagon centered at (ex, ey)."""
    s = ambient.r1 * eps
    m = 3 ** round(-math.log(eps) / math.log(3))
    out = []
    a_lo = math.floor((ex - 0.58 - ambient.cx) / s - 0.5)
    a_hi = math.ceil((ex + 0.58 - ambient.cx) / s - 0.5)
    b_lo = math.floor((ey - 0.58 - ambient.cy) / s - 0.5)
    b_hi = math.ceil((ey + 0.58 - ambient.cy) / s - 0.5)
    for a in range(max(a_lo, -m), min(a_hi, m - 1) + 1):
        for b in range(max(b_lo, -m), min(b_hi, m - 1) + 1):
            cx = ambient.cx + s * (a + 0.5)
            cy = ambient.cy + s * (b + 0.5)
            if hex_box_overlap(np.asarray([ex]), np.asarray([ey]), cx, cy, s / 2, s / 2)[0]:
                out.append((a, b))
    return out


def box_graph(c: Configuration, n: int, ambient: AxisBox) -> BoxGraph:
    """The box graph at resolution eps = 3^{-n} over a square ambient box."""
    if ambient.r1 != ambient.r2:
        raise ValueError("ambient region must be a square")
    if n < 1:
        raise ValueError("n must be >= 1 (eps = 3^{-n})")
    eps = 3.0 ** (-n)
    m = 3 ** n
    nodes = [(a, b) for b in range(-m, m) for a in range(-m, m)]
    adjacency: dict[tuple[int, int], set] = {v: set() for v in nodes}
    for a, b in nodes:
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                if da == db == 0:
                    continue
                u = (a + da, b + db)
                if -m <= u[0] < m and -m <= u[1] < m:
                    adjacency[(a, b)].add(u)
    # blue connectivity within the ambient box
    w = c.window
    px, py = w.embed_grids()
    in_amb = hex_box_overlap(px, py, ambient.cx, ambient.cy, ambient.r1, ambient.r2)
    blue_amb = c.colors & in_amb
    labels, nlab = ndimage.label(blue_amb, structure=_HEX_STRUCTURE)
    cluster_boxes: dict[int, set] = {}
    iy, ix = np.nonzero(labels > 0)
    for a, b in zip(iy, ix):
        lab = int(labels[a, b])
        ex, ey = px[a, b], py[a, b]
        for node in _site_boxes(ex, ey, ambient, eps):
            cluster_boxes.setdefault(lab, set()).add(node)
    for lab, boxes in cluster_boxes.items():
        boxes = sorted(boxes)
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                adjacency[boxes[i]].add(boxes[j])
                adjacency[boxes[j]].add(boxes[i])
    adj = {v: tuple(sorted(s)) for v, s in adjacency.items()}
    return BoxGraph(n, ambient, tuple(nodes), adj)


def _u_diameter(g: BoxGraph, nodes: Iterable[tuple[int, int]]) -> float:
    # L-infinity diameter of the union of boxes, in ambient-normalized units
    s = g.eps
    a_vals = [a for a, _ in nodes]
    b_vals = [b for _, b in nodes]
    da = (max(a_vals) - min(a_vals) + 1) * s
    db = (max(b_vals) - min(b_vals) + 1) * s
    return max(da, db)


def good_subgraphs(g: BoxGraph, delta: float) -> list[frozenset]:
    """All good subgraphs: complete, maximal, touching the ambient boundary,
    with diam(U(H)) >= delta (delta in the Lambda_1-normalized units of the
    ambient square; requires 10*eps < delta)."""
    if not (10 * g.eps < delta):
        raise ValueError("good subgraphs need 10*eps < delta")
    m = 3 ** g.n

    def boundary(v) -> bool:
        a, b = v
        return a in (-m, m - 1) or b in (-m, m - 1)

    adj = {v: frozenset(g.adjacency[v]) for v in g.nodes}
    out: list[frozenset] = []

    def bron_kerbosch(Rset: set, Pset: set, Xset: set):
        if not Pset and not Xset:
            if Rset and any(boundary(v) for v in Rset) and _u_diameter(g, Rset) >= delta:
                out.append(frozenset(Rset))
            return
        # prune: no boundary box reachable and none held
        if not any(boundary(v) for v in Rset) and not any(boundary(v) for v in Pset):
            return
        if (Rset or Pset) and _u_diameter(g, Rset | Pset) < delta:
            return
        pivot = max(Pset | Xset, key=lambda u: len(adj[u] & Pset))
        for v in sorted(Pset - adj[pivot]):
            bron_kerbosch(Rset | {v}, Pset & adj[v], Xset & adj[v])
            Pset = Pset - {v}
            Xset = Xset | {v}

    bron_kerbosch(set(), set(g.nodes), set())
    return sorted(out, key=lambda s: sorted(s))


def boundary_components(c: Configuration, ambient: AxisBox, delta: float
                        ) -> list[list[Site]]:
    """Connected pieces of blue clusters clipped to the ambient box that
    touch its boundary and have L-infinity diameter >= delta (normalized
    units)."""
    w = c.window
    px, py = w.embed_grids()
    in_amb = hex_box_overlap(px, py, ambient.cx, ambient.cy, ambient.r1, ambient.r2)
    blue_amb = c.colors & in_amb
    labels, nlab = ndimage.label(blue_amb, structure=_HEX_STRUCTURE)
    inside_open = (np.abs(px - ambient.cx) + 0.5 < ambient.r1) & \
        (np.abs(py - ambient.cy) + 0.577351 < ambient.r2)
    out = []
    for lab in range(1, nlab + 1):
        sel = labels == lab
        exs, eys = px[sel], py[sel]
        diam = max(float(exs.max() - exs.min()), float(eys.max() - eys.min()))
        if diam / ambient.r1 < delta:
            continue
        if not np.any(sel & ~inside_open):
            continue  # does not touch the ambient boundary
        iy, ix = np.nonzero(sel)
        out.append([w.site(int(a), int(b)) for a, b in zip(iy, ix)])
    return out


def box_cover(cluster_sites: Sequence[Site], n: int, ambient: AxisBox
              ) -> tuple[list[tuple[int, int]], float]:
    """Boxes meeting the cluster's hexagons, plus the Hausdorff distance
    (L-infinity, on discretized point sets: hexagon corners and centers vs
    box corners, centers and edge midpoints)."""
    eps = 3.0 ** (-n)
    boxes: set[tuple[int, int]] = set()
    for v in cluster_sites:
        ex, ey = embed(v)
        boxes.update(_site_boxes(ex, ey, ambient, eps))
    boxes_sorted = sorted(boxes)
    from .lattice import hexagon_vertices
    cl_pts = []
    for v in cluster_sites:
        ex, ey = embed(v)
        cl_pts.append((ex, ey))
        cl_pts.extend(hexagon_vertices(v))
    s = ambient.r1 * eps
    bx_pts = []
    for a, b in boxes_sorted:
        cx = ambient.cx + s * (a + 0.5)
        cy = ambient.cy + s * (b + 0.5)
        for ox in (-0.5, 0.0, 0.5):
            for oy in (-0.5, 0.0, 0.5):
                bx_pts.append((cx + ox * s, cy + oy * s))
    from scipy.spatial import cKDTree
    ta = cKDTree(np.asarray(cl_pts))
    tb = cKDTree(np.asarray(bx_pts))
    d_ab = ta.query(np.asarray(bx_pts), p=np.inf)[0].max()
    d_ba = tb.query(np.asarray(cl_pts), p=np.inf)[0].max()
    return boxes_sorted, float(max(d_ab, d_ba))


def box_cover_graph_matches(c: Configuration, n: int, ambient: AxisBox,
                            delta: float) -> tuple[int, int, int]:
    """Empirical check of the bijection between good subgraphs and
    boundary-touching components via the box cover: returns (number of
    components, number of good subgraphs, number of exact matches)."""
    g = box_graph(c, n, ambient)
    goods = {frozenset(h) for h in good_subgraphs(g, delta)}
    comps = boundary_components(c, ambient, delta)
    matches = 0
    for comp in comps:
        cover, _ = box_cover(comp, n, ambient)
        if frozenset(cover) in goods:
            matches += 1
    return len(comps), len(goods), matches
