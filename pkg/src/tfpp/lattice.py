"""Triangular-lattice geometry.

Sites are indexed by axial integer coordinates (x, y) and embedded in the
plane at (x + y/2, y*sqrt(3)/2), so every pair of neighbors is at Euclidean
distance 1.  Each site owns the regular hexagon of the dual tiling centered
at its embedding (circumradius 1/sqrt(3), inradius 1/2, vertices pointing
at 30, 90, ... degrees).

All tie-breaking between sites uses the lexicographic order on (y, x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Site = tuple[int, int]

SQRT3 = math.sqrt(3.0)
HALF_SQRT3 = SQRT3 / 2.0
HEX_CIRCUMRADIUS = 1.0 / SQRT3
HEX_INRADIUS = 0.5

# Axial offsets of the six neighbors, and the matching embedded angles
# (0, 60, 120, 180, 240, 300 degrees) in counterclockwise order.
NEIGHBOR_OFFSETS: tuple[Site, ...] = (
    (1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1),
)


class LatticeError(ValueError):
    pass


def embed(v: Site) -> tuple[float, float]:
    """Plane coordinates of a site."""
    x, y = v
    return (x + 0.5 * y, HALF_SQRT3 * y)


def embed_arrays(xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return xs + 0.5 * ys, HALF_SQRT3 * ys


def neighbors(v: Site) -> list[Site]:
    """The six lattice neighbors of v."""
    x, y = v
    return [(x + dx, y + dy) for dx, dy in NEIGHBOR_OFFSETS]


def lex_key(v: Site) -> tuple[int, int]:
    """Global tie-breaking order: lexicographic by (y, x)."""
    return (v[1], v[0])


def site_distance2(v: Site, z: tuple[float, float]) -> float:
    ex, ey = embed(v)
    return (ex - z[0]) ** 2 + (ey - z[1]) ** 2


def closest_site(z: complex | tuple[float, float]) -> Site:
    """Site minimizing the Euclidean distance to z; ties go to the
    lexicographically smaller site (order on (y, x))."""
    if isinstance(z, complex):
        zx, zy = z.real, z.imag
    else:
        zx, zy = float(z[0]), float(z[1])
    if not (math.isfinite(zx) and math.isfinite(zy)):
        raise LatticeError("closest_site requires a finite point")
    yf = zy / HALF_SQRT3
    xf = zx - 0.5 * yf
    best: Site | None = None
    best_d = math.inf
    for y in range(math.floor(yf) - 1, math.floor(yf) + 3):
        for x in range(math.floor(xf) - 1, math.floor(xf) + 3):
            d = site_distance2((x, y), (zx, zy))
            if d < best_d or (d == best_d and best is not None and lex_key((x, y)) < lex_key(best)):
                best = (x, y)
                best_d = d
    assert best is not None
    return best


def hexagon_vertices(v: Site) -> list[tuple[float, float]]:
    """The six corners of the hexagonal cell of v (vertices at 30 + k*60 deg)."""
    cx, cy = embed(v)
    out = []
    for k in range(6):
        a = math.pi / 6 + k * math.pi / 3
        out.append((cx + HEX_CIRCUMRADIUS * math.cos(a), cy + HEX_CIRCUMRADIUS * math.sin(a)))
    return out


def hexagon_contains(v: Site, z: tuple[float, float]) -> bool:
    """Tie-resolved closed-cell membership: z belongs to the cell of v iff v
    is the closest site to z under the lexicographic tie rule.  Implemented
    by comparing squared distances against the six neighbors only (the cell
    is the Voronoi cell, so neighbors suffice)."""
    dv = site_distance2(v, z)
    for u in neighbors(v):
        du = site_distance2(u, z)
        if du < dv:
            return False
        if du == dv and lex_key(u) < lex_key(v):
            return False
    return True


def rotate60(v: Site) -> Site:
    """Rotate a site by +60 degrees about the origin (lattice symmetry)."""
    x, y = v
    return (-y, x + y)


# hexagon support radii and edge normals for separating-axis tests
HEX_SUPPORT_X = 0.5
HEX_SUPPORT_Y = HEX_CIRCUMRADIUS
HEX_EDGE_NORMALS = tuple(
    (math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(3)
)


def hex_box_overlap(px, py, bx: float, by: float, r1: float, r2: float):
    """Closed intersection test between hexagonal cells centered at (px, py)
    and the box [bx +- r1] x [by +- r2], via separating axes (vectorized)."""
    dx = np.asarray(px) - bx
    dy = np.asarray(py) - by
    ok = (np.abs(dx) <= r1 + HEX_SUPPORT_X) & (np.abs(dy) <= r2 + HEX_SUPPORT_Y)
    for ux, uy in HEX_EDGE_NORMALS:
        ok &= np.abs(dx * ux + dy * uy) <= 0.5 + r1 * abs(ux) + r2 * abs(uy)
    return ok


def hex_inside_open_box(px, py, bx: float, by: float, r: float):
    """True where the whole hexagonal cell lies strictly inside the box
    [bx +- r] x [by +- r]."""
    dx = np.asarray(px) - bx
    dy = np.asarray(py) - by
    return (np.abs(dx) + HEX_SUPPORT_X < r) & (np.abs(dy) + HEX_SUPPORT_Y < r)


@dataclass(frozen=True)
class SiteWindow:
    """Inclusive bounds on axial site indices.  Arrays over a window are laid
    out as [y - y0, x - x0] (row-major in y)."""

    x0: int
    x1: int
    y0: int
    y1: int

    def __post_init__(self):
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise LatticeError("empty site window")

    @property
    def nx(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def ny(self) -> int:
        return self.y1 - self.y0 + 1

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def contains(self, v: Site) -> bool:
        return self.x0 <= v[0] <= self.x1 and self.y0 <= v[1] <= self.y1

    def index(self, v: Site) -> tuple[int, int]:
        if not self.contains(v):
            raise LatticeError(f"site {v} outside window {self}")
        return (v[1] - self.y0, v[0] - self.x0)

    def site(self, iy: int, ix: int) -> Site:
        return (self.x0 + ix, self.y0 + iy)

    def axial_grids(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.arange(self.x0, self.x1 + 1)
        ys = np.arange(self.y0, self.y1 + 1)
        gx, gy = np.meshgrid(xs, ys)
        return gx, gy

    def embed_grids(self) -> tuple[np.ndarray, np.ndarray]:
        gx, gy = self.axial_grids()
        return embed_arrays(gx, gy)

    def sites(self) -> Iterable[Site]:
        for y in range(self.y0, self.y1 + 1):
            for x in range(self.x0, self.x1 + 1):
                yield (x, y)

    def pad(self, m: int) -> "SiteWindow":
        return SiteWindow(self.x0 - m, self.x1 + m, self.y0 - m, self.y1 + m)

    @staticmethod
    def covering_box(xmin: float, xmax: float, ymin: float, ymax: float, pad: int = 0) -> "SiteWindow":
        """Smallest index window containing every site whose embedding lies in
        the closed plane box [xmin,xmax] x [ymin,ymax], then padded by `pad`
        index units on each side."""
        if xmax < xmin or ymax < ymin:
            raise LatticeError("empty plane box")
        y0 = math.ceil(ymin / HALF_SQRT3 - 1e-12)
        y1 = math.floor(ymax / HALF_SQRT3 + 1e-12)
        if y1 < y0:
            y0 = y1 = round((ymin + ymax) / 2 / HALF_SQRT3)
        x0 = math.ceil(xmin - max(y0, y1) * 0.5 - 1e-12)
        x1 = math.floor(xmax - min(y0, y1) * 0.5 + 1e-12)
        if x1 < x0:
            x0 = x1 = round((xmin + xmax) / 2 - 0.25 * (y0 + y1))
        return SiteWindow(x0 - pad, x1 + pad, y0 - pad, y1 + pad)


# ---------------------------------------------------------------------------
# Regions


@dataclass(frozen=True)
class AxisBox:
    """Closed box [cx-r1, cx+r1] x [cy-r2, cy+r2] in plane units."""

    cx: float
    cy: float
    r1: float
    r2: float

    @staticmethod
    def corners(xmin: float, ymin: float, xmax: float, ymax: float) -> "AxisBox":
        return AxisBox((xmin + xmax) / 2, (ymin + ymax) / 2, (xmax - xmin) / 2, (ymax - ymin) / 2)

    @property
    def xmin(self):
        return self.cx - self.r1

    @property
    def xmax(self):
        return self.cx + self.r1

    @property
    def ymin(self):
        return self.cy - self.r2

    @property
    def ymax(self):
        return self.cy + self.r2

    def point_mask(self, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        return (
            (px >= self.xmin) & (px <= self.xmax) & (py >= self.ymin) & (py <= self.ymax)
        )

    def site_mask(self, window: SiteWindow) -> np.ndarray:
        px, py = window.embed_grids()
        return self.point_mask(px, py)

    def bounding_box(self) -> "AxisBox":
        return self


@dataclass(frozen=True)
class RotatedBox:
    """z + e^{i theta} ([0, w] x [0, h]), closed; membership tested in the
    rotated frame."""

    z: complex
    theta: float
    w: float
    h: float

    def point_mask(self, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        dx = px - self.z.real
        dy = py - self.z.imag
        u = c * dx + s * dy
        t = -s * dx + c * dy
        return (u >= 0.0) & (u <= self.w) & (t >= 0.0) & (t <= self.h)

    def site_mask(self, window: SiteWindow) -> np.ndarray:
        px, py = window.embed_grids()
        return self.point_mask(px, py)

    def bounding_box(self) -> AxisBox:
        c, s = math.cos(self.theta), math.sin(self.theta)
        xs = [0.0, c * self.w, -s * self.h, c * self.w - s * self.h]
        ys = [0.0, s * self.w, c * self.h, s * self.w + c * self.h]
        return AxisBox.corners(
            self.z.real + min(xs), self.z.imag + min(ys),
            self.z.real + max(xs), self.z.imag + max(ys),
        )


@dataclass(frozen=True)
class Annulus:
    """Closed annulus r <= ||p - z|| <= R in the chosen norm."""

    z: complex
    r: float
    R: float
    norm: str = "linf"  # "linf" or "euclidean"

    def __post_init__(self):
        if not (0 <= self.r <= self.R):
            raise LatticeError("annulus requires 0 <= r <= R")
        if self.norm not in ("linf", "euclidean"):
            raise LatticeError("annulus norm must be 'linf' or 'euclidean'")

    def point_mask(self, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        dx = px - self.z.real
        dy = py - self.z.imag
        if self.norm == "linf":
            d = np.maximum(np.abs(dx), np.abs(dy))
        else:
            d = np.hypot(dx, dy)
        return (d >= self.r) & (d <= self.R)

    def site_mask(self, window: SiteWindow) -> np.ndarray:
        px, py = window.embed_grids()
        return self.point_mask(px, py)

    def bounding_box(self) -> AxisBox:
        return AxisBox(self.z.real, self.z.imag, self.R, self.R)


@dataclass(frozen=True)
class Disk:
    z: complex
    radius: float

    def point_mask(self, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        return np.hypot(px - self.z.real, py - self.z.imag) <= self.radius

    def site_mask(self, window: SiteWindow) -> np.ndarray:
        px, py = window.embed_grids()
        return self.point_mask(px, py)

    def bounding_box(self) -> AxisBox:
        return AxisBox(self.z.real, self.z.imag, self.radius, self.radius)


@dataclass(frozen=True)
class Strip:
    """Infinite strip of half-height h along direction theta through the
    origin.  Point membership is the closed band |Im(e^{-i theta} p)| <= h.
    Site membership follows the discrete-strip rule: a site belongs iff the
    open hexagonal cell of the site intersects the band, i.e.
    |Im(e^{-i theta} embed(v))| < h + rho(theta) where rho is the hexagon's
    support radius in the band-normal direction."""

    theta: float
    h: float

    def support_radius(self) -> float:
        # support of the hexagon in the direction normal to the strip
        phi = self.theta + math.pi / 2
        return HEX_CIRCUMRADIUS * max(
            abs(math.cos(phi - (math.pi / 6 + k * math.pi / 3))) for k in range(6)
        )

    def point_mask(self, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        t = -s * px + c * py
        return np.abs(t) <= self.h

    def site_mask(self, window: SiteWindow) -> np.ndarray:
        px, py = window.embed_grids()
        c, s = math.cos(self.theta), math.sin(self.theta)
        t = -s * px + c * py
        return np.abs(t) < self.h + self.support_radius()

    def bounding_box(self) -> AxisBox:
        raise LatticeError("a strip is unbounded; supply an explicit bound")


@dataclass(frozen=True)
class Sector:
    """z + e^{i theta} {w : |arg w| <= pi/4, r1 <= |w|_2 <= r2} (closed)."""

    z: complex
    theta: float
    r1: float
    r2: float

    def __post_init__(self):
        if not (0 < self.r1 < self.r2):
            raise LatticeError("sector requires 0 < r1 < r2")

    def point_mask(self, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        dx = px - self.z.real
        dy = py - self.z.imag
        u = c * dx + s * dy
        t = -s * dx + c * dy
        rr = np.hypot(u, t)
        with np.errstate(invalid="ignore"):
            ang_ok = np.abs(t) <= u  # |arg| <= pi/4  <=>  u >= |t| (u >= 0)
        return ang_ok & (u >= 0) & (rr >= self.r1) & (rr <= self.r2)

    def site_mask(self, window: SiteWindow) -> np.ndarray:
        px, py = window.embed_grids()
        return self.point_mask(px, py)

    def bounding_box(self) -> AxisBox:
        return AxisBox(self.z.real, self.z.imag, self.r2, self.r2)


Region = AxisBox | RotatedBox | Annulus | Disk | Strip | Sector


def region_contains_site(region: Region, v: Site) -> bool:
    px, py = embed(v)
    ax = np.asarray([px])
    ay = np.asarray([py])
    if isinstance(region, Strip):
        c, s = math.cos(region.theta), math.sin(region.theta)
        t = -s * px + c * py
        return bool(abs(t) < region.h + region.support_radius())
    return bool(region.point_mask(ax, ay)[0])


def sites_in_region(region: Region, bound: AxisBox) -> list[Site]:
    """All sites belonging to region (site-membership rules) whose embedding
    also lies in `bound`, in lexicographic (y, x) order."""
    window = SiteWindow.covering_box(bound.xmin, bound.xmax, bound.ymin, bound.ymax)
    mask = region.site_mask(window) & bound.site_mask(window)
    out: list[Site] = []
    iy, ix = np.nonzero(mask)
    order = np.lexsort((ix, iy))
    for k in order:
        out.append(window.site(int(iy[k]), int(ix[k])))
    return out


# ---------------------------------------------------------------------------
# Discrete quads


def _flood(seed_sites: Iterable[Site], member, limit: int | None = None) -> set[Site]:
    seen = set(seed_sites)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for u in neighbors(v):
            if u not in seen and member(u):
                seen.add(u)
                stack.append(u)
                if limit is not None and len(seen) > limit:
                    raise LatticeError("flood fill exceeded limit")
    return seen


def is_simply_connected(D: set[Site]) -> bool:
    """True iff D is connected and the union of its hexagons has no holes.
    Checked by flooding the complement of D inside a 1-padded frame."""
    if not D:
        return False
    start = next(iter(D))
    comp = _flood([start], lambda u: u in D)
    if len(comp) != len(D):
        return False
    xs = [v[0] for v in D]
    ys = [v[1] for v in D]
    frame = SiteWindow(min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1)
    corner = (frame.x0, frame.y0)
    outside = _flood([corner], lambda u: frame.contains(u) and u not in D)
    total = frame.size - len(D)
    return len(outside) == total


def boundary_sites(D: set[Site]) -> set[Site]:
    """Inner site boundary: sites of D adjacent to the complement."""
    return {v for v in D if any(u not in D for u in neighbors(v))}


def _polygon_signed_area(sites: Sequence[Site]) -> float:
    area = 0.0
    pts = [embed(v) for v in sites]
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        area += x1 * y2 - x2 * y1
    return 0.5 * area


def boundary_circuit(D: set[Site]) -> list[Site]:
    """The inner boundary of a discrete Jordan set, as a counterclockwise
    circuit.  Raises LatticeError when D is not simply connected or its inner
    boundary is not a single circuit (each site visited exactly once)."""
    if not is_simply_connected(D):
        raise LatticeError("site set is not simply connected")
    bnd = boundary_sites(D)
    if len(bnd) < 3:
        raise LatticeError("inner boundary has fewer than 3 sites")
    start = min(D, key=lex_key)  # minimal (y, x): lies on the boundary
    # Moore-style tracing: scan counterclockwise from the backtrack direction.
    # At the start we pretend to have arrived from direction 4 ((0,-1)): the
    # three downward neighbors of the (y, x)-minimal site are outside D.
    def step(v: Site, back: int) -> tuple[Site, int]:
        x, y = v
        for i in range(1, 7):
            d = (back + i) % 6
            dx, dy = NEIGHBOR_OFFSETS[d]
            u = (x + dx, y + dy)
            if u in D:
                return u, (d + 3) % 6
        raise LatticeError("isolated site during boundary trace")

    # The walk stops when the first directed boundary edge repeats.  Starting
    # from the (y, x)-minimal site with a pretended arrival from below keeps
    # the first scanned cell outside D, which makes every later step sweep at
    # least one exterior cell before landing on the next boundary site.
    start_back = 4
    walk: list[Site] = []
    v, back = start, start_back
    first_edge: tuple[Site, Site] | None = None
    guard = 0
    while True:
        walk.append(v)
        nxt, nback = step(v, back)
        if first_edge is None:
            first_edge = (v, nxt)
        elif (v, nxt) == first_edge:
            walk.pop()
            break
        v, back = nxt, nback
        guard += 1
        if guard > 6 * len(D) + 12:
            raise LatticeError("boundary trace failed to close")
    seq = walk
    if len(set(seq)) != len(seq) or set(seq) != bnd:
        raise LatticeError("inner boundary is not a single circuit")
    for a, b in zip(seq, seq[1:] + seq[:1]):
        if b not in neighbors(a):
            raise LatticeError("boundary circuit has non-adjacent consecutive sites")
    if _polygon_signed_area(seq) < 0:
        seq = [seq[0]] + seq[1:][::-1]
    return seq


@dataclass(frozen=True)
class DiscreteQuad:
    """A discrete Jordan set D with four marked boundary sites v1..v4 in
    counterclockwise order.  Arc k runs from mark k to mark k+1 (cyclic)
    along the counterclockwise inner-boundary circuit, endpoints included."""

    sites: frozenset[Site]
    marks: tuple[Site, Site, Site, Site]
    circuit: tuple[Site, ...] = field(compare=False, default=())

    def __post_init__(self):
        D = set(self.sites)
        circuit = boundary_circuit(D)
        if len(set(self.marks)) != 4:
            raise LatticeError("quad marks must be four distinct sites")
        pos = {}
        for m in self.marks:
            if m not in circuit:
                raise LatticeError(f"mark {m} not on the inner boundary circuit")
            pos[m] = circuit.index(m)
        i1 = pos[self.marks[0]]
        rel = [(pos[m] - i1) % len(circuit) for m in self.marks]
        if not (rel[0] == 0 and rel[1] < rel[2] < rel[3] and rel[1] > 0):
            raise LatticeError("marks are not in counterclockwise order")
        object.__setattr__(self, "circuit", tuple(circuit[i1:] + circuit[:i1]))

    def arc(self, k: int) -> list[Site]:
        """Arc from mark k to mark k+1 (1-based k in 1..4), inclusive."""
        circ = self.circuit
        n = len(circ)
        idx = {m: circ.index(m) for m in self.marks}
        a = idx[self.marks[k - 1]]
        b = idx[self.marks[k % 4]]
        if a <= b:
            return list(circ[a:b + 1])
        return list(circ[a:]) + list(circ[:b + 1])


def quad_from_index_box(x0: int, x1: int, y0: int, y1: int,
                        marks: tuple[Site, Site, Site, Site] | None = None) -> DiscreteQuad:
    """Quad on the full index rectangle [x0..x1] x [y0..y1] (a parallelogram
    in the plane).  Default marks are the four corner sites."""
    D = frozenset((x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1))
    if marks is None:
        marks = ((x0, y0), (x1, y0), (x1, y1), (x0, y1))
    return DiscreteQuad(D, marks)
