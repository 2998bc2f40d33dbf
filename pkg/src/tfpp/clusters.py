"""Monochromatic clusters and their combinatorial geometry.

Provides union-find labeling with per-cluster geometry, the surround test
(flood fill over the hexagon complement), the outermost surrounding cluster
of a point inside a disk, innermost-yellow-circuit extraction by boundary
walking, and the cluster graph with its chain distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import Configuration
from .lattice import (
    HEX_CIRCUMRADIUS, NEIGHBOR_OFFSETS, Site, SiteWindow,
    embed, hexagon_vertices, lex_key, neighbors,
)


@dataclass(frozen=True)
class ClusterInfo:
    cid: int
    count: int
    bbox: tuple[int, int, int, int]  # axial x0, x1, y0, y1
    diameter: float                  # L-infinity diameter of embedded sites
    rep: Site                        # lexicographically smallest site


@dataclass(frozen=True)
class ClusterLabeling:
    window: SiteWindow
    color: str
    labels: np.ndarray = field(repr=False)  # -1 where the site has the other color
    clusters: tuple[ClusterInfo, ...] = ()

    def label_of(self, v: Site) -> int:
        iy, ix = self.window.index(v)
        return int(self.labels[iy, ix])

    def sites_of(self, cid: int) -> list[Site]:
        iy, ix = np.nonzero(self.labels == cid)
        return [self.window.site(int(a), int(b)) for a, b in zip(iy, ix)]


def label_clusters(c: Configuration, color: str = "blue") -> ClusterLabeling:
    """Union-find labeling of the monochromatic components of one color.
    Cluster ids are assigned in lexicographic order of the representative
    site, so labelings are deterministic."""
    if color not in ("blue", "yellow"):
        raise ValueError("color must be 'blue' or 'yellow'")
    w = c.window
    member = c.colors if color == "blue" else ~c.colors
    ny, nx = member.shape
    size = ny * nx
    parent = np.arange(size, dtype=np.int64)

    def find(a: int) -> int:
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    flat = member.ravel()
    # forward offsets cover each adjacency once in scan order
    forward = [(1, 0), (0, 1), (-1, 1)]
    for iy in range(ny):
        base = iy * nx
        for ix in range(nx):
            idx = base + ix
            if not flat[idx]:
                continue
            for dx, dy in forward:
                jx, jy = ix + dx, iy + dy
                if 0 <= jx < nx and 0 <= jy < ny and flat[jy * nx + jx]:
                    ra, rb = find(idx), find(jy * nx + jx)
                    if ra != rb:
                        if ra < rb:
                            parent[rb] = ra
                        else:
                            parent[ra] = rb
    labels = np.full(size, -1, dtype=np.int64)
    roots: dict[int, int] = {}
    infos: list[list] = []
    for iy in range(ny):
        base = iy * nx
        for ix in range(nx):
            idx = base + ix
            if not flat[idx]:
                continue
            r = find(idx)
            cid = roots.get(r)
            if cid is None:
                cid = len(infos)
                roots[r] = cid
                infos.append([0, ix, ix, iy, iy])
            labels[idx] = cid
            info = infos[cid]
            info[0] += 1
            info[1] = min(info[1], ix)
            info[2] = max(info[2], ix)
            info[3] = min(info[3], iy)
            info[4] = max(info[4], iy)
    labels = labels.reshape(ny, nx)
    # embedded extents for the L-infinity diameter
    px, py = w.embed_grids()
    cluster_list = []
    for cid, info in enumerate(infos):
        sel = labels == cid
        exs = px[sel]
        eys = py[sel]
        diam = max(float(exs.max() - exs.min()), float(eys.max() - eys.min()))
        iy, ix = np.nonzero(sel)
        k = np.lexsort((ix, iy))[0]
        rep = w.site(int(iy[k]), int(ix[k]))
        cluster_list.append(ClusterInfo(
            cid, info[0],
            (w.x0 + info[1], w.x0 + info[2], w.y0 + info[3], w.y0 + info[4]),
            diam, rep))
    # ids already follow first-encounter scan order == lex order of rep
    return ClusterLabeling(w, color, labels, tuple(cluster_list))


# ---------------------------------------------------------------------------
# surroundedness


def surrounds(S: Iterable[Site], z: complex | tuple[float, float]) -> bool:
    """True iff z lies in a bounded component of the hexagon complement of S:
    the flood fill from z's hexagon over sites not in S cannot leave a frame
    enclosing S."""
    from .lattice import closest_site
    Sset = set(S)
    if not Sset:
        return False
    start = closest_site(z)
    if start in Sset:
        return False
    xs = [v[0] for v in Sset]
    ys = [v[1] for v in Sset]
    x0, x1, y0, y1 = min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1
    if not (x0 < start[0] < x1 and y0 < start[1] < y1):
        return False
    stack = [start]
    seen = {start}
    while stack:
        v = stack.pop()
        for u in neighbors(v):
            if u in seen or u in Sset:
                continue
            if not (x0 <= u[0] <= x1 and y0 <= u[1] <= y1):
                return False  # escaped the frame
            if u[0] in (x0, x1) or u[1] in (y0, y1):
                return False
            seen.add(u)
            stack.append(u)
    return True


def winding_number(circuit: Sequence[Site], z: tuple[float, float]) -> int:
    """Winding of the embedded closed polyline around z (test oracle)."""
    total = 0.0
    pts = [embed(v) for v in circuit]
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i][0] - z[0], pts[i][1] - z[1]
        x2, y2 = pts[(i + 1) % n][0] - z[0], pts[(i + 1) % n][1] - z[1]
        total += math.atan2(x1 * y2 - y1 * x2, x1 * x2 + y1 * y2)
    return round(total / (2 * math.pi))


# ---------------------------------------------------------------------------
# region growth primitives (used by circuit peeling)


def bluegrow(c: Configuration, S: Iterable[Site]) -> set[Site]:
    """S plus every blue site reachable from S through blue sites."""
    w = c.window
    region = set(S)
    stack = [v for v in region]
    while stack:
        v = stack.pop()
        for u in neighbors(v):
            if u not in region and w.contains(u) and c.is_blue(u):
                region.add(u)
                stack.append(u)
    return region


def touches_window_edge(w: SiteWindow, region: Iterable[Site]) -> bool:
    return any(v[0] in (w.x0, w.x1) or v[1] in (w.y0, w.y1) for v in region)


def fill_holes(w: SiteWindow, region: set[Site]) -> set[Site]:
    """Region plus every bounded component of its complement (holes), where
    boundedness is judged inside a 1-padded frame around the region."""
    if not region:
        return set()
    xs = [v[0] for v in region]
    ys = [v[1] for v in region]
    frame = SiteWindow(min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1)
    outside: set[Site] = set()
    corner = (frame.x0, frame.y0)
    stack = [corner]
    outside.add(corner)
    while stack:
        v = stack.pop()
        for u in neighbors(v):
            if u in outside or u in region or not frame.contains(u):
                continue
            outside.add(u)
            stack.append(u)
    filled = set(region)
    for y in range(frame.y0, frame.y1 + 1):
        for x in range(frame.x0, frame.x1 + 1):
            v = (x, y)
            if v not in filled and v not in outside:
                filled.add(v)
    return filled


def external_boundary_walk(K: set[Site]) -> list[Site]:
    """Cyclic walk over the complement sites adjacent to K, going around the
    unbounded side of K; pinch sites may repeat.  K must be nonempty."""
    if not K:
        raise ValueError("empty region")
    m = min(K, key=lex_key)
    start = (m[0], m[1] - 1)  # below the (y, x)-minimal site: unbounded side
    b0 = 1                    # offset index of (0,1): points from start to m
    walk: list[Site] = []
    u, b = start, b0
    guard = 0
    while True:
        walk.append(u)
        # scan counterclockwise from the wall direction
        d = None
        for i in range(1, 7):
            cand = (b + i) % 6
            dx, dy = NEIGHBOR_OFFSETS[cand]
            if (u[0] + dx, u[1] + dy) not in K:
                d = cand
                break
        if d is None:
            raise RuntimeError("walk start enclosed by region")
        dx, dy = NEIGHBOR_OFFSETS[d]
        u = (u[0] + dx, u[1] + dy)
        b = (d - 2) % 6
        if (u, b) == (start, b0):
            break
        guard += 1
        if guard > 12 * (len(K) + 6) + 64:
            raise RuntimeError("external boundary walk failed to close")
    return walk


def splice_walk_to_circuit(walk: list[Site], z_ref: tuple[float, float]) -> list[Site]:
    """Remove pinch excursions from a cyclic boundary walk, keeping the loop
    that winds around z_ref."""
    seq = list(walk)
    while True:
        index: dict[Site, int] = {}
        rep = None
        for i, v in enumerate(seq):
            if v in index:
                rep = (index[v], i)
                break
            index[v] = i
        if rep is None:
            return seq
        i, j = rep
        excursion = seq[i:j]
        if abs(winding_number(excursion, z_ref)) == 0:
            seq = seq[:i] + seq[j:]
        else:
            seq = excursion


@dataclass(frozen=True)
class Circuit:
    """A cyclic self-avoiding path of length >= 3."""

    sites: tuple[Site, ...]

    def __post_init__(self):
        n = len(self.sites)
        if n < 3:
            raise ValueError("circuit needs at least 3 sites")
        if len(set(self.sites)) != n:
            raise ValueError("circuit sites must be distinct")
        for a, b in zip(self.sites, self.sites[1:] + self.sites[:1]):
            if b not in neighbors(a):
                raise ValueError("circuit sites must be consecutive neighbors")


def innermost_yellow_circuit(c: Configuration, S: Iterable[Site]) -> Circuit | None:
    """The innermost yellow circuit surrounding S: grow S through blue, fill
    holes, and walk the external site boundary (always yellow).  Returns None
    when the growth or its boundary reaches the window edge."""
    Sset = set(S)
    if not Sset:
        raise ValueError("empty seed set")
    w = c.window
    for v in Sset:
        if not w.contains(v):
            raise ValueError(f"seed site {v} outside window")
    grown = bluegrow(c, Sset)
    if touches_window_edge(w, grown):
        return None
    K = fill_holes(w, grown)
    walk = external_boundary_walk(K)
    if any(not w.contains(v) or v[0] in (w.x0, w.x1) or v[1] in (w.y0, w.y1)
           for v in walk):
        return None
    if any(c.is_blue(v) for v in walk):
        raise RuntimeError("external boundary of a blue-grown region must be yellow")
    z_ref = embed(min(Sset, key=lex_key))
    seq = splice_walk_to_circuit(walk, z_ref)
    circ = Circuit(tuple(seq))
    if not surrounds(circ.sites, z_ref):
        raise RuntimeError("spliced boundary does not surround the seed")
    return circ


# ---------------------------------------------------------------------------
# outermost surrounding cluster


@dataclass(frozen=True)
class SurroundingCluster:
    kind: str                      # "cluster" or "hexagon"
    sites: tuple[Site, ...]        # the cluster proper (no augmentation site)
    augmented: tuple[Site, ...]    # cluster plus the single-site plugs
    rep: Site
    outer_radius: float


def _outer_radius(sites: Iterable[Site], z: tuple[float, float]) -> float:
    best = 0.0
    for v in sites:
        for px, py in hexagon_vertices(v):
            best = max(best, math.hypot(px - z[0], py - z[1]))
    return best


def outermost_surrounding_cluster(c: Configuration, z: complex | tuple[float, float],
                                  radius: float) -> SurroundingCluster:
    """Among the blue clusters contained in the open disk of the given radius
    around z whose augmentation by at most one extra hexagon surrounds z,
    pick the one with maximal outer radius viewed from z (lexicographic
    representative on ties).  Falls back to the single hexagon containing z
    when no such cluster exists."""
    from .fpp import require_window_covers
    from .lattice import closest_site
    zx, zy = (z.real, z.imag) if isinstance(z, complex) else (float(z[0]), float(z[1]))
    require_window_covers(c, zx - radius - 1, zx + radius + 1,
                          zy - radius - 1, zy + radius + 1,
                          "outermost_surrounding_cluster")
    sub = SiteWindow.covering_box(zx - radius - 2.0, zx + radius + 2.0,
                                  zy - radius - 2.0, zy + radius + 2.0)
    sub = SiteWindow(max(sub.x0, c.window.x0), min(sub.x1, c.window.x1),
                     max(sub.y0, c.window.y0), min(sub.y1, c.window.y1))
    # cluster labeling restricted to the subwindow; clusters inside the open
    # disk cannot reach its edge, so the clipping is harmless for candidates
    sub_colors = c.colors[sub.y0 - c.window.y0: sub.y1 - c.window.y0 + 1,
                          sub.x0 - c.window.x0: sub.x1 - c.window.x0 + 1]
    from scipy import ndimage
    from .fpp import HEX_STRUCTURE
    labels, nlab = ndimage.label(sub_colors, structure=HEX_STRUCTURE)
    candidates: list[tuple[float, list[Site]]] = []
    px, py = sub.embed_grids()
    dist_c = np.hypot(px - zx, py - zy)
    zsite = closest_site((zx, zy))
    for cid in range(1, nlab + 1):
        sel = labels == cid
        iy, ix = np.nonzero(sel)
        sites = [sub.site(int(a), int(b)) for a, b in zip(iy, ix)]
        # hexagon union inside the open disk: every cell vertex strictly in;
        # cheap center-distance bound first, exact per-vertex check after
        if float(dist_c[sel].max()) + HEX_CIRCUMRADIUS >= radius:
            if _outer_radius(sites, (zx, zy)) >= radius:
                continue
        # a surround (even augmented by one site) needs z inside the bbox + 1
        xs = [v[0] for v in sites]
        ys = [v[1] for v in sites]
        if not (min(xs) - 1 <= zsite[0] <= max(xs) + 1 and min(ys) - 1 <= zsite[1] <= max(ys) + 1):
            continue
        candidates.append((_outer_radius(sites, (zx, zy)), sites))

    best: tuple[float, tuple[Site, ...], tuple[Site, ...]] | None = None
    AUG_SLACK = 1.0 + 2.0 * HEX_CIRCUMRADIUS
    for rad_c, sites in sorted(candidates, key=lambda t: (-t[0], lex_key(min(t[1], key=lex_key)))):
        if best is not None and rad_c + AUG_SLACK < best[0]:
            break
        sset = set(sites)
        if surrounds(sset, (zx, zy)):
            aug_set = sset
        else:
            # a single plug site must be a cut vertex of the complement, so
            # it has at least two neighbors in the cluster
            plugs = []
            ext = {u for v in sset for u in neighbors(v) if u not in sset}
            for u in sorted(ext, key=lex_key):
                if sum(1 for t in neighbors(u) if t in sset) >= 2:
                    if surrounds(sset | {u}, (zx, zy)):
                        plugs.append(u)
            if not plugs:
                continue
            aug_set = sset | set(plugs)
        aug = tuple(sorted(aug_set, key=lex_key))
        rad = _outer_radius(aug_set, (zx, zy))
        rep = min(sset, key=lex_key)
        if best is None or rad > best[0] or (rad == best[0] and lex_key(rep) < lex_key(min(best[1], key=lex_key))):
            best = (rad, tuple(sorted(sset, key=lex_key)), aug)
    if best is None:
        hexa = closest_site((zx, zy))
        return SurroundingCluster("hexagon", (hexa,), (hexa,), hexa, 0.0)
    rad, sites_t, aug = best
    return SurroundingCluster("cluster", sites_t, aug, min(sites_t, key=lex_key), rad)


# ---------------------------------------------------------------------------
# cluster graph


@dataclass(frozen=True)
class ClusterGraph:
    labeling: ClusterLabeling
    edges: frozenset[tuple[int, int]]
    adjacency: dict[int, tuple[int, ...]] = field(repr=False, default_factory=dict)

    @property
    def node_count(self) -> int:
        return len(self.labeling.clusters)


def build_cluster_graph(c: Configuration, region=None) -> ClusterGraph:
    """Nodes are blue clusters; an edge joins two clusters when some yellow
    site (inside the region, when given) is adjacent to both."""
    lab = label_clusters(c, "blue")
    w = c.window
    if region is not None:
        region_mask = region.site_mask(w)
    else:
        region_mask = None
    edges: set[tuple[int, int]] = set()
    ny, nx = w.ny, w.nx
    labels = lab.labels
    for iy in range(ny):
        for ix in range(nx):
            if c.colors[iy, ix]:
                continue
            if region_mask is not None and not region_mask[iy, ix]:
                continue
            touching = set()
            for dx, dy in NEIGHBOR_OFFSETS:
                jy, jx = iy + dy, ix + dx
                if 0 <= jy < ny and 0 <= jx < nx and labels[jy, jx] >= 0:
                    touching.add(int(labels[jy, jx]))
            touching = sorted(touching)
            for i in range(len(touching)):
                for j in range(i + 1, len(touching)):
                    edges.add((touching[i], touching[j]))
    adjacency: dict[int, list[int]] = {info.cid: [] for info in lab.clusters}
    for a, b in sorted(edges):
        adjacency[a].append(b)
        adjacency[b].append(a)
    adj = {k: tuple(sorted(vs)) for k, vs in adjacency.items()}
    return ClusterGraph(lab, frozenset(edges), adj)


def chain_distance(g: ClusterGraph, a: int, b: int) -> int | None:
    """Shortest chain length |Gamma| - 1 between two cluster nodes; None when
    they are not connected in the cluster graph."""
    if a not in g.adjacency or b not in g.adjacency:
        raise ValueError("unknown cluster id")
    if a == b:
        return 0
    from collections import deque as _dq
    dist = {a: 0}
    q = _dq([a])
    while q:
        v = q.popleft()
        for u in g.adjacency[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                if u == b:
                    return dist[u]
                q.append(u)
    return None
