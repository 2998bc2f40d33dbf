"""Passage-time functionals.

The passage time of a path is the number of yellow sites on it, endpoints
included; T(A, B) minimizes over paths from A to B, optionally restricted
to a region.  Two interchangeable engines compute the distance field:

* ``deque`` -- textbook 0/1-weight shortest path with double-ended queue
  relaxation, used for small windows;
* ``layered`` -- blue clusters are contracted via connected-component
  labeling, and the field is grown one unit of cost per round, which makes
  near-critical windows with millions of sites cheap (cost is proportional
  to window size plus rounds, and rounds equal the passage time).

Both produce the identical integer field; geodesic extraction is shared and
prefers the lexicographically smaller predecessor, so reported geodesics
are deterministic.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from . import _exact
from .config import Configuration
from .lattice import (
    NEIGHBOR_OFFSETS, Region, Site, SiteWindow, Strip, Sector,
    closest_site, embed, lex_key, neighbors,
)

# hexagonal adjacency on the axial grid: rows are y, columns are x
HEX_STRUCTURE = np.array([[0, 1, 1],
                          [1, 1, 1],
                          [1, 1, 0]], dtype=bool)

UNREACHED = -1


class WindowError(ValueError):
    """The configuration window is too small for the requested functional."""


@dataclass(frozen=True)
class PassageResult:
    time: int | None
    reached: bool
    geodesic: tuple[Site, ...] | None = None


def _constraint_mask(c: Configuration, constraint) -> np.ndarray | None:
    """Accepts a Region, a boolean window mask, or an explicit site set."""
    if constraint is None:
        return None
    if isinstance(constraint, np.ndarray):
        if constraint.shape != (c.window.ny, c.window.nx):
            raise ValueError("constraint mask shape does not match the window")
        return constraint
    if isinstance(constraint, (set, frozenset, list, tuple)):
        mask = np.zeros((c.window.ny, c.window.nx), dtype=bool)
        for v in constraint:
            if c.window.contains(v):
                mask[c.window.index(v)] = True
        return mask
    return constraint.site_mask(c.window)


def distance_field(c: Configuration, sources: Sequence[Site],
                   constraint: Region | None = None,
                   engine: str = "auto",
                   stop_sites: Sequence[Site] | None = None) -> np.ndarray:
    """Distance field d(v) = T(sources, v) over the window; UNREACHED where
    no admissible path exists (or the site is outside the constraint)."""
    mask = _constraint_mask(c, constraint)
    srcs = [v for v in sources if c.window.contains(v)]
    if mask is not None:
        srcs = [v for v in srcs if mask[c.window.index(v)]]
    if not srcs:
        raise ValueError("no source site inside the window/constraint")
    if engine == "auto":
        engine = "layered" if c.window.size > 20000 else "deque"
    if engine == "deque":
        return _field_deque(c, srcs, mask, stop_sites)
    if engine == "layered":
        return _field_layered(c, srcs, mask, stop_sites)
    raise ValueError(f"unknown engine {engine!r}")


def _field_deque(c: Configuration, sources: list[Site],
                 mask: np.ndarray | None,
                 stop_sites: Sequence[Site] | None) -> np.ndarray:
    w = c.window
    blue = c.colors
    dist = np.full((w.ny, w.nx), UNREACHED, dtype=np.int32)
    allowed = mask if mask is not None else np.ones_like(blue, dtype=bool)
    stops = None
    if stop_sites is not None:
        stops = {w.index(v) for v in stop_sites if w.contains(v)}
    dq: deque = deque()
    for v in sorted(sources, key=lex_key):
        iy, ix = w.index(v)
        d0 = 0 if blue[iy, ix] else 1
        if dist[iy, ix] == UNREACHED or d0 < dist[iy, ix]:
            dist[iy, ix] = d0
            if d0 == 0:
                dq.appendleft((d0, iy, ix))
            else:
                dq.append((d0, iy, ix))
    ny, nx = w.ny, w.nx
    while dq:
        d, iy, ix = dq.popleft()
        if dist[iy, ix] != d:
            continue
        if stops and (iy, ix) in stops:
            # all entries in the deque are >= d, so d is final for the stop
            continue
        for dx, dy in NEIGHBOR_OFFSETS:
            jy, jx = iy + dy, ix + dx
            if 0 <= jy < ny and 0 <= jx < nx and allowed[jy, jx]:
                nd = d + (0 if blue[jy, jx] else 1)
                if dist[jy, jx] == UNREACHED or nd < dist[jy, jx]:
                    dist[jy, jx] = nd
                    if nd == d:
                        dq.appendleft((nd, jy, jx))
                    else:
                        dq.append((nd, jy, jx))
    return dist


def _neighbor_shifts(nx: int):
    """Flat-index shifts and edge masks for the six axial offsets."""
    shifts = []
    for dx, dy in NEIGHBOR_OFFSETS:
        shifts.append((dy * nx + dx, dx))
    return shifts


def _field_layered(c: Configuration, sources: list[Site],
                   mask: np.ndarray | None,
                   stop_sites: Sequence[Site] | None) -> np.ndarray:
    w = c.window
    ny, nx = w.ny, w.nx
    blue = c.colors
    allowed = mask if mask is not None else np.ones_like(blue, dtype=bool)
    blue_ok = blue & allowed
    labels, nlab = ndimage.label(blue_ok, structure=HEX_STRUCTURE)
    lab_flat = labels.ravel()
    # per-label site index lists
    order = np.argsort(lab_flat, kind="stable")
    sorted_labs = lab_flat[order]
    starts = np.searchsorted(sorted_labs, np.arange(1, nlab + 2))
    dist = np.full(ny * nx, UNREACHED, dtype=np.int32)
    allowed_flat = allowed.ravel()
    blue_flat = blue_ok.ravel()
    yellow_flat = (~blue & allowed).ravel()
    absorbed = np.zeros(nlab + 1, dtype=bool)
    stops_flat = None
    if stop_sites is not None:
        si = [w.index(v) for v in stop_sites if w.contains(v)]
        stops_flat = np.array([iy * nx + ix for iy, ix in si], dtype=np.int64)

    def absorb(lab_ids: np.ndarray) -> np.ndarray:
        lab_ids = lab_ids[(lab_ids > 0) & ~absorbed[lab_ids]]
        if lab_ids.size == 0:
            return np.empty(0, dtype=np.int64)
        absorbed[lab_ids] = True
        chunks = [order[starts[L - 1]:starts[L]] for L in np.unique(lab_ids)]
        return np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)

    src_idx = np.array([w.index(v)[0] * nx + w.index(v)[1] for v in sources], dtype=np.int64)
    src_blue = src_idx[blue_flat[src_idx]]
    src_yellow = src_idx[yellow_flat[src_idx]]
    current = absorb(np.unique(lab_flat[src_blue]))
    dist[current] = 0
    pending_yellow = np.unique(src_yellow)
    shifts = _neighbor_shifts(nx)

    def neighbors_of(idx: np.ndarray) -> np.ndarray:
        if idx.size == 0:
            return np.empty(0, dtype=np.int64)
        cols = idx % nx
        outs = []
        for shift, dx in shifts:
            if dx == 1:
                sel = cols < nx - 1
            elif dx == -1:
                sel = cols > 0
            else:
                sel = slice(None)
            cand = idx[sel] + shift
            cand = cand[(cand >= 0) & (cand < ny * nx)]
            outs.append(cand)
        return np.unique(np.concatenate(outs)) if outs else np.empty(0, dtype=np.int64)

    d = 0
    while True:
        if stops_flat is not None and np.any(dist[stops_flat] != UNREACHED):
            break
        nbrs = neighbors_of(current)
        ny_front = nbrs[yellow_flat[nbrs] & (dist[nbrs] == UNREACHED)]
        if pending_yellow.size:
            pend = pending_yellow[dist[pending_yellow] == UNREACHED]
            ny_front = np.unique(np.concatenate([ny_front, pend]))
            pending_yellow = np.empty(0, dtype=np.int64)
        if ny_front.size == 0 and current.size == 0:
            break
        d += 1
        dist[ny_front] = d
        bn = neighbors_of(ny_front)
        bn = bn[blue_flat[bn] & (dist[bn] == UNREACHED)]
        entered = absorb(np.unique(lab_flat[bn]))
        dist[entered] = d
        current = np.concatenate([ny_front, entered])
        if current.size == 0:
            break
    return dist.reshape(ny, nx)


def _extract_geodesic(c: Configuration, dist: np.ndarray, sources: set[Site],
                      target: Site, mask: np.ndarray | None) -> tuple[Site, ...]:
    """Backtrack a deterministic geodesic from target to a source using the
    distance field.  Inside blue clusters the walk follows an intra-cluster
    shortest path (lexicographic tie-breaks) to the entry point."""
    w = c.window
    allowed = mask if mask is not None else np.ones((w.ny, w.nx), dtype=bool)

    def dval(v: Site) -> int:
        if not w.contains(v):
            return UNREACHED
        iy, ix = w.index(v)
        if not allowed[iy, ix]:
            return UNREACHED
        return int(dist[iy, ix])

    def wval(v: Site) -> int:
        return 0 if c.is_blue(v) else 1

    path: list[Site] = []
    cur = target
    guard = 0
    while True:
        path.append(cur)
        d = dval(cur)
        if cur in sources and d == wval(cur):
            break
        guard += 1
        if guard > 4 * w.size:
            raise RuntimeError("geodesic backtrack failed")
        if wval(cur) == 1:
            cands = [u for u in neighbors(cur) if dval(u) == d - 1]
            if not cands:
                raise RuntimeError("broken distance field during backtrack")
            cur = min(cands, key=lex_key)
        else:
            # walk inside the blue cluster at level d to the nearest exit
            seen = {cur}
            parent: dict[Site, Site | None] = {cur: None}
            frontier = [cur]
            exit_site: Site | None = None
            exit_next: Site | None = None
            while frontier and exit_site is None:
                frontier.sort(key=lex_key)
                nxt_frontier = []
                for v in frontier:
                    if d == 0 and v in sources:
                        exit_site, exit_next = v, None
                        break
                    ycands = [u for u in neighbors(v)
                              if dval(u) == d and not _is_blue_safe(c, u, allowed)]
                    if ycands:
                        exit_site, exit_next = v, min(ycands, key=lex_key)
                        break
                    for u in neighbors(v):
                        if u not in seen and dval(u) == d and _is_blue_safe(c, u, allowed):
                            seen.add(u)
                            parent[u] = v
                            nxt_frontier.append(u)
                frontier = nxt_frontier
            if exit_site is None:
                raise RuntimeError("no exit found inside blue cluster")
            # splice the intra-cluster walk (exclude cur itself, already added)
            chain: list[Site] = []
            v: Site | None = exit_site
            while v is not None and v != cur:
                chain.append(v)
                v = parent[v]
            path.extend(reversed(chain))
            if exit_next is None:
                break
            cur = exit_next

    path.reverse()
    return tuple(path)


def _is_blue_safe(c: Configuration, v: Site, allowed: np.ndarray) -> bool:
    if not c.window.contains(v):
        return False
    iy, ix = c.window.index(v)
    return bool(allowed[iy, ix]) and bool(c.colors[iy, ix])


def passage_time(c: Configuration, A: Iterable[Site], B: Iterable[Site],
                 constraint: Region | None = None,
                 geodesic: bool = False,
                 engine: str = "auto") -> PassageResult:
    """First-passage time T(A, B), all path sites inside the constraint when
    one is given.  Endpoint weights are included: at p=0 the time equals the
    number of sites on the geodesic."""
    A = list(A)
    B = list(B)
    if not A or not B:
        raise ValueError("A and B must be nonempty site sets")
    for v in A + B:
        if not c.window.contains(v):
            raise ValueError(f"site {v} outside the window")
    mask = _constraint_mask(c, constraint)
    if mask is not None:
        if not any(mask[c.window.index(v)] for v in A):
            raise ValueError("constraint excludes every site of A")
        if not any(mask[c.window.index(v)] for v in B):
            raise ValueError("constraint excludes every site of B")
        B_in = [v for v in B if mask[c.window.index(v)]]
    else:
        B_in = B
    dist = distance_field(c, A, constraint, engine=engine, stop_sites=B_in)
    best: Site | None = None
    best_d = None
    for v in B_in:
        dv = dist[c.window.index(v)]
        if dv != UNREACHED and (best_d is None or dv < best_d or
                                (dv == best_d and lex_key(v) < lex_key(best))):
            best, best_d = v, int(dv)
    if best is None:
        return PassageResult(None, False, None)
    geo = None
    if geodesic:
        src_set = set(A) if mask is None else {v for v in A if mask[c.window.index(v)]}
        geo = _extract_geodesic(c, dist, src_set, best, mask)
    return PassageResult(best_d, True, geo)


def require_window_covers(c: Configuration, xmin: float, xmax: float,
                          ymin: float, ymax: float, what: str) -> None:
    need = SiteWindow.covering_box(xmin, xmax, ymin, ymax)
    w = c.window
    if not (w.x0 <= need.x0 and w.x1 >= need.x1 and w.y0 <= need.y0 and w.y1 >= need.y1):
        raise WindowError(
            f"{what}: window {w} does not cover required site range {need}"
        )


def a0n(c: Configuration, n: int, margin: float | None = None,
        geodesic: bool = False) -> PassageResult:
    """Point-to-point time a_{0,n} = T(0, n) along the axis.  The window must
    cover [-margin, n+margin] x [-margin, margin] (default margin n/2): a
    too-small window is an error, never a silent truncation."""
    if n < 1:
        raise ValueError("a0n requires n >= 1")
    if margin is None:
        margin = n / 2
    require_window_covers(c, -margin, n + margin, -margin, margin, "a0n")
    return passage_time(c, [closest_site((0.0, 0.0))], [closest_site((float(n), 0.0))],
                        geodesic=geodesic)


def point_passage(c: Configuration, z0: complex, z1: complex,
                  constraint: Region | None = None,
                  geodesic: bool = False) -> PassageResult:
    """T(z0, z1) between the closest sites to two plane points."""
    return passage_time(c, [closest_site(z0)], [closest_site(z1)],
                        constraint=constraint, geodesic=geodesic)


def point_to_line(c: Configuration, n: int, margin: float | None = None) -> int:
    """b_{0,n}: minimal time from the origin site to the half-plane of sites
    with first embedded coordinate >= n."""
    if n < 1:
        raise ValueError("point_to_line requires n >= 1")
    if margin is None:
        margin = n / 2
    require_window_covers(c, -margin, n + margin, -margin, margin, "point_to_line")
    dist = distance_field(c, [closest_site((0.0, 0.0))])
    px, py = c.window.embed_grids()
    sel = (px >= n) & (dist != UNREACHED)
    if not sel.any():
        raise WindowError("point_to_line: no reachable site beyond the line")
    return int(dist[sel].min())


# ---------------------------------------------------------------------------
# crossing times


def _frame_membership(pts_u, pts_t, w: float, h: float):
    return (pts_u >= 0) & (pts_u <= w) & (pts_t >= 0) & (pts_t <= h)


def line_to_line(c: Configuration, w: float, h: float, theta: float = 0.0,
                 z: complex = 0j) -> int:
    """Left-right crossing time l^{p,theta}_{w,h}(z) of z + e^{i theta}
    ([0,w] x [0,h]).  Interior path sites lie in the closed box; the first
    and last sites lie outside it, with their incident segments meeting the
    two short sides (exact intersection tests)."""
    if w < 1 or h < 1:
        raise ValueError("line_to_line requires w, h >= 1 (degenerate box)")
    cos_t, sin_t = _exact.rotation_q3(theta)
    org = _exact.origin_q3(z)
    wq = _exact.q3_from_float(w)
    hq = _exact.q3_from_float(h)
    zero = _exact.q3(0)
    left = (_exact.PointQ3(zero, zero), _exact.PointQ3(zero, hq))
    right = (_exact.PointQ3(wq, zero), _exact.PointQ3(wq, hq))

    from .lattice import RotatedBox
    box = RotatedBox(z, theta, w, h)
    bb = box.bounding_box()
    require_window_covers(c, bb.xmin - 1.0, bb.xmax + 1.0, bb.ymin - 1.0, bb.ymax + 1.0,
                          "line_to_line")
    win = SiteWindow.covering_box(bb.xmin - 1.2, bb.xmax + 1.2, bb.ymin - 1.2, bb.ymax + 1.2)

    frames: dict[Site, _exact.PointQ3] = {}

    def frame(vsite: Site) -> _exact.PointQ3:
        if vsite not in frames:
            frames[vsite] = _exact.to_frame(_exact.embed_q3(vsite), org, cos_t, sin_t)
        return frames[vsite]

    # float frame coordinates for the whole candidate grid; the exact
    # predicates are consulted only within a narrow band of the boundary
    gx, gy = win.embed_grids()
    cf, sf = math.cos(theta), math.sin(theta)
    fu = cf * (gx - z.real) + sf * (gy - z.imag)
    ft = -sf * (gx - z.real) + cf * (gy - z.imag)
    EPSB = 1e-6
    clearly_in = (fu > EPSB) & (fu < w - EPSB) & (ft > EPSB) & (ft < h - EPSB)
    clearly_out = (fu < -EPSB) | (fu > w + EPSB) | (ft < -EPSB) | (ft > h + EPSB)

    def inside(vsite: Site) -> bool:
        iy, ix = win.index(vsite)
        if clearly_in[iy, ix]:
            return True
        if clearly_out[iy, ix]:
            return False
        f = frame(vsite)
        return (f.x.sign() >= 0 and (wq - f.x).sign() >= 0 and
                f.y.sign() >= 0 and (hq - f.y).sign() >= 0)

    inside_cache: dict[Site, bool] = {}

    def is_interior(vsite: Site) -> bool:
        if vsite not in inside_cache:
            inside_cache[vsite] = win.contains(vsite) and c.window.contains(vsite) and inside(vsite)
        return inside_cache[vsite]

    interior = [v for v in win.sites() if is_interior(v)]
    dist: dict[Site, int] = {}
    dq: deque = deque()
    best = None

    def weight(vsite: Site) -> int:
        return 0 if c.is_blue(vsite) else 1

    def near_side(vsite: Site, side_u: float) -> bool:
        iy, ix = win.index(vsite)
        return abs(fu[iy, ix] - side_u) <= 1.2

    for v in interior:
        if not near_side(v, 0.0):
            continue
        fv = frame(v)
        entry = None
        for u in neighbors(v):
            if not c.window.contains(u):
                continue
            if _exact.segments_intersect(frame(u), fv, *left):
                cost = weight(u) + weight(v)
                if entry is None or cost < entry:
                    entry = cost
        if entry is not None:
            dist[v] = entry
            dq.append((entry, v))
    if w <= 1.0 + 1e-9:
        # a single unit segment can cross both sides only for w <= 1
        for v in win.sites():
            if not c.window.contains(v):
                continue
            for u in neighbors(v):
                if not win.contains(u) or not c.window.contains(u):
                    continue
                if lex_key(u) < lex_key(v):
                    continue
                if (_exact.segments_intersect(frame(v), frame(u), *left) and
                        _exact.segments_intersect(frame(v), frame(u), *right)):
                    cand = weight(v) + weight(u)
                    if best is None or cand < best:
                        best = cand

    interior_set = set(interior)
    dq = deque(sorted(dq, key=lambda t: (t[0], lex_key(t[1]))))
    while dq:
        d, v = dq.popleft()
        if dist.get(v) != d:
            continue
        for u in neighbors(v):
            if u in interior_set:
                nd = d + weight(u)
                if u not in dist or nd < dist[u]:
                    dist[u] = nd
                    if nd == d:
                        dq.appendleft((nd, u))
                    else:
                        dq.append((nd, u))
    for v, d in dist.items():
        if not near_side(v, w):
            continue
        fv = frame(v)
        for u in neighbors(v):
            if not c.window.contains(u):
                continue
            if _exact.segments_intersect(fv, frame(u), *right):
                cand = d + weight(u)
                if best is None or cand < best:
                    best = cand
    if best is None:
        raise WindowError("line_to_line: no crossing found inside the window")
    return best


def sector_crossing(c: Configuration, z: complex, theta: float,
                    r1: float, r2: float) -> PassageResult:
    """Crossing time X^{p,theta}(z; r1, r2) of the annulus sector
    z + e^{i theta} {|arg| <= pi/4, r1 <= |.| <= r2}; the end segments must
    meet the inner and outer curved sides."""
    if not (0 < r1 < r2):
        raise ValueError("sector_crossing requires 0 < r1 < r2")
    sec = Sector(z, theta, r1, r2)
    bb = sec.bounding_box()
    win = SiteWindow.covering_box(bb.xmin - 1.2, bb.xmax + 1.2, bb.ymin - 1.2, bb.ymax + 1.2)
    cos_t, sin_t = math.cos(theta), math.sin(theta)

    def in_frame(vsite: Site) -> tuple[float, float]:
        ex, ey = embed(vsite)
        dx, dy = ex - z.real, ey - z.imag
        return (cos_t * dx + sin_t * dy, -sin_t * dx + cos_t * dy)

    def inside(vsite: Site) -> bool:
        u, t = in_frame(vsite)
        if u < abs(t):
            return False
        r = math.hypot(u, t)
        return r1 <= r <= r2

    def seg_hits_arc(a: Site, b: Site, radius: float) -> bool:
        au, at = in_frame(a)
        bu, bt = in_frame(b)
        du, dt = bu - au, bt - at
        qa = du * du + dt * dt
        qb = 2 * (au * du + at * dt)
        qc = au * au + at * at - radius * radius
        disc = qb * qb - 4 * qa * qc
        if disc < 0 or qa == 0:
            return False
        sq = math.sqrt(disc)
        for t_par in ((-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)):
            if -1e-12 <= t_par <= 1 + 1e-12:
                pu = au + t_par * du
                pt = at + t_par * dt
                if pu >= abs(pt) - 1e-12:
                    return True
        return False

    interior = [v for v in win.sites() if c.window.contains(v) and inside(v)]
    interior_set = set(interior)
    dist: dict[Site, int] = {}
    dq: deque = deque()

    def weight(vsite: Site) -> int:
        return 0 if c.is_blue(vsite) else 1

    for v in sorted(interior, key=lex_key):
        entry = None
        for u in neighbors(v):
            if not c.window.contains(u):
                continue
            if seg_hits_arc(u, v, r1):
                cost = weight(u) + weight(v)
                if entry is None or cost < entry:
                    entry = cost
        if entry is not None:
            dist[v] = entry
            dq.append((entry, v))
    dq = deque(sorted(dq))
    while dq:
        d, v = dq.popleft()
        if dist.get(v) != d:
            continue
        for u in neighbors(v):
            if u in interior_set:
                nd = d + weight(u)
                if u not in dist or nd < dist[u]:
                    dist[u] = nd
                    if nd == d:
                        dq.appendleft((nd, u))
                    else:
                        dq.append((nd, u))
    best = None
    for v, d in dist.items():
        for u in neighbors(v):
            if not c.window.contains(u):
                continue
            if seg_hits_arc(v, u, r2):
                cand = d + weight(u)
                if best is None or cand < best:
                    best = cand
    if best is None:
        return PassageResult(None, False, None)
    return PassageResult(best, True, None)


def strip_passage(c: Configuration, m: float, n: float, theta: float, h: float | None,
                  cluster_radius: float | None = None,
                  endpoints: tuple[Iterable[Site], Iterable[Site]] | None = None,
                  engine: str = "auto") -> PassageResult:
    """T^{p,theta}_{m,n}(h): time between the surrounding clusters of
    m e^{i theta} and n e^{i theta}, all path sites in the discrete strip of
    half-height h (h=None removes the constraint).  Endpoints may be supplied
    explicitly; otherwise the outermost surrounding clusters (hexagon
    fallback allowed) are used with disk radius (n-m)/2 by default."""
    if m >= n:
        raise ValueError("strip_passage requires m < n")
    if h is not None and h < 1:
        raise ValueError("strip_passage requires h >= 1")
    if endpoints is None:
        from .clusters import outermost_surrounding_cluster
        if cluster_radius is None:
            cluster_radius = (n - m) / 2
        za = complex(math.cos(theta) * m, math.sin(theta) * m)
        zb = complex(math.cos(theta) * n, math.sin(theta) * n)
        A = outermost_surrounding_cluster(c, za, cluster_radius).sites
        B = outermost_surrounding_cluster(c, zb, cluster_radius).sites
    else:
        A, B = (list(endpoints[0]), list(endpoints[1]))
    constraint = Strip(theta, h) if h is not None else None
    if constraint is not None:
        mask = constraint.site_mask(c.window)
        A = [v for v in A if c.window.contains(v) and mask[c.window.index(v)]]
        B = [v for v in B if c.window.contains(v) and mask[c.window.index(v)]]
        if not A or not B:
            return PassageResult(None, False, None)
    return passage_time(c, A, B, constraint=constraint, engine=engine)
