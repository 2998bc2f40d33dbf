"""Independent oracles used by the test suite.

Everything here recomputes spec'd quantities by a different route than the
library (dynamic programming instead of deque relaxation, flood fill instead
of union-find, exhaustive path search instead of max flow), so agreement is
meaningful.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from tfpp.lattice import NEIGHBOR_OFFSETS, SiteWindow, embed, neighbors


def bellman_ford_field(c, sources, allowed_mask=None):
    """Iterate dist = min(dist, neighbor + w) to a fixpoint (node weights)."""
    w = c.window
    ny, nx = w.ny, w.nx
    INF = 10 ** 9
    wgt = np.where(c.colors, 0, 1).astype(np.int64)
    allowed = allowed_mask if allowed_mask is not None else np.ones((ny, nx), bool)
    dist = np.full((ny, nx), INF, np.int64)
    for v in sources:
        iy, ix = w.index(v)
        if allowed[iy, ix]:
            dist[iy, ix] = min(dist[iy, ix], wgt[iy, ix])
    for _ in range(4 * ny * nx):
        nd = dist.copy()
        for dx, dy in NEIGHBOR_OFFSETS:
            shifted = np.full_like(dist, INF)
            ys = slice(max(0, dy), ny + min(0, dy))
            xs = slice(max(0, dx), nx + min(0, dx))
            ys2 = slice(max(0, -dy), ny + min(0, -dy))
            xs2 = slice(max(0, -dx), nx + min(0, -dx))
            shifted[ys, xs] = dist[ys2, xs2]
            nd = np.minimum(nd, shifted + wgt)
        nd[~allowed] = INF
        if np.array_equal(nd, dist):
            break
        dist = nd
    return np.where(dist >= INF, -1, dist)


def bfs_flood_labels(c, color="blue"):
    """Connected-component labels by plain flood fill (oracle for the
    union-find labeling); ids ordered by first site in (y, x) scan order."""
    w = c.window
    member = c.colors if color == "blue" else ~c.colors
    labels = {}
    next_id = 0
    for y in range(w.y0, w.y1 + 1):
        for x in range(w.x0, w.x1 + 1):
            v = (x, y)
            iy, ix = w.index(v)
            if not member[iy, ix] or v in labels:
                continue
            stack = [v]
            labels[v] = next_id
            while stack:
                s = stack.pop()
                for u in neighbors(s):
                    if w.contains(u) and u not in labels:
                        jy, jx = w.index(u)
                        if member[jy, jx]:
                            labels[u] = next_id
                            stack.append(u)
            next_id += 1
    return labels, next_id


def exhaustive_disjoint_paths(sites, adjacency_sites, sources, sinks, cap=12):
    """Maximum family of pairwise vertex-disjoint source-to-sink paths by
    complete search over site-set masks (tiny instances only)."""
    order = sorted(sites)
    index = {v: i for i, v in enumerate(order)}
    adj = [[] for _ in order]
    for v in order:
        for u in adjacency_sites(v):
            if u in index:
                adj[index[v]].append(index[u])
    src = [index[v] for v in sources if v in index]
    snk = {index[v] for v in sinks if v in index}
    masks = set()

    def dfs(head, mask, length):
        if head in snk:
            masks.add(mask)
            return
        if length >= cap:
            return
        for j in adj[head]:
            if not (mask >> j) & 1:
                dfs(j, mask | (1 << j), length + 1)

    for s in src:
        dfs(s, 1 << s, 1)
    mask_list = sorted(masks, key=lambda m: bin(m).count("1"))
    best = 0

    def pack(i, used, depth):
        nonlocal best
        best = max(best, depth)
        if depth + (len(mask_list) - i) <= best:
            return
        for j in range(i, len(mask_list)):
            if not (mask_list[j] & used):
                pack(j + 1, used | mask_list[j], depth + 1)

    pack(0, 0, 0)
    return best


def winding(points, z):
    total = 0.0
    n = len(points)
    for i in range(n):
        x1, y1 = points[i][0] - z[0], points[i][1] - z[1]
        x2, y2 = points[(i + 1) % n][0] - z[0], points[(i + 1) % n][1] - z[1]
        total += math.atan2(x1 * y2 - y1 * x2, x1 * x2 + y1 * y2)
    return round(total / (2 * math.pi))


# ---------------------------------------------------------------------------
# exhaustive alternating-arm search (annulus oracle)


class _ArmBudget(Exception):
    pass


def _annulus_structure(c, z, r, R):
    from tfpp.arms import _band_masks, band_anchors
    w = c.window
    band, inner, outer = _band_masks(c, z, r, R, None)
    iy, ix = np.nonzero(band)
    band_sites = [w.site(int(a), int(b)) for a, b in zip(iy, ix)]
    srcs_b, snks_b = band_anchors(c, band, inner, outer, True)[1:]
    srcs_y, snks_y = band_anchors(c, band, inner, outer, False)[1:]
    anchors = {True: (set(srcs_b), set(snks_b)), False: (set(srcs_y), set(snks_y))}
    return w, band_sites, anchors


def _enumerate_minimal_arms(c, band_sites, anchors, want_blue, work_budget):
    """All inclusion-minimal monochromatic crossings of the band, as
    frozensets of sites (complete DFS with a work budget)."""
    sites = [v for v in band_sites if c.is_blue(v) == want_blue]
    sset = set(sites)
    srcs, snks = anchors[want_blue]
    found: set[frozenset] = set()
    budget = [work_budget]

    def dfs(v, path_set):
        if budget[0] <= 0:
            raise _ArmBudget
        budget[0] -= 1
        if v in snks:
            found.add(frozenset(path_set))
            return
        for u in neighbors(v):
            if u in sset and u not in path_set:
                dfs(u, path_set | {u})

    for s in sorted(srcs):
        dfs(s, {s})
    arms = sorted(found, key=lambda s: (len(s), sorted(s)))
    minimal = []
    for a in arms:
        if not any(b < a for b in minimal):
            minimal.append(a)
    return minimal


def _has_color_crossing_within(c, component, anchors, want_blue):
    """Is there a monochromatic inner-to-outer crossing using only sites of
    the given component?"""
    comp = {v for v in component if c.is_blue(v) == want_blue}
    srcs, snks = anchors[want_blue]
    starts = [v for v in comp if v in srcs]
    targets = {v for v in comp if v in snks}
    seen = set(starts)
    stack = list(starts)
    while stack:
        v = stack.pop()
        if v in targets:
            return True
        for u in neighbors(v):
            if u in comp and u not in seen:
                seen.add(u)
                stack.append(u)
    return False


def alternating_arms_exist(c, z, r, R, k, work_budget=2_000_000):
    """Exhaustive decision for the alternating k-arm event (k in {2, 4}).

    k=2: a blue and a yellow crossing both exist.  k=4: some disjoint pair
    of inclusion-minimal blue crossings splits the band into components
    carrying yellow crossings on two different sides (the topological
    certificate that the cyclic color order is B,Y,B,Y).  Returns None when
    the enumeration budget is exceeded.
    """
    w, band_sites, anchors = _annulus_structure(c, z, r, R)
    band_set = set(band_sites)
    if k == 2:
        full = set(band_sites)
        return (_has_color_crossing_within(c, full, anchors, True) and
                _has_color_crossing_within(c, full, anchors, False))
    if k != 4:
        raise ValueError("oracle supports k in {2, 4}")
    try:
        blues = _enumerate_minimal_arms(c, band_sites, anchors, True,
                                        work_budget)
    except _ArmBudget:
        return None
    for i in range(len(blues)):
        for j in range(i + 1, len(blues)):
            if blues[i] & blues[j]:
                continue
            blocked = blues[i] | blues[j]
            remaining = band_set - blocked
            # components of the band minus the two blue arms
            seen: set = set()
            comps = []
            for v in sorted(remaining):
                if v in seen:
                    continue
                comp = {v}
                seen.add(v)
                stack = [v]
                while stack:
                    x = stack.pop()
                    for u in neighbors(x):
                        if u in remaining and u not in seen:
                            seen.add(u)
                            comp.add(u)
                            stack.append(u)
                comps.append(comp)
            with_yellow = 0
            for comp in comps:
                if _has_color_crossing_within(c, comp, anchors, False):
                    with_yellow += 1
                    if with_yellow >= 2:
                        return True
    return False


def exact_linf_hausdorff(points_a, points_b):
    """Plain double-loop L-infinity Hausdorff distance between point clouds
    (float, no spatial index) as an oracle for the KD-tree version."""
    def sup_inf(A, B):
        worst = 0.0
        for ax, ay in A:
            bestd = min(max(abs(ax - bx), abs(ay - by)) for bx, by in B)
            worst = max(worst, bestd)
        return worst

    return max(sup_inf(points_a, points_b), sup_inf(points_b, points_a))
