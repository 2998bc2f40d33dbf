"""Min-path / max-separator dualities, verified by algorithms independent of
the shortest-path engine.

* quad crossings: unit-vertex-capacity maximum flow (Menger) between two
  opposite boundary arcs of a discrete quad, via in/out node splitting;
* separating circuits: constructive bilateral peeling of innermost yellow
  circuits around two clusters until their grown regions meet;
* strip separators: exhaustive search over path-shaped yellow separators at
  toy scale (the general case has no known constructive algorithm here).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .clusters import (
    Circuit, bluegrow, external_boundary_walk, fill_holes,
    splice_walk_to_circuit, surrounds, touches_window_edge,
)
from .config import Configuration
from .fpp import passage_time
from .lattice import DiscreteQuad, Site, SiteWindow, embed, lex_key, neighbors


def vertex_disjoint_path_count(sites: Iterable[Site], sources: Iterable[Site],
                               sinks: Iterable[Site]) -> int:
    """Maximum number of pairwise vertex-disjoint paths from sources to sinks
    inside the induced subgraph on `sites` (endpoints included), by max flow
    with every site split into an in/out pair of capacity one."""
    site_list = sorted(set(sites), key=lex_key)
    if not site_list:
        return 0
    index = {v: i for i, v in enumerate(site_list)}
    src = set(sources) & set(site_list)
    snk = set(sinks) & set(site_list)
    if not src or not snk:
        return 0
    if src & snk:
        # a site on both arcs is itself a path
        raise ValueError("sources and sinks must be disjoint")
    n = len(site_list)
    S, T = 2 * n, 2 * n + 1
    rows, cols, caps = [], [], []

    def add(u, v):
        rows.append(u)
        cols.append(v)
        caps.append(1)

    for v, i in index.items():
        add(2 * i, 2 * i + 1)  # in -> out
        if v in src:
            add(S, 2 * i)
        if v in snk:
            add(2 * i + 1, T)
        for u in neighbors(v):
            j = index.get(u)
            if j is not None:
                add(2 * i + 1, 2 * j)
    graph = csr_matrix((caps, (rows, cols)), shape=(2 * n + 2, 2 * n + 2), dtype=np.int32)
    return int(maximum_flow(graph, S, T).flow_value)


def max_disjoint_yellow_crossings(c: Configuration, q: DiscreteQuad) -> int:
    """Maximal number of disjoint yellow paths from arc 2 to arc 4 in the
    quad (the dual quantity to the arc-1/arc-3 passage time)."""
    yellow = [v for v in q.sites if c.window.contains(v) and not c.is_blue(v)]
    src = [v for v in q.arc(2) if not c.is_blue(v)]
    snk = [v for v in q.arc(4) if not c.is_blue(v)]
    return vertex_disjoint_path_count(yellow, src, snk)


def quad_passage_time(c: Configuration, q: DiscreteQuad) -> int:
    """T(arc1, arc3)(D): passage time between the first and third boundary
    arcs constrained to the quad."""
    res = passage_time(c, q.arc(1), q.arc(3), constraint=set(q.sites))
    if not res.reached:
        raise RuntimeError("quad is connected; arcs must be reachable")
    return int(res.time)


# ---------------------------------------------------------------------------
# separating circuits via bilateral peeling


@dataclass(frozen=True)
class PeelOutcome:
    count: int | None
    circuits: tuple[Circuit, ...]
    indeterminate: bool
    reason: str = ""


def _touching(A: set[Site], B: set[Site]) -> bool:
    if len(A) > len(B):
        A, B = B, A
    for v in A:
        if v in B:
            return True
        for u in neighbors(v):
            if u in B:
                return True
    return False


def max_disjoint_separating_circuits(c: Configuration, C: Iterable[Site],
                                     C2: Iterable[Site],
                                     max_peels: int = 10_000) -> PeelOutcome:
    """Count the maximal family of disjoint yellow circuits separating two
    blue clusters by iterating innermost-circuit peeling from both sides
    until the grown regions meet.  A circuit that would enclose the opposite
    cluster does not separate; that side freezes and peeling continues from
    the other.  Any growth or boundary contact with the window edge makes
    the instance indeterminate (the caller enlarges the window)."""
    w = c.window
    A = set(C)
    B = set(C2)
    if not A or not B or (A & B):
        raise ValueError("need two disjoint nonempty clusters")
    ref_A = embed(min(A, key=lex_key))
    ref_B = embed(min(B, key=lex_key))
    regions = {0: bluegrow(c, A), 1: bluegrow(c, B)}
    refs = {0: ref_A, 1: ref_B}
    frozen = {0: False, 1: False}
    circuits: list[Circuit] = []
    count = 0
    side = 0
    for _ in range(max_peels):
        if _touching(regions[0], regions[1]):
            return PeelOutcome(count, tuple(circuits), False)
        if frozen[0] and frozen[1]:
            return PeelOutcome(None, tuple(circuits), True, "both sides frozen")
        if frozen[side]:
            side ^= 1
        region = regions[side]
        if touches_window_edge(w, region):
            return PeelOutcome(None, tuple(circuits), True, "growth reached window edge")
        K = fill_holes(w, region)
        walk = external_boundary_walk(K)
        if any(not w.contains(v) or v[0] in (w.x0, w.x1) or v[1] in (w.y0, w.y1)
               for v in walk):
            return PeelOutcome(None, tuple(circuits), True, "boundary reached window edge")
        seq = splice_walk_to_circuit(walk, refs[side])
        circ = Circuit(tuple(seq))
        other_ref = refs[side ^ 1]
        if surrounds(circ.sites, other_ref):
            frozen[side] = True
            side ^= 1
            continue
        count += 1
        circuits.append(circ)
        regions[side] = bluegrow(c, K | set(walk))
        side ^= 1
    return PeelOutcome(None, tuple(circuits), True, "peel budget exhausted")


# ---------------------------------------------------------------------------
# strip separators (toy-scale exhaustive search)


class SeparatorSearchBudget(RuntimeError):
    pass


class StripSeparatorOracle:
    """Exhaustive machinery for one fixed strip-like site set V0 with fixed
    endpoint clusters: enumerates every path-shaped site set (simple paths;
    cycle site sets are covered since dropping one cycle edge leaves a
    Hamiltonian path) in V0 minus the endpoints, keeps set-minimal ones whose
    removal separates the endpoints, and packs disjoint separators for a
    given yellow coloring."""

    def __init__(self, sites: Sequence[Site], C: Sequence[Site], C2: Sequence[Site],
                 max_len: int = 10, dfs_budget: int = 5_000_000):
        self.sites = sorted(set(sites), key=lex_key)
        self.index = {v: i for i, v in enumerate(self.sites)}
        self.C = [self.index[v] for v in C]
        self.C2 = [self.index[v] for v in C2]
        n = len(self.sites)
        self.n = n
        self.adj = [[] for _ in range(n)]
        for v, i in self.index.items():
            for u in neighbors(v):
                j = self.index.get(u)
                if j is not None:
                    self.adj[i].append(j)
        endpoint = set(self.C) | set(self.C2)
        free = [i for i in range(n) if i not in endpoint]
        # enumerate simple-path site sets among free sites
        masks: set[int] = set()
        budget = dfs_budget
        free_set = set(free)

        def dfs(head: int, mask: int, length: int):
            nonlocal budget
            budget -= 1
            if budget <= 0:
                raise SeparatorSearchBudget(
                    "path enumeration budget exhausted; instance too large")
            masks.add(mask)
            if length >= max_len:
                return
            for j in self.adj[head]:
                bit = 1 << j
                if j in free_set and not (mask & bit):
                    dfs(j, mask | bit, length + 1)

        for i in free:
            dfs(i, 1 << i, 1)
        # keep separating masks only
        separating = [m for m in masks if self._separates(m)]
        # set-minimal filter
        separating.sort(key=_popcount)
        minimal: list[int] = []
        for m in separating:
            if not any((m & k) == k for k in minimal):
                minimal.append(m)
        self.minimal_separators = minimal

    def _separates(self, removed: int) -> bool:
        blocked = removed
        start = self.C[0]
        if (blocked >> start) & 1:
            return False
        targets = set(self.C2)
        seen = 1 << start
        stack = [start]
        for s in self.C[1:]:
            if not (blocked >> s) & 1 and not (seen >> s) & 1:
                seen |= 1 << s
                stack.append(s)
        while stack:
            v = stack.pop()
            if v in targets:
                return False
            for u in self.adj[v]:
                if not (seen >> u) & 1 and not (blocked >> u) & 1:
                    seen |= 1 << u
                    stack.append(u)
        return True

    def max_disjoint(self, yellow_mask: int) -> int:
        """Maximum number of pairwise disjoint separators present in the
        given yellow coloring (bitmask over self.sites)."""
        valid = [m for m in self.minimal_separators if (m & ~yellow_mask) == 0]
        valid.sort(key=_popcount)
        best = 0

        def rec(i: int, used: int, depth: int):
            nonlocal best
            if depth > best:
                best = depth
            remaining = len(valid) - i
            if depth + remaining <= best:
                return
            for j in range(i, len(valid)):
                if not (valid[j] & used):
                    rec(j + 1, used | valid[j], depth + 1)

        rec(0, 0, 0)
        return best

    def yellow_mask(self, c: Configuration) -> int:
        m = 0
        for v, i in self.index.items():
            if not c.is_blue(v):
                m |= 1 << i
        return m


def _popcount(m: int) -> int:
    return bin(m).count("1")


def strip_sites_in_window(window: SiteWindow, h: float) -> list[Site]:
    """Sites of the horizontal discrete strip of half-height h clipped to
    the window (hexagon-interior membership rule)."""
    from .lattice import Strip
    strip = Strip(0.0, h)
    mask = strip.site_mask(window)
    iy, ix = np.nonzero(mask)
    return [window.site(int(a), int(b)) for a, b in zip(iy, ix)]


def strip_separator_count_bruteforce(c: Configuration, C: Sequence[Site],
                                     C2: Sequence[Site], h: float,
                                     max_len: int = 10) -> int:
    """Maximal number of pairwise disjoint yellow path-shaped separators
    between two clusters inside the window-truncated horizontal strip.
    Exhaustive and only feasible at toy scale: at most 8 site rows and 12
    site columns are accepted."""
    V0 = strip_sites_in_window(c.window, h)
    rows = len({v[1] for v in V0})
    cols = len({v[0] for v in V0})
    if rows > 8 or cols > 12:
        raise ValueError(
            f"instance too large for exhaustive search ({rows} rows x {cols} cols;"
            " limits are 8 x 12)")
    for v in list(C) + list(C2):
        if v not in set(V0):
            raise ValueError(f"endpoint site {v} is not inside the strip")
    oracle = StripSeparatorOracle(V0, C, C2, max_len=max_len)
    return oracle.max_disjoint(oracle.yellow_mask(c))
