"""Arm events in box annuli.

Alternating arms are detected by tracing blue/yellow interface curves on the
dual hexagonal edges: on the triangular lattice every hexagon-lattice vertex
touches exactly zero or two interface edges, so interfaces are disjoint
simple curves and no turning rule is ever ambiguous.  The detector counts
the interface arcs that cross the annulus from its inner to its outer
boundary; the alternating(k) event is `count >= k` (for even k this is the
classical k-arm event with alternating colors).  Monochromatic arms are
counted by unit-vertex-capacity maximum flow.

Annuli are L-infinity box annuli; a site belongs to the annulus band when
its hexagonal cell intersects the closed annulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import Configuration, MCEstimate, derive_seed, sample
from .duality import vertex_disjoint_path_count
from .lattice import (
    NEIGHBOR_OFFSETS, Site, SiteWindow, embed, hex_inside_open_box, lex_key,
    neighbors,
)


class UnsupportedArmSequence(ValueError):
    """Raised for polychromatic non-alternating color sequences: only the
    alternating and monochromatic families are implemented."""


@dataclass(frozen=True)
class ArmEventSpec:
    z: complex
    r: float
    R: float
    kind: str                    # "alternating" | "monochromatic"
    k: int
    color: str | None = None     # for monochromatic: "blue" | "yellow"
    half_plane: float | None = None  # orientation theta of the closed half-plane

    def __post_init__(self):
        if not (1 <= self.r <= self.R):
            raise ValueError("arm event requires 1 <= r <= R")
        if self.k < 1:
            raise ValueError("arm event requires k >= 1")
        if self.kind == "monochromatic":
            if self.color not in ("blue", "yellow"):
                raise ValueError("monochromatic arm event needs a color")
        elif self.kind == "alternating":
            if self.k < 2:
                raise ValueError("alternating arm events need k >= 2 "
                                 "(k = 1 is a monochromatic event)")
        else:
            raise UnsupportedArmSequence(
                f"unsupported arm sequence kind {self.kind!r}: only alternating "
                "and monochromatic sequences are implemented")

    def window(self, pad: float = 2.0) -> SiteWindow:
        return SiteWindow.covering_box(self.z.real - self.R - pad, self.z.real + self.R + pad,
                                       self.z.imag - self.R - pad, self.z.imag + self.R + pad)


def _band_masks(c: Configuration, z: complex, r: float, R: float,
                half_plane: float | None):
    """Partition of the window into the annulus band and its two shores:
    IN = cells strictly inside the inner box, OUT = cells not strictly
    inside the outer box, BAND = everything else.  Arms live on BAND sites
    and anchor by adjacency to IN and OUT; interface arcs end when their
    pivot cell leaves BAND.  A half-plane restriction removes band cells
    whose centers fall on the wrong side."""
    w = c.window
    px, py = w.embed_grids()
    inner = hex_inside_open_box(px, py, z.real, z.imag, r)
    outer = ~hex_inside_open_box(px, py, z.real, z.imag, R)
    band = ~inner & ~outer
    if half_plane is not None:
        t = -math.sin(half_plane) * (px - z.real) + math.cos(half_plane) * (py - z.imag)
        band &= t >= 0
    return band, inner, outer


def count_crossing_interfaces(c: Configuration, z: complex, r: float, R: float,
                              half_plane: float | None = None) -> int:
    """Number of blue/yellow interface arcs crossing the annulus band from
    its inner shore to its outer shore.  Interface curves live on hexagon
    edges: inside the band every hexagon-lattice vertex meets zero or two
    interface edges, so curves are disjoint and no turning rule is needed.
    An arc counts when its two ends leave the band through the inner and
    the outer shore respectively.  Curves are walked from a sorted seed
    list and deduplicated by their edges."""
    if not (0 < r < R):
        raise ValueError("count_crossing_interfaces requires 0 < r < R")
    w = c.window
    band, inner, outer = _band_masks(c, z, r, R, half_plane)

    def in_band(v: Site) -> bool:
        if not w.contains(v):
            return False
        return bool(band[w.index(v)])

    def blue(v: Site) -> bool:
        return c.is_blue(v)

    def classify(v: Site) -> str:
        if w.contains(v):
            iy, ix = w.index(v)
            if inner[iy, ix]:
                return "inner"
            if outer[iy, ix]:
                return "outer"
            return "side"  # excluded by the half-plane restriction
        # outside the window: decide by the center (window covers R + pad)
        ex, ey = embed(v)
        return "inner" if max(abs(ex - z.real), abs(ey - z.imag)) < r else "outer"

    # active interface edges (vectorized; three forward offsets cover each
    # adjacent pair once)
    edges: list[tuple[Site, Site]] = []
    colors = c.colors
    ny, nx = w.ny, w.nx
    for dx, dy in ((1, 0), (0, 1), (-1, 1)):
        ys = slice(max(0, -dy), ny - max(0, dy))
        xs = slice(max(0, -dx), nx - max(0, dx))
        ys2 = slice(max(0, dy), ny - max(0, -dy))
        xs2 = slice(max(0, dx), nx - max(0, -dx))
        both = band[ys, xs] & band[ys2, xs2] & \
            (colors[ys, xs] != colors[ys2, xs2])
        iy, ix = np.nonzero(both)
        iy = iy + max(0, -dy)
        ix = ix + max(0, -dx)
        for a, b in zip(iy.tolist(), ix.tolist()):
            v = (w.x0 + b, w.y0 + a)
            edges.append((v, (v[0] + dx, v[1] + dy)))
    edges.sort(key=lambda e: (lex_key(e[0]), lex_key(e[1])))

    # Walk states are (a, d, s): the interface edge between a and a+off_d,
    # advancing toward the hexagon-vertex shared with a+off_{d+s}.  The two
    # cells adjacent to both ends of an edge sit at directions d-1 and d+1
    # from a, which keeps each step O(1): when the third cell t matches a's
    # color the curve pivots around a+off_d, otherwise around a.
    OFF = NEIGHBOR_OFFSETS

    def walk_from(a0: Site, d0: int, s0: int):
        """Follow the interface until the arc leaves the band (endpoint
        class returned) or closes into a loop.  The encodings (a, d, s) and
        (a+off_d, d+3, -s) describe the same edge and target corner, so
        both count as the starting state."""
        b0 = (a0[0] + OFF[d0][0], a0[1] + OFF[d0][1])
        start_states = {(a0, d0, s0), (b0, (d0 + 3) % 6, -s0)}
        a, d, s = a0, d0, s0
        seen = []
        while True:
            b = (a[0] + OFF[d][0], a[1] + OFF[d][1])
            seen.append((a, b) if lex_key(a) <= lex_key(b) else (b, a))
            dt = (d + s) % 6
            t = (a[0] + OFF[dt][0], a[1] + OFF[dt][1])
            if not in_band(t):
                return classify(t), seen
            if blue(t) != blue(a):
                a, d, s = a, dt, s
            else:
                if s == 1:
                    a, d, s = b, (d + 2) % 6, -1
                else:
                    a, d, s = b, (d - 2) % 6, 1
            if (a, d, s) in start_states:
                return "cycle", seen

    visited: set[tuple[Site, Site]] = set()
    crossings = 0
    for (v, u) in edges:
        ekey = (v, u) if lex_key(v) <= lex_key(u) else (u, v)
        if ekey in visited:
            continue
        d0 = OFF.index((u[0] - v[0], u[1] - v[1]))
        end_a, seen_a = walk_from(v, d0, 1)
        visited.update(seen_a)
        if end_a == "cycle":
            continue
        end_b, seen_b = walk_from(v, d0, -1)
        visited.update(seen_b)
        if {end_a, end_b} == {"inner", "outer"}:
            crossings += 1
    return crossings


def detect_arm_event(c: Configuration, spec: ArmEventSpec) -> bool:
    """Arm-event indicator on a configuration whose window covers the
    annulus (plus one site of margin)."""
    if spec.r == spec.R:
        return True  # degenerate annulus: the entire sample space
    from .fpp import require_window_covers
    require_window_covers(c, spec.z.real - spec.R - 1, spec.z.real + spec.R + 1,
                          spec.z.imag - spec.R - 1, spec.z.imag + spec.R + 1,
                          "detect_arm_event")
    if spec.kind == "alternating":
        cnt = count_crossing_interfaces(c, spec.z, spec.r, spec.R, spec.half_plane)
        return cnt >= spec.k
    # monochromatic: Menger count in the color subgraph of the band between
    # the sites adjacent to the inner shore and those adjacent to the outer
    band, inner, outer = _band_masks(c, spec.z, spec.r, spec.R, spec.half_plane)
    w = c.window
    want_blue = spec.color == "blue"
    sites, srcs, snks = band_anchors(c, band, inner, outer, want_blue)
    both = set(srcs) & set(snks)
    if both:
        # a single site touching both shores is an arm by itself
        rest = [v for v in sites if v not in both]
        srcs = [v for v in srcs if v not in both]
        snks = [v for v in snks if v not in both]
        extra = len(both)
        if extra >= spec.k:
            return True
        return vertex_disjoint_path_count(rest, srcs, snks) + extra >= spec.k
    return vertex_disjoint_path_count(sites, srcs, snks) >= spec.k


def band_anchors(c: Configuration, band: np.ndarray, inner: np.ndarray,
                 outer: np.ndarray, want_blue: bool):
    """Sites of one color inside the band, plus the subsets adjacent to the
    inner and outer shores (arm sources and sinks)."""
    w = c.window
    color_mask = band & (c.colors == want_blue)
    iy, ix = np.nonzero(color_mask)
    sites = [w.site(int(a), int(b)) for a, b in zip(iy, ix)]

    def touches(v: Site, shore: np.ndarray) -> bool:
        for u in neighbors(v):
            if w.contains(u) and shore[w.index(u)]:
                return True
        return False

    srcs = [v for v in sites if touches(v, inner)]
    snks = [v for v in sites if touches(v, outer) or
            any(not w.contains(u) for u in neighbors(v))]
    return sites, srcs, snks


def estimate_arm_probability(spec: ArmEventSpec, p: float, samples: int,
                             seed: int) -> MCEstimate:
    """Monte Carlo estimate of the arm-event probability over independent
    configurations keyed by (seed, trial)."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if spec.r == spec.R:
        return MCEstimate(1.0, 0.0, samples)
    window = spec.window()
    hits = np.empty(samples, dtype=np.float64)
    for trial in range(samples):
        c = sample(window, p, derive_seed(seed, "arm", trial))
        hits[trial] = 1.0 if detect_arm_event(c, spec) else 0.0
    return MCEstimate.from_samples(hits)
