import math

import numpy as np
import pytest

from helpers import exact_linf_hausdorff
from tfpp import config as cfg, scaling as sc
from tfpp.lattice import AxisBox, SiteWindow, embed, hexagon_vertices


def test_crossing_degenerate():
    assert sc.crossing_probability(1.0, 8, 30, 1).mean == 1.0
    assert sc.crossing_probability(0.0, 8, 30, 1).mean == 0.0


def _oracle_crossing(c, R):
    """Exact-arithmetic reimplementation of the crossing event: blue
    components inside the box, entry/exit segments tested over Q[sqrt(3)]."""
    from tfpp._exact import PointQ3, embed_q3, q3, q3_from_float, segments_intersect
    from tfpp.lattice import embed, lex_key, neighbors
    w = c.window
    left = (PointQ3(q3(0), q3(0)), PointQ3(q3(0), q3_from_float(R)))
    right = (PointQ3(q3_from_float(R), q3(0)), PointQ3(q3_from_float(R), q3_from_float(R)))

    def inbox(v):
        ex, ey = embed(v)
        return 0 <= ex <= R and 0 <= ey <= R

    blue_in = [v for v in w.sites() if c.is_blue(v) and inbox(v)]
    bset = set(blue_in)
    seen = set()
    comps = []
    for v in blue_in:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            for u in neighbors(x):
                if u in bset and u not in seen:
                    seen.add(u)
                    comp.add(u)
                    stack.append(u)
        comps.append(comp)
    for comp in comps:
        def hit(side):
            for b in comp:
                for a in neighbors(b):
                    if w.contains(a) and c.is_blue(a) and \
                            segments_intersect(embed_q3(a), embed_q3(b), *side):
                        return True
            return False
        if hit(left) and hit(right):
            return True
    for v in w.sites():
        if not c.is_blue(v):
            continue
        for u in neighbors(v):
            if w.contains(u) and c.is_blue(u) and lex_key(u) > lex_key(v):
                if segments_intersect(embed_q3(v), embed_q3(u), *left) and \
                        segments_intersect(embed_q3(v), embed_q3(u), *right):
                    return True
    return False


def test_crossing_detector_vs_exact_oracle():
    rng = np.random.default_rng(59)
    for _ in range(300):
        R = int(rng.integers(1, 9))
        w = sc.crossing_window(R)
        c = cfg.sample(w, float(rng.uniform(0.1, 0.9)), int(rng.integers(1 << 40)))
        assert sc.has_blue_lr_crossing(c, R) == _oracle_crossing(c, R)


def test_correlation_length_small_p():
    L, info = sc.correlation_length_eps(0.01, 0.1, 150, 5)
    assert L == 1.0


def test_correlation_length_monotone_in_p_shared_seeds():
    L40, _ = sc.correlation_length_eps(0.40, 0.1, 150, 5)
    L45, _ = sc.correlation_length_eps(0.45, 0.1, 150, 5)
    assert L40 <= L45


def test_eps_robustness():
    L01, _ = sc.correlation_length_eps(0.42, 0.1, 150, 5)
    L03, _ = sc.correlation_length_eps(0.42, 0.3, 150, 5)
    assert 1.0 <= L01 / L03 <= 20.0


def test_budget_error():
    with pytest.raises(sc.BudgetError):
        sc.correlation_length_eps(0.47, 0.1, 40, 5, r_max=4.0)


class TestPi4Table:
    def test_roundtrip_and_audit(self, tmp_path):
        table = sc.Pi4Table((2.0, 4.0, 8.0),
                            (cfg.MCEstimate(0.3, 0.01, 100),
                             cfg.MCEstimate(0.12, 0.01, 100),
                             cfg.MCEstimate(0.05, 0.01, 100)),
                            seed=9)
        path = tmp_path / "pi4.csv"
        sc.save_pi4_table(table, path)
        loaded = sc.load_pi4_table(path)
        assert loaded == table
        assert table.audit() == []
        bad = sc.Pi4Table((2.0, 4.0), (cfg.MCEstimate(0.3, 0.01, 100),
                                       cfg.MCEstimate(0.07, 0.01, 100)), 9)
        assert bad.audit() == [1]  # 4^2*0.07 = 1.12 < 2^2*0.3 = 1.2

    def test_interpolation_and_range_error(self):
        # synthetic noiseless table following R^2 pi4 = R^{3/4}
        radii = (2.0, 4.0, 8.0, 16.0, 32.0)
        ests = tuple(cfg.MCEstimate(R ** 0.75 / R ** 2, 0.0, 10) for R in radii)
        table = sc.Pi4Table(radii, ests, 1)
        # L(p) solves R^{3/4} = 1/(pc-p) => R = (pc-p)^{-4/3} exactly
        for p in (0.2, 0.4, 0.42):
            expected = (0.5 - p) ** (-4.0 / 3.0)
            if expected < 2.0:
                continue
            got = sc.correlation_length_L(p, table)
            assert got == pytest.approx(expected, rel=1e-9)
        with pytest.raises(sc.RangeError):
            sc.correlation_length_L(0.4999, table)


class TestBoxGraph:
    def test_p1_complete_blue_connectivity(self):
        ambient = AxisBox(0, 0, 10, 10)
        w = SiteWindow.covering_box(-12, 12, -12, 12)
        c = cfg.sample(w, 1.0, 1)
        g = sc.box_graph(c, 1, ambient)
        # one spanning blue cluster joins every pair of boxes
        for u in g.nodes:
            assert len(g.adjacency[u]) == len(g.nodes) - 1

    def test_p0_only_adjacency(self):
        ambient = AxisBox(0, 0, 10, 10)
        w = SiteWindow.covering_box(-12, 12, -12, 12)
        c = cfg.sample(w, 0.0, 1)
        g = sc.box_graph(c, 1, ambient)
        m = 3
        for (a, b) in g.nodes:
            expected = {(a + da, b + db) for da in (-1, 0, 1) for db in (-1, 0, 1)
                        if (da, db) != (0, 0) and -m <= a + da < m and -m <= b + db < m}
            assert set(g.adjacency[(a, b)]) == expected

    def test_edges_match_direct_connectivity_search(self):
        # brute force: two boxes are joined iff adjacent or some blue cluster
        # (within the ambient) meets both
        rng = np.random.default_rng(60)
        ambient = AxisBox(0, 0, 6, 6)
        w = SiteWindow.covering_box(-8, 8, -8, 8)
        for t in range(20):
            c = cfg.sample(w, 0.5, 13_000 + t)
            g = sc.box_graph(c, 1, ambient)
            from scipy import ndimage
            px, py = w.embed_grids()
            from tfpp.lattice import hex_box_overlap
            in_amb = hex_box_overlap(px, py, 0, 0, 6, 6)
            labels, nlab = ndimage.label(c.colors & in_amb, structure=sc._HEX_STRUCTURE)
            boxes_of = {}
            iy, ix = np.nonzero(labels > 0)
            for a, b in zip(iy, ix):
                lab = int(labels[a, b])
                for node in sc._site_boxes(px[a, b], py[a, b], ambient, g.eps):
                    boxes_of.setdefault(lab, set()).add(node)
            for u in g.nodes:
                for v in g.nodes:
                    if u >= v:
                        continue
                    adjacent = max(abs(u[0] - v[0]), abs(u[1] - v[1])) == 1
                    shares = any(u in bs and v in bs for bs in boxes_of.values())
                    assert g.has_edge(u, v) == (adjacent or shares)


class TestGoodSubgraphs:
    def test_p0_empty(self):
        ambient = AxisBox(0, 0, 30, 30)
        w = SiteWindow.covering_box(-33, 33, -33, 33)
        c = cfg.sample(w, 0.0, 1)
        g = sc.box_graph(c, 2, ambient)
        assert sc.good_subgraphs(g, 1.5) == []

    def test_single_crossing_fixture(self):
        # one blue column crossing the ambient box vertically
        ambient = AxisBox(0, 0, 30, 30)
        w = SiteWindow.covering_box(-34, 34, -34, 34)
        blue = np.zeros((w.ny, w.nx), bool)
        for v in w.sites():
            ex, ey = embed(v)
            if abs(ex) <= 1.0 and abs(ey) <= 31:
                blue[w.index(v)] = True
        c = cfg.from_colors(w, blue)
        g = sc.box_graph(c, 2, ambient)
        goods = sc.good_subgraphs(g, 1.5)
        assert len(goods) == 1
        cover, _ = sc.box_cover(
            [v for v in w.sites() if blue[w.index(v)]], 2, ambient)
        assert goods[0] == frozenset(cover)


class TestBoxCover:
    def test_single_site(self):
        ambient = AxisBox(0, 0, 8, 8)
        boxes, dh = sc.box_cover([(0, 0)], 2, ambient)
        eps_plane = 8 * 3.0 ** -2
        assert 1 <= len(boxes) <= 4
        assert dh < eps_plane

    def test_cluster_cover_close(self):
        ambient = AxisBox(0, 0, 8, 8)
        cluster = [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)]
        boxes, dh = sc.box_cover(cluster, 2, ambient)
        assert dh < 8 * 3.0 ** -2

    def test_matches_plain_double_loop(self):
        ambient = AxisBox(0, 0, 8, 8)
        rng = np.random.default_rng(61)
        for t in range(100):
            w = SiteWindow(-3, 3, -3, 3)
            c = cfg.sample(w, 0.6, 14_000 + t)
            sites = [v for v in w.sites() if c.is_blue(v)]
            if not sites:
                continue
            boxes, dh = sc.box_cover(sites, 2, ambient)
            cl_pts = []
            for v in sites:
                cl_pts.append(embed(v))
                cl_pts.extend(hexagon_vertices(v))
            s = ambient.r1 * 3.0 ** -2
            bx_pts = []
            for a, b in boxes:
                cx, cy = ambient.cx + s * (a + 0.5), ambient.cy + s * (b + 0.5)
                for ox in (-0.5, 0.0, 0.5):
                    for oy in (-0.5, 0.0, 0.5):
                        bx_pts.append((cx + ox * s, cy + oy * s))
            assert dh == pytest.approx(exact_linf_hausdorff(cl_pts, bx_pts), abs=1e-9)


def test_bijection_rate_report():
    # empirical check of the good-subgraph <-> boundary-component matching
    # (run at a desk-feasible mesh; the rate is reported)
    ambient = AxisBox(0, 0, 150, 150)
    w = SiteWindow.covering_box(-155 - 80, 155 + 80, -155, 155)
    comps = goods = matches = 0
    for t in range(5):
        c = cfg.sample(w, 0.45, 15_000 + t)
        nc, ng, nm = sc.box_cover_graph_matches(c, 3, ambient, 0.5)
        comps += nc
        goods += ng
        matches += nm
    rate = matches / comps if comps else float("nan")
    print(f"\n[report] box-graph bijection: {matches}/{comps} components matched; "
          f"{goods} good subgraphs")
    assert comps > 0
    assert rate >= 0.5
