"""Deterministic figures from tfpp result CSVs.

Four kinds are supported: a polar plot of the directional time constant
("shape"), the log-log correlation-length fit ("corr-fit"), the product
L * mu against p ("ccd"), and the anisotropy trend ("anisotropy").  Output
format follows the file extension (SVG or PNG).  Figures depend only on the
CSV bytes: fixed style, fixed SVG hash salt, no date metadata.
"""

from __future__ import annotations

import math

import matplotlib
import numpy as np

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402

from .schema import Row, SchemaError, read_rows, select  # noqa: E402

KINDS = ("shape", "corr-fit", "ccd", "anisotropy")

_STYLE = {
    "svg.hashsalt": "fppviz",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def render(csv_path, kind: str, out_path) -> None:
    """Render one figure kind from a schema-v1 CSV to out_path."""
    if kind not in KINDS:
        raise SchemaError(f"unknown figure kind {kind!r}; expected one of {KINDS}")
    rows = read_rows(csv_path)
    with matplotlib.rc_context(_STYLE):
        fig = Figure(figsize=(6.4, 4.8), dpi=100)
        if kind == "shape":
            _shape(fig, rows)
        elif kind == "corr-fit":
            _corr_fit(fig, rows)
        elif kind == "ccd":
            _ccd(fig, rows)
        else:
            _anisotropy(fig, rows)
        fig.savefig(out_path, metadata=_metadata(str(out_path)))


def _metadata(out_path: str):
    if out_path.endswith(".svg"):
        return {"Date": None}
    return None


def _shape(fig: Figure, rows: list[Row]) -> None:
    mus = select(rows, "mu")
    if not mus:
        raise SchemaError("shape figure needs 'mu' rows with a theta parameter")
    by_p: dict[float, list[Row]] = {}
    for r in mus:
        if "theta" not in r.params:
            raise SchemaError("'mu' row lacks the theta parameter")
        by_p.setdefault(r.p, []).append(r)
    ax = fig.add_subplot(111, projection="polar")
    annotations = []
    for p, group in sorted(by_p.items()):
        group = sorted(group, key=lambda r: r.params["theta"])
        thetas = np.array([r.params["theta"] for r in group])
        radii = np.array([r.mean for r in group])
        errs = np.array([r.stderr for r in group])
        # unfold through the twelve-fold lattice symmetry for a closed curve
        full_t, full_r, full_e = _unfold_twelvefold(thetas, radii, errs)
        ax.plot(full_t, full_r, lw=1.2, label=f"p={p:g}")
        ax.fill_between(full_t, full_r - full_e, full_r + full_e, alpha=0.25)
        ratio = radii.max() / radii.min()
        annotations.append(f"p={p:g}: max/min = {ratio:.3f}")
        circle_t = np.linspace(0, 2 * math.pi, 241)
        ax.plot(circle_t, np.full_like(circle_t, radii.mean()), ls="--",
                lw=0.8, color="gray")
    ax.set_title("directional time constant (dashed: circle at mean radius)")
    fig.text(0.02, 0.02, "\n".join(annotations))
    ax.legend(loc="upper right", bbox_to_anchor=(1.25, 1.1))


def _unfold_twelvefold(thetas, radii, errs):
    """Extend estimates in [0, pi/6] sector conventions to the full circle
    by the lattice's reflection and rotation symmetries (plot only)."""
    base = list(zip(thetas, radii, errs))
    seen = {}
    for t, r, e in base:
        seen[round(t, 9)] = (r, e)
        # reflection across pi/6 within the pi/3 sector
        tr = math.pi / 3 - t
        seen.setdefault(round(tr % (math.pi / 3), 9), (r, e))
    sector = sorted(seen.items())
    full_t, full_r, full_e = [], [], []
    for k in range(6):
        for t, (r, e) in sector:
            full_t.append(t + k * math.pi / 3)
            full_r.append(r)
            full_e.append(e)
    full_t.append(full_t[0] + 2 * math.pi)
    full_r.append(full_r[0])
    full_e.append(full_e[0])
    return np.array(full_t), np.array(full_r), np.array(full_e)


def _corr_fit(fig: Figure, rows: list[Row]) -> None:
    ls = select(rows, "corr_length_eps")
    if len(ls) < 2:
        raise SchemaError("corr-fit figure needs at least two 'corr_length_eps' rows")
    ls = sorted(ls, key=lambda r: r.p)
    xs = np.log([1.0 / (0.5 - r.p) for r in ls])
    ys = np.log([r.mean for r in ls])
    slope, intercept = np.polyfit(xs, ys, 1)
    ax = fig.add_subplot(111)
    ax.plot(xs, ys, "o")
    grid = np.linspace(xs.min(), xs.max(), 50)
    ax.plot(grid, slope * grid + intercept, "-", lw=1)
    ax.set_xlabel("log 1/(p_c - p)")
    ax.set_ylabel("log L_eps(p)")
    ax.set_title("correlation length scaling")
    ax.text(0.05, 0.92, f"slope = {float(slope)!r}", transform=ax.transAxes)
    ax.text(0.05, 0.85, "reference slope 4/3", transform=ax.transAxes)


def _ccd(fig: Figure, rows: list[Row]) -> None:
    cc = select(rows, "ccd")
    if not cc:
        raise SchemaError("ccd figure needs 'ccd' rows")
    cc = sorted(cc, key=lambda r: r.p)
    ps = [r.p for r in cc]
    vals = [r.mean for r in cc]
    los = [r.params.get("ci_lo", r.mean - 2 * r.stderr) for r in cc]
    his = [r.params.get("ci_hi", r.mean + 2 * r.stderr) for r in cc]
    ax = fig.add_subplot(111)
    ax.errorbar(ps, vals,
                yerr=[np.subtract(vals, los), np.subtract(his, vals)],
                fmt="o-", capsize=3)
    ax.set_xlabel("p")
    ax.set_ylabel("L_eps(p) * mu(p)")
    ax.set_title("normalized time constant (bounded toward p_c)")
    if min(vals) > 0:
        ax.text(0.05, 0.92, f"spread max/min = {max(vals) / min(vals):.3f}",
                transform=ax.transAxes)


def _anisotropy(fig: Figure, rows: list[Row]) -> None:
    an = select(rows, "anisotropy")
    if not an:
        raise SchemaError("anisotropy figure needs 'anisotropy' rows")
    an = sorted(an, key=lambda r: r.p)
    ps = [r.p for r in an]
    vals = [r.mean for r in an]
    los = [r.params.get("ci90_lo", r.mean) for r in an]
    his = [r.params.get("ci90_hi", r.mean) for r in an]
    ax = fig.add_subplot(111)
    ax.plot(ps, vals, "o-")
    ax.fill_between(ps, los, his, alpha=0.3)
    ax.axhline(1.0, color="gray", lw=0.8, ls="--")
    ax.set_xlabel("p")
    ax.set_ylabel("max/min directional mu")
    ax.set_title("limit-shape anisotropy shrinks toward p_c")
    for p, v in zip(ps, vals):
        ax.annotate(f"{v:.3f}", (p, v), textcoords="offset points", xytext=(4, 4))
