"""Experiment harness: time-constant and shape estimation, CCD products,
scaling-exponent fits, renormalization diagnostics, and persistence.

All randomness flows from a single master seed: each trial draws its own
counter-based seed from (master_seed, estimand tag, probe tags, trial), so
results are bit-identical regardless of evaluation order or thread count.
Records are written as CSV (schema v1: estimand,p,param_json,mean,stderr,
n,seed) with an optional JSON mirror.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fpp
from .config import MCEstimate, derive_seed, sample
from .lattice import SiteWindow, closest_site
from .scaling import correlation_length_eps

P_C = 0.5

CSV_HEADER = "estimand,p,param_json,mean,stderr,n,seed"


@dataclass(frozen=True)
class ResultRecord:
    estimand: str
    p: float
    params: dict
    mean: float
    stderr: float
    n_samples: int
    seed: int
    wall_time: float = 0.0

    def param_json(self) -> str:
        return json.dumps(self.params, sort_keys=True, separators=(",", ":"),
                          default=float)


SUBCRITICAL_ESTIMANDS = {"mu", "ccd", "corr_length_eps", "anisotropy", "strip_nu"}


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: an estimand evaluated over a p ladder."""

    estimand: str
    ps: tuple[float, ...]
    thetas: tuple[float, ...] = (0.0,)
    n_ladder: tuple[int, ...] = ()
    samples: int = 100
    master_seed: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.ps:
            raise ValueError("experiment needs at least one p")
        if list(self.n_ladder) != sorted(set(self.n_ladder)):
            raise ValueError("n ladder must be strictly increasing")
        if self.estimand in SUBCRITICAL_ESTIMANDS and any(p >= P_C for p in self.ps):
            raise ValueError(f"estimand {self.estimand!r} requires p < 1/2")
        if self.samples < 1:
            raise ValueError("samples must be positive")


def run_experiment(spec: ExperimentSpec) -> list[ResultRecord]:
    """Evaluate one estimand over its p ladder; all trial seeds derive from
    the spec's master seed."""
    from .arms import ArmEventSpec, estimate_arm_probability
    from .scaling import correlation_length_eps, crossing_probability
    records: list[ResultRecord] = []
    for p in spec.ps:
        if spec.estimand == "crossing":
            R = float(spec.params.get("R", 32))
            est = crossing_probability(p, R, spec.samples, spec.master_seed)
            records.append(ResultRecord("crossing", p, {"R": R}, est.mean,
                                        est.stderr, est.n, spec.master_seed))
        elif spec.estimand == "corr_length_eps":
            eps = float(spec.params.get("eps", 0.1))
            L, info = correlation_length_eps(p, eps, spec.samples, spec.master_seed)
            lo, hi = info["bracket"]
            records.append(ResultRecord("corr_length_eps", p, {"eps": eps},
                                        L, (hi - lo) / 2, spec.samples,
                                        spec.master_seed))
        elif spec.estimand == "mu":
            for theta in spec.thetas:
                est = estimate_mu(p, theta, list(spec.n_ladder) or [16],
                                  spec.samples, spec.master_seed)
                records.extend(est.records)
        elif spec.estimand == "arm_prob":
            aspec = ArmEventSpec(0j, float(spec.params.get("r", 1)),
                                 float(spec.params.get("R", 8)),
                                 spec.params.get("kind", "alternating"),
                                 int(spec.params.get("k", 4)),
                                 color=spec.params.get("color"))
            est = estimate_arm_probability(aspec, p, spec.samples, spec.master_seed)
            records.append(ResultRecord("arm_prob", p,
                                        {"r": aspec.r, "R": aspec.R,
                                         "kind": aspec.kind, "k": aspec.k,
                                         "color": aspec.color},
                                        est.mean, est.stderr, est.n,
                                        spec.master_seed))
        else:
            raise ValueError(f"unknown estimand {spec.estimand!r}")
    return records


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as f:
        f.write(CSV_HEADER + "\n")
        for r in records:
            params = r.param_json().replace('"', '""')
            f.write(f'{r.estimand},{float(r.p)!r},"{params}",'
                    f"{float(r.mean)!r},{float(r.stderr)!r},{r.n_samples},{r.seed}\n")


def read_csv(path) -> list[ResultRecord]:
    import csv as _csv
    out = []
    with open(path, newline="") as f:
        rd = _csv.reader(f)
        header = next(rd)
        if header != CSV_HEADER.split(","):
            raise ValueError(f"unexpected CSV header {header}")
        for row in rd:
            out.append(ResultRecord(row[0], float(row[1]), json.loads(row[2]),
                                    float(row[3]), float(row[4]), int(row[5]),
                                    int(row[6])))
    return out


def write_json(records, path) -> None:
    payload = {
        "schema": "v1",
        "records": [
            {
                "estimand": r.estimand, "p": r.p, "params": r.params,
                "mean": r.mean, "stderr": r.stderr, "n": r.n_samples,
                "seed": r.seed, "wall_time": r.wall_time,
            }
            for r in records
        ],
    }
    with open(path, "w") as f:
        json.dump(payload, f, indent=1, sort_keys=True)


def read_json(path) -> list[ResultRecord]:
    with open(path) as f:
        payload = json.load(f)
    if payload.get("schema") != "v1":
        raise ValueError("unknown schema version")
    return [ResultRecord(d["estimand"], d["p"], d["params"], d["mean"],
                         d["stderr"], d["n"], d["seed"], d.get("wall_time", 0.0))
            for d in payload["records"]]


def _run_trials(fn, samples: int, threads: int = 1) -> np.ndarray:
    """Evaluate fn(trial) for trial in range(samples); the reduction order is
    fixed by trial index, so the thread count never changes the result."""
    out = np.empty(samples, dtype=np.float64)
    if threads <= 1:
        for t in range(samples):
            out[t] = fn(t)
        return out
    with ThreadPoolExecutor(max_workers=threads) as ex:
        for t, val in enumerate(ex.map(fn, range(samples))):
            out[t] = val
    return out


# ---------------------------------------------------------------------------
# direction norms and windows


def lattice_direction_norm(theta: float) -> float:
    """Graph-distance norm of e^{i theta} on the lattice: the unit ball is
    the hexagon with vertices at the six neighbor directions, so the norm is
    (2/sqrt(3)) * cos(theta' - pi/6) with theta' folded into [0, pi/3)."""
    tp = theta % (math.pi / 3)
    return math.cos(tp - math.pi / 6) * 2.0 / math.sqrt(3.0)


def window_for_segment(theta: float, n: float, margin: float) -> SiteWindow:
    """Index window covering the segment [0, n e^{i theta}] padded by margin
    on every side."""
    ex = n * math.cos(theta)
    ey = n * math.sin(theta)
    return SiteWindow.covering_box(min(0.0, ex) - margin, max(0.0, ex) + margin,
                                   min(0.0, ey) - margin, max(0.0, ey) + margin)


def directional_passage(c, theta: float, n: float) -> int:
    """T(0, n e^{i theta}) between the closest sites."""
    zb = complex(n * math.cos(theta), n * math.sin(theta))
    res = fpp.passage_time(c, [closest_site(0j)], [closest_site(zb)])
    if not res.reached:
        raise RuntimeError("directional passage should always reach inside its window")
    return int(res.time)


# ---------------------------------------------------------------------------
# estimators


@dataclass(frozen=True)
class MuEstimate:
    p: float
    theta: float
    per_rung: dict              # n -> MCEstimate of a(0,n)/n
    mu: MCEstimate              # value at the largest rung
    fit_slope: float            # two-point fit a(n) = mu n + c on the last two rungs
    records: tuple[ResultRecord, ...]
    samples_last: np.ndarray = field(repr=False, default=None)


def estimate_mu(p: float, theta: float, n_ladder, samples: int, seed: int,
                margin_factor: float = 0.5, threads: int = 1,
                engine: str = "auto") -> MuEstimate:
    """Estimate the directional time constant from a ladder of distances:
    reports a(0,n)/n per rung, takes mu-hat at the largest rung, and adds a
    two-point linear fit over the last two rungs to expose the finite-n
    offset."""
    if p >= P_C:
        raise ValueError("estimate_mu requires p < 1/2 (mu vanishes beyond)")
    ladder = sorted(set(int(n) for n in n_ladder))
    if not ladder or ladder[0] < 1:
        raise ValueError("n ladder must contain positive integers")
    per_rung = {}
    records = []
    means = {}
    last_vals = None
    for n in ladder:
        margin = max(2.0, margin_factor * n)
        window = window_for_segment(theta, n, margin)

        def one(trial: int, _n=n, _w=window) -> float:
            c = sample(_w, p, derive_seed(seed, "mu", int(round(theta * 1e6)), _n, trial))
            return directional_passage(c, theta, _n) / _n

        t0 = time.time()
        vals = _run_trials(one, samples, threads)
        est = MCEstimate.from_samples(vals)
        per_rung[n] = est
        means[n] = est.mean
        if n == ladder[-1]:
            last_vals = vals
        records.append(ResultRecord("a_over_n", p, {"n": n, "theta": theta},
                                    est.mean, est.stderr, est.n, seed,
                                    time.time() - t0))
    n_max = ladder[-1]
    mu = per_rung[n_max]
    if len(ladder) >= 2:
        n1, n2 = ladder[-2], ladder[-1]
        fit = (means[n2] * n2 - means[n1] * n1) / (n2 - n1)
    else:
        fit = mu.mean
    records.append(ResultRecord("mu", p, {"theta": theta, "n_max": n_max,
                                          "fit_slope": fit},
                                mu.mean, mu.stderr, mu.n, seed))
    return MuEstimate(p, theta, per_rung, mu, fit, tuple(records), last_vals)


@dataclass(frozen=True)
class ShapeEstimate:
    p: float
    thetas: tuple[float, ...]
    mu_by_theta: dict
    ratio: float
    ci90: tuple[float, float]
    records: tuple[ResultRecord, ...]


def shape_anisotropy(p: float, K: int, n: int, samples: int, seed: int,
                     bootstrap: int = 1000, threads: int = 1) -> ShapeEstimate:
    """Anisotropy of the estimated limit shape: A-hat = max/min of mu-hat
    over the directions theta_k = pi k / (3K), with a bootstrap confidence
    interval (the lattice's twelve-fold shape symmetry makes this direction
    fan a full fundamental sector)."""
    if K < 6:
        raise ValueError("shape_anisotropy requires K >= 6 directions")
    if p >= P_C:
        raise ValueError("shape_anisotropy requires p < 1/2")
    thetas = tuple(math.pi * k / (3 * K) for k in range(K))
    mu_by_theta = {}
    all_vals = {}
    records: list[ResultRecord] = []
    for th in thetas:
        est = estimate_mu(p, th, [n], samples, seed, threads=threads)
        mu_by_theta[th] = est.mu
        all_vals[th] = est.samples_last
        records.extend(est.records)
    means = np.asarray([mu_by_theta[th].mean for th in thetas])
    ratio = float(means.max() / means.min())
    rng = np.random.default_rng(derive_seed(seed, "shape-boot"))
    boots = np.empty(bootstrap)
    for b in range(bootstrap):
        ms = []
        for th in thetas:
            vals = all_vals[th]
            idx = rng.integers(0, len(vals), len(vals))
            ms.append(vals[idx].mean())
        ms = np.asarray(ms)
        boots[b] = ms.max() / ms.min()
    lo, hi = float(np.quantile(boots, 0.05)), float(np.quantile(boots, 0.95))
    records.append(ResultRecord("anisotropy", p,
                                {"K": K, "n": n, "ci90_lo": lo, "ci90_hi": hi},
                                ratio, float(boots.std(ddof=1)), samples, seed))
    return ShapeEstimate(p, thetas, mu_by_theta, ratio, (lo, hi), tuple(records))


@dataclass(frozen=True)
class CCDResult:
    p: float
    eps: float
    L: float
    n: int
    mu: MCEstimate
    ratio: float
    ratio_lo: float
    ratio_hi: float
    records: tuple[ResultRecord, ...]


def ccd_ratio(p: float, eps: float, seed: int, samples: int = 500,
              probe_samples: int = 400, n_factor: float = 8.0,
              threads: int = 1) -> CCDResult:
    """The product L_eps(p) * mu_hat(p, theta=0) with the passage distance
    scaled to n >= n_factor * L_eps(p)."""
    if p >= P_C:
        raise ValueError("ccd_ratio requires p < 1/2")
    L, _ = correlation_length_eps(p, eps, probe_samples, derive_seed(seed, "ccd-L"))
    n = max(8, math.ceil(n_factor * L))
    est = estimate_mu(p, 0.0, [n], samples, derive_seed(seed, "ccd-mu"),
                      threads=threads)
    ratio = L * est.mu.mean
    lo = L * (est.mu.mean - 2 * est.mu.stderr)
    hi = L * (est.mu.mean + 2 * est.mu.stderr)
    rec = ResultRecord("ccd", p, {"eps": eps, "L": L, "n": n,
                                  "ci_lo": lo, "ci_hi": hi},
                       ratio, L * est.mu.stderr, est.mu.n, seed)
    return CCDResult(p, eps, L, n, est.mu, ratio, lo, hi,
                     est.records + (rec,))


@dataclass(frozen=True)
class ExponentFit:
    ps: tuple[float, ...]
    Ls: tuple[float, ...]
    slope: float
    intercept: float
    ci: tuple[float, float]
    records: tuple[ResultRecord, ...]


def fit_correlation_exponent(ps, eps: float, seed: int, probe_samples: int = 400,
                             replicates: int = 3) -> ExponentFit:
    """Least-squares slope of log L_eps(p) against log 1/(p_c - p), with a
    bootstrap interval over per-point replicate estimates."""
    ps = sorted(set(float(p) for p in ps))
    if len(ps) < 4:
        raise ValueError("fit_correlation_exponent needs at least 4 distinct p values")
    if any(p >= P_C for p in ps):
        raise ValueError("all p must be < 1/2")
    reps: dict[float, list[float]] = {p: [] for p in ps}
    records = []
    for p in ps:
        for r in range(replicates):
            L, _ = correlation_length_eps(p, eps, probe_samples,
                                          derive_seed(seed, "expfit", int(p * 1e6), r))
            reps[p].append(L)
        est = MCEstimate.from_samples(reps[p])
        records.append(ResultRecord("corr_length_eps", p, {"eps": eps},
                                    est.mean, est.stderr, est.n, seed))
    xs = np.log([1.0 / (P_C - p) for p in ps])
    Ls = tuple(float(np.mean(reps[p])) for p in ps)
    ys = np.log(Ls)
    slope, intercept = np.polyfit(xs, ys, 1)
    rng = np.random.default_rng(derive_seed(seed, "expfit-boot"))
    boots = []
    for _ in range(1000):
        yb = np.log([reps[p][rng.integers(0, replicates)] for p in ps])
        boots.append(np.polyfit(xs, yb, 1)[0])
    lo, hi = float(np.quantile(boots, 0.05)), float(np.quantile(boots, 0.95))
    records.append(ResultRecord("exponent", float(ps[-1]),
                                {"ps": list(ps), "eps": eps,
                                 "ci90_lo": lo, "ci90_hi": hi},
                                float(slope), float(np.std(boots, ddof=1)),
                                replicates * len(ps), seed))
    return ExponentFit(tuple(ps), Ls, float(slope), float(intercept), (lo, hi),
                       tuple(records))


def good_bond_fraction(p: float, N: int, eps: float, nu_hat: float,
                       samples: int, seed: int, lscale: float,
                       threads: int = 1) -> tuple[MCEstimate, ResultRecord]:
    """Renormalization diagnostic: fraction of horizontal length-N bonds
    whose endpoint surrounding clusters are joined inside the corridor
    Box(0, N; N/4) by a path of time at most (nu_hat + eps) * N / lscale.
    N is in site units and should be a multiple of the length unit lscale;
    the surrounding-cluster disks have radius lscale / 2."""
    from .clusters import outermost_surrounding_cluster
    if N < 2 * lscale:
        raise ValueError("N must be at least twice the length unit")
    threshold = (nu_hat + eps) * (N / lscale)
    corridor = SiteWindow.covering_box(-N / 4 - 2, N + N / 4 + 2,
                                       -N / 4 - 2, N / 4 + 2)

    def one(trial: int) -> float:
        c = sample(corridor, p, derive_seed(seed, "goodbond", trial))
        ca = outermost_surrounding_cluster(c, 0j, lscale / 2)
        cb = outermost_surrounding_cluster(c, complex(N, 0), lscale / 2)
        from .lattice import AxisBox
        box = AxisBox.corners(-N / 4, -N / 4, N + N / 4, N / 4)
        try:
            res = fpp.passage_time(c, list(ca.sites), list(cb.sites), constraint=box)
        except ValueError:
            return 0.0
        return 1.0 if (res.reached and res.time <= threshold) else 0.0

    t0 = time.time()
    vals = _run_trials(one, samples, threads)
    est = MCEstimate.from_samples(vals)
    rec = ResultRecord("good_bonds", p,
                       {"N": N, "eps": eps, "nu_hat": nu_hat, "lscale": lscale},
                       est.mean, est.stderr, est.n, seed, time.time() - t0)
    return est, rec


def estimate_strip_nu(p: float, h: float, m: int, n: int, samples: int,
                      seed: int, cluster_radius: float | None = None
                      ) -> tuple[MCEstimate, ResultRecord]:
    """Optional estimand: normalized strip passage time T_{m,n}(h)/(n-m)
    (no acceptance target; the convergence rate in h is unspecified)."""
    window = SiteWindow.covering_box(m - (n - m), n + (n - m), -h - 2, h + 2)

    def one(trial: int) -> float:
        c = sample(window, p, derive_seed(seed, "stripnu", trial))
        res = fpp.strip_passage(c, m, n, 0.0, h, cluster_radius=cluster_radius)
        if not res.reached:
            return float("nan")
        return res.time / (n - m)

    vals = _run_trials(one, samples)
    vals = vals[~np.isnan(vals)]
    if vals.size == 0:
        raise RuntimeError("no strip passage reached; enlarge h or the window")
    est = MCEstimate.from_samples(vals)
    rec = ResultRecord("strip_nu", p, {"h": h, "m": m, "n": n},
                       est.mean, est.stderr, est.n, seed)
    return est, rec
