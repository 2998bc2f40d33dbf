"""Command-line front end.

Subcommands configure and run experiments, print a one-line human summary
per estimand on stdout, and write records to CSV or JSON files.  Exit codes:
0 success, 1 usage error, 2 budget/window/capacity error, 3 invariant
failure (a verification subcommand found a mismatch).
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys

import numpy as np

from . import duality, fpp, montecarlo as mc, scaling
from .arms import ArmEventSpec, estimate_arm_probability
from .config import CapacityError, derive_seed, dump_config, sample
from .fpp import WindowError
from .lattice import SiteWindow, quad_from_index_box
from .montecarlo import ResultRecord, write_csv, write_json

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_INVARIANT = 3


def _emit(records: list[ResultRecord], out: str | None, fmt: str) -> None:
    for r in records:
        print(f"{r.estimand} p={r.p:g} {r.param_json()} "
              f"mean={r.mean:.6g} stderr={r.stderr:.3g} n={r.n_samples}")
    if out:
        if fmt == "csv":
            write_csv(records, out)
        else:
            write_json(records, out)
        print(f"wrote {len(records)} records to {out}")


def _parse_p_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def cmd_sample(args) -> int:
    window = SiteWindow(args.x0, args.x1, args.y0, args.y1)
    c = sample(window, args.p, args.seed)
    dump_config(c, args.out)
    print(f"sampled {window.size} sites at p={args.p:g}, "
          f"blue fraction {c.blue_fraction:.4f}; wrote {args.out}")
    return EXIT_OK


def cmd_verify_duality(args) -> int:
    rng = np.random.default_rng(derive_seed(args.seed, "verify"))
    mismatches = 0
    checked = 0
    # quad identity
    for _ in range(args.samples):
        nx = int(rng.integers(4, 13))
        ny = int(rng.integers(4, 13))
        p = float(rng.choice([0.2, 0.35, 0.5, 0.65, 0.8]))
        w = SiteWindow(0, nx - 1, 0, ny - 1)
        c = sample(w, p, int(rng.integers(1 << 40)))
        q = quad_from_index_box(0, nx - 1, 0, ny - 1)
        if duality.quad_passage_time(c, q) != duality.max_disjoint_yellow_crossings(c, q):
            mismatches += 1
        checked += 1
    # circuit identity on a smaller budget
    from .clusters import label_clusters
    skipped = 0
    for _ in range(max(args.samples // 10, 20)):
        w = SiteWindow(0, 19, 0, 19)
        p = float(rng.choice([0.30, 0.40, 0.50]))
        c = sample(w, p, int(rng.integers(1 << 40)))
        lab = label_clusters(c, "blue")
        central = [ci for ci in lab.clusters
                   if 6 <= ci.bbox[0] and ci.bbox[1] <= 13
                   and 6 <= ci.bbox[2] and ci.bbox[3] <= 13]
        if len(central) < 2:
            skipped += 1
            continue
        ids = rng.choice(len(central), size=2, replace=False)
        A = lab.sites_of(central[int(ids[0])].cid)
        B = lab.sites_of(central[int(ids[1])].cid)
        out = duality.max_disjoint_separating_circuits(c, A, B)
        if out.indeterminate:
            skipped += 1
            continue
        res = fpp.passage_time(c, A, B)
        if (res.time if res.reached else None) != out.count:
            mismatches += 1
        checked += 1
    print(f"checked: {checked}  skipped: {skipped}")
    print(f"mismatches: {mismatches}")
    return EXIT_OK if mismatches == 0 else EXIT_INVARIANT


def cmd_estimate_mu(args) -> int:
    ladder = [int(t) for t in args.n.split(",")]
    records: list[ResultRecord] = []
    for p in _parse_p_list(args.p):
        est = mc.estimate_mu(p, args.theta, ladder, args.samples, args.seed,
                             threads=args.threads)
        records.extend(est.records)
    _emit(records, args.out, args.format)
    return EXIT_OK


def cmd_estimate_shape(args) -> int:
    records: list[ResultRecord] = []
    for p in _parse_p_list(args.p):
        if args.n is not None:
            n = int(args.n)
        else:
            L, _ = scaling.correlation_length_eps(p, args.eps, args.samples,
                                                  derive_seed(args.seed, "shape-L"))
            n = max(8, math.ceil(8 * L))
        est = mc.shape_anisotropy(p, args.directions, n, args.samples, args.seed,
                                  threads=args.threads)
        records.extend(est.records)
    _emit(records, args.out, args.format)
    return EXIT_OK


def cmd_corr_length(args) -> int:
    records: list[ResultRecord] = []
    for p in _parse_p_list(args.p):
        L, info = scaling.correlation_length_eps(p, args.eps, args.samples, args.seed)
        lo, hi = info["bracket"]
        records.append(ResultRecord("corr_length_eps", p, {"eps": args.eps},
                                    L, (hi - lo) / 2,
                                    args.samples * len(info["probes"]), args.seed))
        if args.pi4_table:
            table = scaling.load_pi4_table(args.pi4_table)
            LL = scaling.correlation_length_L(p, table)
            records.append(ResultRecord("corr_length_L", p,
                                        {"table": str(args.pi4_table)},
                                        LL, 0.0, sum(e.n for e in table.estimates),
                                        table.seed))
    _emit(records, args.out, args.format)
    return EXIT_OK


def cmd_arm_prob(args) -> int:
    spec = ArmEventSpec(0j, args.r, args.R, args.kind, args.k,
                        color=args.color,
                        half_plane=args.half_plane)
    records = []
    for p in _parse_p_list(args.p):
        est = estimate_arm_probability(spec, p, args.samples, args.seed)
        records.append(ResultRecord("arm_prob", p,
                                    {"r": args.r, "R": args.R, "kind": args.kind,
                                     "k": args.k, "color": args.color},
                                    est.mean, est.stderr, est.n, args.seed))
    _emit(records, args.out, args.format)
    return EXIT_OK


def cmd_pi4_table(args) -> int:
    radii = [float(t) for t in args.radii.split(",")]
    table = scaling.build_pi4_table(radii, args.samples, args.seed)
    scaling.save_pi4_table(table, args.out)
    bad = table.audit()
    for (R, f) in table.scaled():
        print(f"R={R:g}  R^2 pi4 = {f:.4g}")
    if bad:
        print(f"audit: R^2 pi4 non-increasing at indices {bad} (undersampled?)")
    print(f"wrote table to {args.out}")
    return EXIT_OK


def cmd_ccd(args) -> int:
    records: list[ResultRecord] = []
    ratios = []
    for p in _parse_p_list(args.p):
        res = mc.ccd_ratio(p, args.eps, args.seed, samples=args.samples,
                           threads=args.threads)
        ratios.append(res.ratio)
        records.extend(res.records)
    if len(ratios) > 1:
        print(f"ccd spread max/min = {max(ratios) / min(ratios):.3f}")
    _emit(records, args.out, args.format)
    return EXIT_OK


def cmd_fit_exponent(args) -> int:
    ps = _parse_p_list(args.p)
    fit = mc.fit_correlation_exponent(ps, args.eps, args.seed,
                                      probe_samples=args.samples)
    print(f"slope = {fit.slope:.4f}  ci90 = [{fit.ci[0]:.3f}, {fit.ci[1]:.3f}]"
          f"  (target 4/3)")
    _emit(list(fit.records), args.out, args.format)
    return EXIT_OK


def cmd_good_bonds(args) -> int:
    records = []
    for p in _parse_p_list(args.p):
        L, _ = scaling.correlation_length_eps(p, args.eps_L, args.samples // 2 + 50,
                                              derive_seed(args.seed, "gb-L"))
        n = max(8, math.ceil(8 * L))
        mu = mc.estimate_mu(p, 0.0, [n], args.samples, derive_seed(args.seed, "gb-mu"))
        nu_hat = L * mu.mu.mean
        N = max(8, math.ceil(8 * L))
        est, rec = mc.good_bond_fraction(p, N, args.eps * nu_hat, nu_hat,
                                         args.samples, args.seed, lscale=L,
                                         threads=args.threads)
        records.append(rec)
    _emit(records, args.out, args.format)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cp = configparser.ConfigParser()
    read = cp.read(args.config)
    if not read:
        raise UsageError(f"config file {args.config} not found")
    records: list[ResultRecord] = []
    for section in cp.sections():
        opts = dict(cp.items(section))
        params = {}
        if "r" in opts:
            params["r" if section == "arm_prob" else "R"] = float(opts["r"])
        if "bigr" in opts:
            params["R"] = float(opts["bigr"])
        for key in ("eps", "kind", "k", "color"):
            if key in opts:
                params[key] = opts[key]
        try:
            spec = mc.ExperimentSpec(
                estimand=section,
                ps=tuple(_parse_p_list(opts.get("p", "0.4"))),
                thetas=(float(opts.get("theta", 0.0)),),
                n_ladder=tuple(int(t) for t in opts.get("n", "").split(",") if t.strip()),
                samples=int(opts.get("samples", 100)),
                master_seed=int(opts.get("seed", args.seed)),
                params=params,
            )
            records.extend(mc.run_experiment(spec))
        except ValueError as e:
            raise UsageError(f"sweep section [{section}]: {e}")
    _emit(records, args.out, args.format)
    return EXIT_OK


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tfpp",
        description="Bernoulli first-passage percolation on the triangular lattice")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(sp, samples_default=200):
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--samples", type=int, default=samples_default)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("sample", help="dump one configuration to a binary file")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--x0", type=int, default=0)
    sp.add_argument("--x1", type=int, default=63)
    sp.add_argument("--y0", type=int, default=0)
    sp.add_argument("--y1", type=int, default=63)
    sp.add_argument("--out", type=str, required=True)
    sp.set_defaults(fn=cmd_sample)

    sp = sub.add_parser("verify-duality", help="run the min-path/max-separator suites")
    common(sp, samples_default=500)
    sp.set_defaults(fn=cmd_verify_duality)

    sp = sub.add_parser("estimate-mu", help="directional time constant")
    sp.add_argument("--p", type=str, required=True)
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--n", type=str, required=True, help="comma list of distances")
    common(sp)
    sp.set_defaults(fn=cmd_estimate_mu)

    sp = sub.add_parser("estimate-shape", help="limit-shape anisotropy")
    sp.add_argument("--p", type=str, required=True)
    sp.add_argument("--directions", type=int, default=6)
    sp.add_argument("--n", type=int, default=None,
                    help="override the 8*L_eps(p) distance rule")
    sp.add_argument("--eps", type=float, default=0.1)
    common(sp)
    sp.set_defaults(fn=cmd_estimate_shape)

    sp = sub.add_parser("corr-length", help="L_eps(p), optionally L(p) from a table")
    sp.add_argument("--p", type=str, required=True)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--pi4-table", type=str, default=None)
    common(sp)
    sp.set_defaults(fn=cmd_corr_length)

    sp = sub.add_parser("arm-prob", help="arm-event probability in an annulus")
    sp.add_argument("--p", type=str, required=True)
    sp.add_argument("--r", type=float, default=1.0)
    sp.add_argument("--R", dest="R", type=float, default=8.0)
    sp.add_argument("--kind", choices=("alternating", "monochromatic"),
                    default="alternating")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--color", choices=("blue", "yellow"), default=None)
    sp.add_argument("--half-plane", type=float, default=None)
    common(sp)
    sp.set_defaults(fn=cmd_arm_prob)

    sp = sub.add_parser("pi4-table", help="build the critical 4-arm table")
    sp.add_argument("--radii", type=str, default="2,3,4,6,8,11,16,23,32,45,64")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--out", type=str, required=True)
    sp.set_defaults(fn=cmd_pi4_table)

    sp = sub.add_parser("ccd", help="L_eps(p) * mu_hat(p) products")
    sp.add_argument("--p", type=str, required=True)
    sp.add_argument("--eps", type=float, default=0.1)
    common(sp, samples_default=500)
    sp.set_defaults(fn=cmd_ccd)

    sp = sub.add_parser("fit-exponent", help="log-log slope of L_eps vs 1/(pc-p)")
    sp.add_argument("--p", type=str, required=True)
    sp.add_argument("--eps", type=float, default=0.1)
    common(sp, samples_default=400)
    sp.set_defaults(fn=cmd_fit_exponent)

    sp = sub.add_parser("good-bonds", help="renormalized good-bond fraction")
    sp.add_argument("--p", type=str, required=True)
    sp.add_argument("--eps", type=float, default=0.3,
                    help="threshold slack as a fraction of nu-hat")
    sp.add_argument("--eps-L", type=float, default=0.1)
    common(sp)
    sp.set_defaults(fn=cmd_good_bonds)

    sp = sub.add_parser("sweep", help="run estimands from a key=value config file")
    sp.add_argument("--config", type=str, required=True)
    common(sp)
    sp.set_defaults(fn=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (UsageError, ValueError) as e:
        if isinstance(e, (WindowError, CapacityError, scaling.BudgetError, scaling.RangeError)):
            print(f"error: {e}", file=sys.stderr)
            return EXIT_BUDGET
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (scaling.BudgetError, CapacityError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except AssertionError as e:
        print(f"invariant failure: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
