"""Command-line interface: simulate, functionals, cointegrate, estimate-sigma1,
spectrum, mc, tables. Exit 0 on success, 2 on configuration/usage error,
1 on runtime failure."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .fgn import simulate_panel
from .sphere import build_grid
from .functionals import sigma1_true, chaos_series
from .coint import gamma1, gamma1_tilde, coint_basis
from .spectral import periodogram, conjecture_probe, u_star
from .harness import (ConfigError, ExperimentConfig, load_config, run_mc,
                      write_outputs, tables_text, _rep_compute, _fmt)


def _build_config(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    if getattr(args, "out", None) is not None:
        overrides["out_dir"] = args.out
    if getattr(args, "replications", None) is not None:
        overrides["B"] = args.replications
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _add_common(sub):
    sub.add_argument("--config", help="path to a config file (docs/config.md)")
    sub.add_argument("--seed", type=int, help="override master seed")
    sub.add_argument("--workers", type=int, help="override worker count")
    sub.add_argument("--out", help="override output directory")
    sub.add_argument("--replications", type=int, help="override replication count B")


def cmd_simulate(args):
    cfg = _build_config(args)
    spec = cfg.spec()
    panel = simulate_panel(spec, cfg.T, cfg.master_seed, replication=0)
    os.makedirs(cfg.out_dir, exist_ok=True)
    out = os.path.join(cfg.out_dir, "panel.npz")
    np.savez(out, values=panel.values, d=spec.d, c0=spec.c0,
             band_limit=spec.band_limit, T=cfg.T, master_seed=cfg.master_seed)
    print(f"wrote {out} ({spec.n_coeffs} series of length {cfg.T})")
    return 0


def cmd_functionals(args):
    cfg = dataclasses.replace(_build_config(args), B=1)
    summary = run_mc(cfg)
    files = write_outputs(summary, cfg.out_dir)
    print("wrote " + ", ".join(files))
    return 0


def cmd_cointegrate(args):
    cfg = _build_config(args)
    cfg.spec()
    levels = [float(u) for u in cfg.levels]
    report = {}
    g1 = gamma1(levels)
    b1 = coint_basis(g1, case_label="area_first_chaos", levels=levels)
    report["gamma1"] = {
        "levels": levels,
        "matrix": g1.tolist(),
        "basis": b1.basis.tolist(),
        "rank": b1.rank,
        "annihilation_error": b1.annihilation_error(),
    }
    if all(u != 0 for u in levels):
        gt = gamma1_tilde(levels)
        bt = coint_basis(gt, case_label="area_second_chaos", levels=levels)
        report["gamma1_tilde"] = {
            "levels": levels,
            "matrix": gt.tolist(),
            "basis": bt.basis.tolist(),
            "rank": bt.rank,
            "annihilation_error": bt.annihilation_error(),
        }
    os.makedirs(cfg.out_dir, exist_ok=True)
    out = os.path.join(cfg.out_dir, "cointegration.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out}")
    return 0


def cmd_estimate_sigma1(args):
    cfg = _build_config(args)
    overrides = {"functionals": tuple(set(cfg.functionals) | {"area", "length"}),
                 "sigma1_case": args.case}
    if args.u is not None:
        overrides["sigma1_level"] = args.u
    if args.ell_star is not None:
        overrides["sigma1_ell_star"] = args.ell_star
    cfg = dataclasses.replace(cfg, **overrides)
    spec = cfg.spec()
    truth = sigma1_true(spec)
    if args.case == "b":
        pilot = args.pilot_sigma1 if args.pilot_sigma1 is not None else truth
        level = u_star(pilot, cfg.sigma1_ell_star)
        cfg = dataclasses.replace(cfg, sigma1_level=level)
    grid = build_grid(cfg.n_theta)
    naive_vals, nbls_vals = [], []
    for rep in range(cfg.B):
        res = _rep_compute(spec, grid, cfg, rep)
        naive_vals.append(res["sigma1"]["naive"])
        nbls_vals.append(res["sigma1"]["nbls"])
    rows = []
    for method, vals in (("naive", naive_vals), (f"nbls_case_{args.case}", nbls_vals)):
        est = float(np.median(vals))
        rows.append((method, est, truth, abs(est - truth) / truth))
    os.makedirs(cfg.out_dir, exist_ok=True)
    out = os.path.join(cfg.out_dir, "sigma1.csv")
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("method,estimate,truth,rel_error\n")
        for method, est, tr, rel in rows:
            fh.write(f"{method},{_fmt(est)},{_fmt(tr)},{_fmt(rel)}\n")
    for method, est, tr, rel in rows:
        print(f"{method}: {est:.5f} (truth {tr:.5f}, rel. error {rel:.2%})")
    print(f"wrote {out}")
    return 0


def cmd_spectrum(args):
    cfg = _build_config(args)
    spec = cfg.spec()
    q = args.q
    panel = simulate_panel(spec, cfg.T, cfg.master_seed, replication=0)
    series = chaos_series(panel, q).values
    I = periodogram(series)
    os.makedirs(cfg.out_dir, exist_ok=True)
    out = os.path.join(cfg.out_dir, "spectrum.csv")
    m_max = cfg.T // 2
    f_hat_cum = (2.0 * np.pi / cfg.T) * np.cumsum(I[1:m_max + 1])
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("j,lambda,periodogram,f_hat\n")
        for j in range(1, m_max + 1):
            lam = 2.0 * np.pi * j / cfg.T
            fh.write(f"{j},{_fmt(lam)},{_fmt(I[j])},{_fmt(f_hat_cum[j - 1])}\n")
    print(f"wrote {out}")
    if args.probe_B:
        m = max(1, min(int(cfg.T ** cfg.bandwidth_exponent), cfg.T // 2))
        summary = conjecture_probe(spec, q, cfg.T, m, args.probe_B,
                                   master_seed=cfg.master_seed)
        probe_path = os.path.join(cfg.out_dir, "probe.json")
        with open(probe_path, "w", encoding="utf-8") as fh:
            json.dump({"q": summary.q, "T": summary.T, "m": summary.m,
                       "B": summary.B, "median_ratio": summary.median,
                       "q25": summary.q25, "q75": summary.q75},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"probe q={q}: median ratio {summary.median:.4f} "
              f"IQR [{summary.q25:.4f}, {summary.q75:.4f}]")
        print(f"wrote {probe_path}")
    return 0


def cmd_mc(args):
    cfg = _build_config(args)
    summary = run_mc(cfg)
    files = write_outputs(summary, cfg.out_dir)
    print("wrote " + ", ".join(files))
    print(tables_text(files[0]), end="")
    return 0


def cmd_tables(args):
    fits = args.fits
    if fits is None:
        cfg = _build_config(args)
        fits = os.path.join(cfg.out_dir, "fits.csv")
    print(tables_text(fits), end="")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sphcoint",
        description="Long-memory fields on the sphere: simulation, excursion "
                    "functionals, cointegration, and gradient-scale estimation.")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("simulate", help="simulate a coefficient panel to panel.npz")
    _add_common(sub)
    sub.set_defaults(func=cmd_simulate)

    sub = subs.add_parser("functionals", help="single-replication functional series "
                                              "(paths.csv, excursion.csv)")
    _add_common(sub)
    sub.set_defaults(func=cmd_functionals)

    sub = subs.add_parser("cointegrate", help="cointegrating matrices and bases "
                                              "(cointegration.json)")
    _add_common(sub)
    sub.set_defaults(func=cmd_cointegrate)

    sub = subs.add_parser("estimate-sigma1", help="naive and narrow-band gradient-scale "
                                                  "estimates (sigma1.csv)")
    _add_common(sub)
    sub.add_argument("--case", choices=("a", "b"), default="a")
    sub.add_argument("--u", type=float, help="level for case a (default from config)")
    sub.add_argument("--ell-star", type=int, dest="ell_star",
                     help="leading multipole for case b")
    sub.add_argument("--pilot-sigma1", type=float, dest="pilot_sigma1",
                     help="pilot gradient scale for the case-b level "
                          "(default: true value from the config spec)")
    sub.set_defaults(func=cmd_estimate_sigma1)

    sub = subs.add_parser("spectrum", help="periodogram and averaged periodogram of a "
                                           "chaos projection (spectrum.csv)")
    _add_common(sub)
    sub.add_argument("--q", type=int, default=1, help="chaos order (default 1)")
    sub.add_argument("--probe-B", type=int, default=0, dest="probe_B",
                     help="run the averaged-periodogram ratio probe with this "
                          "many replications")
    sub.set_defaults(func=cmd_spectrum)

    sub = subs.add_parser("mc", help="full Monte Carlo pipeline (all CSV outputs)")
    _add_common(sub)
    sub.set_defaults(func=cmd_mc)

    sub = subs.add_parser("tables", help="render fits.csv as an aligned text table")
    _add_common(sub)
    sub.add_argument("--fits", help="path to fits.csv (default: <out>/fits.csv)")
    sub.set_defaults(func=cmd_tables)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
