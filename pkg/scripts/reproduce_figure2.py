#!/usr/bin/env python3
"""Regret of monotone vs PFS against the best constant false valuation.

Runs the four panel configs in configs/ and writes one CSV and one SVG per
panel, then prints the summary numbers used by the acceptance gate.
"""
import argparse
from pathlib import Path

import numpy as np

from pplab.harness import emit_csv, emit_plot, load_config, run_sweep

PANELS = ("fig2_g085_v075", "fig2_g095_v075", "fig2_g075_v025", "fig2_g080_v025")


def summarize(rows):
    by = {}
    for r in rows:
        by.setdefault(r.seller, []).append((r.T, r.regret))
    mono = np.array(sorted(by["monotone"]))
    pfs = np.array(sorted(by["pfs"]))
    ratio = mono[-1, 1] / pfs[-1, 1]
    corr = np.corrcoef(np.log(pfs[:, 0]), pfs[:, 1])[0, 1]
    slope = np.polyfit(np.log(mono[:, 0]), np.log(mono[:, 1]), 1)[0]
    return ratio, corr, slope


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default="configs")
    ap.add_argument("--out", default="out")
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--axes", choices=("log-log", "linear"), default="log-log")
    args = ap.parse_args()

    out = Path(args.out)
    print(f"{'panel':<16} {'mono/pfs @Tmax':>15} {'corr(pfs, lnT)':>15} {'mono exponent':>14}")
    for name in PANELS:
        cfg = load_config(Path(args.configs) / f"{name}.json").override(workers=args.workers)
        rows = run_sweep(cfg)
        emit_csv(rows, out / f"{name}.csv")
        emit_plot(rows, out / f"{name}.svg", args.axes, series=["monotone", "pfs"])
        ratio, corr, slope = summarize(rows)
        print(f"{name:<16} {ratio:>15.3f} {corr:>15.3f} {slope:>14.3f}")


if __name__ == "__main__":
    main()
