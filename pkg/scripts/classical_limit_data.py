#!/usr/bin/env python3
"""Optimal inclination and preserved negativity versus frame spin L.

Writes the optimum per L and, for each L, the full negativity-versus-beta
curve (the data behind the inclination and preservation plots).
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from qrframes.optimize import SweepConfig, classical_limit_study, evaluate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lmax", type=float, default=8)
    ap.add_argument("--steps", type=int, default=181)
    ap.add_argument("--out", default="runs/classical")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    Ls = [k / 2 for k in range(1, int(2 * args.lmax) + 1)]
    base = SweepConfig(grid={"beta": (0.0, np.pi, args.steps)})
    with open(out / "optima.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["L", "beta_opt_deg", "n_max", "fraction"])
        for p in classical_limit_study(Ls, base):
            w.writerow([f"{p.L:g}", f"{np.degrees(p.beta_opt):.12g}", f"{p.n_max:.12g}", f"{p.fraction:.12g}"])
    betas = np.linspace(0, np.pi, args.steps)
    with open(out / "curves.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["L", "beta_deg", "fraction"])
        for L in Ls:
            vals = evaluate(SweepConfig(L=L, grid={}), {"beta": betas})
            for b, v in zip(betas, vals):
                w.writerow([f"{L:g}", f"{np.degrees(b):.12g}", f"{v:.12g}"])
    print(f"wrote {out}/optima.csv and {out}/curves.csv")


if __name__ == "__main__":
    main()
