#!/usr/bin/env python3
"""Total-J distributions of |Jz=L>|Jx=L> for L = 1/2 .. 25, plus the peak per L."""
import argparse
import csv
from pathlib import Path

import numpy as np

from qrframes.optimize import pythagoras_distribution


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lmax", type=float, default=25)
    ap.add_argument("--out", default="runs/pythagoras")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "distributions.csv", "w", newline="") as fa, open(out / "peaks.csv", "w", newline="") as fb:
        dist, peaks = csv.writer(fa, lineterminator="\n"), csv.writer(fb, lineterminator="\n")
        dist.writerow(["L", "J", "J_over_L", "p"])
        peaks.writerow(["L", "J_peak", "J_over_L", "sqrt2_L"])
        for two_l in range(1, int(2 * args.lmax) + 1):
            L = two_l / 2
            rows = pythagoras_distribution(L)
            for J, r, p in rows:
                dist.writerow([f"{L:g}", f"{J:g}", f"{r:.12g}", f"{p:.12g}"])
            J, r, _ = max(rows, key=lambda x: x[2])
            peaks.writerow([f"{L:g}", f"{J:g}", f"{r:.12g}", f"{np.sqrt(2) * L:.12g}"])
    print(f"wrote {out}/distributions.csv and {out}/peaks.csv")


if __name__ == "__main__":
    main()
