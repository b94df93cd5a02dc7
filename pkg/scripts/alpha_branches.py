"""Gauge-exponent branches over the coupling ratio (data behind the branch plot).

Writes one CSV and prints the admissible sub-intervals of each branch.
"""
import argparse
from itertools import groupby
from pathlib import Path

import numpy as np

from twophoton_rabi.alpha import collision_ratios
from twophoton_rabi.sweep import alpha_scan_table


def intervals(ratios, mask):
    """Maximal runs of consecutive grid points where mask is set."""
    out = []
    for flag, run in groupby(zip(ratios, mask), key=lambda item: bool(item[1])):
        if flag:
            run = list(run)
            out.append((run[0][0], run[-1][0]))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=0.01)
    ap.add_argument("--hi", type=float, default=1.5)
    ap.add_argument("--steps", type=int, default=600)
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    ratios = np.linspace(args.lo, args.hi, args.steps)
    table = alpha_scan_table(ratios)
    path = args.outdir / "alpha_branches.csv"
    table.write(path)
    print(f"wrote {path} ({len(table.rows)} rows)")
    print("root collisions at Lambda =", ", ".join(f"{x:.5f}" for x in collision_ratios()))
    for i in range(1, 5):
        spans = intervals(ratios, table.column(f"admissible{i}"))
        text = ", ".join(f"[{a:.3f}, {b:.3f}]" for a, b in spans) or "none"
        print(f"alpha{i}: admissible on {text}")


if __name__ == "__main__":
    main()
