"""Energy surfaces and allowed-parameter curves for n = 0 and n = 1.

For each captioned splitting (Delta = 1, 1/3, 1/4 with omega = 1) this runs
a (lambda, epsilon) sweep and fixed-lambda slices, and reports how many
grid points lie on the curve where the required Delta^2 meets Delta^2.
"""
import argparse
from pathlib import Path

import numpy as np

from twophoton_rabi.sweep import sweep_table

DELTAS = {"1": 1.0, "1_3": 1 / 3, "1_4": 1 / 4}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda-max", type=float, default=0.78,
                    help="stay below the second root collision at 0.7878")
    ap.add_argument("--lambda-steps", type=int, default=80)
    ap.add_argument("--epsilon-steps", type=int, default=81)
    ap.add_argument("--slices", type=float, nargs="*", default=[0.2, 0.4, 0.75])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    lams = np.linspace(0.05, args.lambda_max, args.lambda_steps)
    eps = np.linspace(-1.0, 1.0, args.epsilon_steps)
    for n in (0, 1):
        for tag, delta in DELTAS.items():
            table = sweep_table(n, lams, eps, omega=1.0, delta=delta, workers=args.workers)
            path = args.outdir / f"sweep_n{n}_delta{tag}.csv"
            table.write(path)
            on = [r for r in table.records() if r["physical"]]
            span = (f"lambda in [{min(r['lambda'] for r in on):.3f}, {max(r['lambda'] for r in on):.3f}]"
                    if on else "empty")
            print(f"n={n} Delta={delta:.4f}: {len(on)} curve points, {span} -> {path}")
            for lam in args.slices:
                sl = sweep_table(n, [lam], eps, omega=1.0, delta=delta)
                sl.write(args.outdir / f"slice_n{n}_delta{tag}_lambda{lam:g}.csv")


if __name__ == "__main__":
    main()
