"""Compare the closed-form n = 0 and n = 1 energies with the Fock spectrum.

For sampled points where the closed forms give a real Delta^2 >= 0, the
Hamiltonian is diagonalized with that Delta and the distance from the
closed-form energy to the nearest converged eigenvalue is printed. As a
control, the squeezed-vacuum ground energy eps + (sqrt(w^2 - 4 lam^2) - w)/2
of the Delta = 0 Hamiltonian is checked the same way.
"""
import argparse
import math

import numpy as np

from twophoton_rabi.fock import HamiltonianParams, build_hamiltonian, converged_level_match, spectrum
from twophoton_rabi.verify import sample_exact_points


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, default=1e-6)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    for n in (0, 1):
        print(f"n={n}: lambda, epsilon, Delta, E_closed, nearest level, gap, matched")
        for pt in sample_exact_points(n, args.count, rng):
            p = pt.params
            m = converged_level_match(p, pt.energy.real, args.tol)
            print(f"  {p.lam:.4f} {p.epsilon:+.4f} {p.delta:.4f} {pt.energy.real:+.8f} "
                  f"{m.nearest:+.8f} {abs(m.nearest - pt.energy.real):.2e} {int(m.matched)}")
    print("control, Delta = 0: lambda, epsilon, squeezed-vacuum E, nearest level, gap")
    for _ in range(args.count):
        lam, eps = rng.uniform(0.05, 0.45), rng.uniform(-1, 1)
        E = eps + (math.sqrt(1 - 4 * lam**2) - 1) / 2
        p = HamiltonianParams(delta=0.0, epsilon=eps, omega=1.0, lam=lam)
        vals = spectrum(build_hamiltonian(p, 160))
        near = vals[np.argmin(np.abs(vals - E))]
        print(f"  {lam:.4f} {eps:+.4f} {E:+.10f} {near:+.10f} {abs(near - E):.1e}")


if __name__ == "__main__":
    main()
