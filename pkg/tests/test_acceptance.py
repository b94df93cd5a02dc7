"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints a single ``criterion N ... PASS|FAIL`` line to the
terminal (also under captured output), then asserts.
"""
import math

import numpy as np
import pytest

from twophoton_rabi import alpha as am
from twophoton_rabi.core import symmetric_sums
from twophoton_rabi.errors import TruncationUnstable
from twophoton_rabi.fock import HamiltonianParams, build_hamiltonian, converged_level_match, spectrum
from twophoton_rabi.sweep import alpha_scan_table, sweep_table
from twophoton_rabi.verify import (NORM_RADII, SOLVER_POINTS, collision_free_ratios, doubling_change,
                                   exact_point_residuals, gauge_reduction_error, sample_exact_points,
                                   separated_roots, solver_equivalence)


@pytest.fixture
def report(capsys):
    def emit(number, title, checks):
        """checks: list of (label, measured, threshold); passes iff measured < threshold."""
        ok = all(m < t for _, m, t in checks)
        detail = "; ".join(f"{label}={m:.3g} (< {t:g})" for label, m, t in checks)
        with capsys.disabled():
            print(f"\ncriterion {number} [{title}] {'PASS' if ok else 'FAIL'}: {detail}")
        return ok
    return emit


def test_criterion_01_quartic_branches(report):
    L = collision_free_ratios(200, 0.02, 1.5, 1e-3)
    haus = resid = vsum = vprod = 0.0
    for x in L:
        cf = [b.value for b in am.alpha_closed_form(x)]
        comp = am.alpha_companion(x)
        haus = max(haus, am.hausdorff(cf, comp))
        resid = max(resid, max(am.quartic_residual(a, x) for a in cf))
        vsum = max(vsum, abs(comp.sum()))
        vprod = max(vprod, abs(np.prod(comp) - 1 / 16))
    assert report(1, "quartic branch correctness", [
        ("Hausdorff", haus, 1e-8), ("quartic residual", resid, 1e-9),
        ("|sum alpha|", vsum, 1e-10), ("|prod alpha - 1/16|", vprod, 1e-10)])


def test_criterion_02_gauge_reduction(report):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        from twophoton_rabi.core import ModelParams
        p = ModelParams(delta=rng.uniform(0, 2), epsilon=rng.uniform(-1, 1),
                        omega=rng.uniform(0.5, 2), lam=rng.uniform(0.05, 1) * rng.choice([-1, 1]))
        worst = max(worst, gauge_reduction_error(p, rng.uniform(-3, 3)))
    assert report(2, "gauge-reduction identity", [("componentwise relative", worst, 1e-14)])


def test_criterion_03_symmetric_sums(report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for n in range(2, 11):
        for _ in range(50):
            s = np.array(symmetric_sums(separated_roots(rng, n)))
            worst = max(worst, float(np.abs(s - [0, n * (n - 1) / 2, 0]).max()))
    assert report(3, "symmetric-sum identities", [("max deviation", worst, 1e-10)])


def _exactness(n, tol_op, tol_pt, number, title, report):
    rng = np.random.default_rng(40 + n)
    pts = sample_exact_points(n, 50, rng)
    op = pt = 0.0
    for p in pts:
        a, b = exact_point_residuals(p, rng)
        op, pt = max(op, a), max(pt, b)
    assert report(number, title, [("operator residual", op, tol_op), ("point-wise residual", pt, tol_pt)])


def test_criterion_04_ground_state_exactness(report):
    _exactness(0, 1e-10, 1e-8, 4, "n=0 exactness", report)


def test_criterion_05_first_excited_exactness(report):
    _exactness(1, 1e-10, 1e-10, 5, "n=1 exactness, z1=0", report)


def test_criterion_06_physics_oracle(report):
    checks = []
    for n in (0, 1):
        rng = np.random.default_rng(60 + n)
        worst, matched = 0.0, 0
        for p in sample_exact_points(n, 10, rng):
            try:
                m = converged_level_match(p.params, p.energy.real, 1e-6, ladder=(40, 80, 160))
                gap = 0.0 if m.matched else abs(m.nearest - p.energy.real)
                matched += m.matched
            except TruncationUnstable:
                gap = math.inf
            worst = max(worst, gap)
        checks.append((f"n={n} worst |E - nearest Fock level| ({matched}/10 matched)", worst, 1e-6))
    assert report(6, "physics oracle", checks)


def test_criterion_07_solver_equivalence(report):
    rng = np.random.default_rng(7)
    points = list(SOLVER_POINTS) + [(rng.uniform(0.05, 0.45), rng.uniform(-1, 1)) for _ in range(2)]
    dist = bae = 0.0
    for n in range(1, 5):
        for lam, eps in points:
            d, b = solver_equivalence(n, 1.0, lam, eps)
            dist, bae = max(dist, d), max(bae, b)
    assert report(7, "solver equivalence n<=4", [("root-set distance", dist, 1e-8),
                                                 ("Bethe residual", bae, 1e-9)])


def test_criterion_08_uncoupled_oracle(report):
    worst = 0.0
    for delta, eps, omega in ((1.0, 0.3, 1.0), (0.4, -0.7, 1.3), (0.0, 0.5, 0.8), (2.0, 0.0, 1.0)):
        vals = spectrum(build_hamiltonian(HamiltonianParams(delta, eps, omega, 0.0), 40))
        s = math.hypot(delta, eps)
        exact = np.sort([m * omega + sign * s for m in range(41) for sign in (-1, 1)])
        worst = max(worst, float(np.abs(vals[:10] - exact[:10]).max()))
    assert report(8, "oracle sanity at lambda=0", [("lowest 10 levels", worst, 1e-10)])


def test_criterion_09_normalizability(report):
    vals = [am.normalizability_integral(0.45, radius=R) for R in NORM_RADII]
    growth = am.normalizability_integral(0.55, radius=10.0) / am.normalizability_integral(0.55, radius=6.0)
    ok = report(9, "normalizability boundary", [
        (f"|alpha|=0.45 doubling change R=12..48 (R=6->12 was {abs(vals[1] - vals[0]):.2g})",
         doubling_change(vals), 1e-6),
        ("|alpha|=0.55 I(6)/I(10)", 1 / growth, 0.1)])
    assert ok


def test_criterion_10_figure_data(report):
    L = np.linspace(0.005, 1.0, 400)
    table = alpha_scan_table(L)
    vals = np.array([[complex(r[f"re_alpha{i}"], r[f"im_alpha{i}"]) for i in range(1, 5)]
                     for r in table.records()])
    excess = 0.0
    for k in range(1, len(L)):
        for i in range(4):
            lip = max(abs(am.alpha_slope(vals[k, i], L[k])), abs(am.alpha_slope(vals[k - 1, i], L[k - 1])))
            excess = max(excess, abs(vals[k, i] - vals[k - 1, i]) / (10 * (L[k] - L[k - 1]) * lip))
    admissible2 = sum(r["admissible2"] for r in table.records())
    checks = [("continuity ratio", excess, 1.0), ("no admissible alpha2 rows", float(admissible2 == 0), 0.5)]
    lams, eps = np.linspace(0.05, 0.78, 60), np.linspace(-1, 1, 41)
    for n in (0, 1):
        for delta in (1.0, 1 / 3, 1 / 4):
            count = sum(sweep_table(n, lams, eps, omega=1.0, delta=delta).column("physical"))
            checks.append((f"n={n} delta={delta:.3g} physical rows={count}; empty", float(count == 0), 0.5))
    assert report(10, "figure-data reproduction", checks)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
