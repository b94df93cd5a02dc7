"""Table builders behind the command-line modes.

Every builder returns a ``CsvTable``. Grid sweeps may fan out over a
process pool; rows are always emitted in grid order (lambda-major), so the
output does not depend on the worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import alpha as alpha_mod
from .bethe import (BetheState, bethe_states, first_excited_delta_squared, first_excited_energy,
                    ground_delta_squared, ground_energy)
from .core import ComplexPolynomial, ModelParams, ONE
from .errors import InvalidParameters, TruncationUnstable
from .fock import DEFAULT_LADDER, HamiltonianParams, build_hamiltonian, converged_level_match, spectrum
from .ode import ode_coefficients, operator_residual
from .tables import CsvTable, split_complex
from .verify import CheckResult, run_checks

ORACLE_MATCHED, ORACLE_UNMATCHED, ORACLE_UNSTABLE, ORACLE_SKIPPED = 1, 0, -1, -2


@dataclass(frozen=True)
class GridRange:
    """Inclusive linear grid; a single value gives a degenerate (fixed) grid."""

    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.steps == 1:
            if self.lo != self.hi:
                raise InvalidParameters("a one-point grid needs lo == hi")
        elif self.steps < 2 or not self.lo < self.hi:
            raise InvalidParameters(f"need steps >= 2 and lo < hi, got {self}")

    @classmethod
    def parse(cls, text: str) -> "GridRange":
        parts = text.split(":")
        try:
            if len(parts) == 1:
                v = float(parts[0])
                return cls(v, v, 1)
            if len(parts) == 3:
                return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise InvalidParameters(f"bad range {text!r}: {exc}") from None
        raise InvalidParameters(f"range must be 'lo:hi:steps' or a single value, got {text!r}")

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass
class SweepSpec:
    """Complete description of one command-line run."""

    mode: str
    n: int = 0
    omega: float = 1.0
    lam: float | None = None
    epsilon: float = 0.0
    delta: float | None = None
    branch: int | str = "auto"
    lambda_range: GridRange | None = None
    epsilon_range: GridRange | None = None
    tolerances: dict = field(default_factory=lambda: {"residual": 1e-9, "oracle": 1e-6})
    seeds: int = 64
    truncation: tuple = DEFAULT_LADDER
    workers: int = 1
    output: str | None = None
    only: tuple | None = None
    fault: tuple | None = None
    energy: float | None = None
    levels: int = 10

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameters(f"unknown mode {self.mode!r}")
        if self.n < 0 or self.seeds < 1 or self.workers < 1:
            raise InvalidParameters("n must be >= 0, seeds and workers >= 1")
        if self.mode in ("solve", "oracle") and self.lam is None:
            raise InvalidParameters(f"{self.mode} needs a coupling lambda")


MODES = ("alpha-scan", "solve", "sweep", "verify", "oracle")


def run_spec(spec: SweepSpec) -> tuple[bool, CsvTable]:
    """Build the table for ``spec``; the flag is False only for failed checks."""
    tol = spec.tolerances
    if spec.mode == "alpha-scan":
        return True, alpha_scan_table(spec.lambda_range.values())
    if spec.mode == "solve":
        return True, solve_table(spec.n, spec.omega, spec.lam, spec.epsilon, spec.branch, spec.delta,
                                 spec.seeds, tol["residual"], tol["oracle"], spec.truncation)
    if spec.mode == "sweep":
        return True, sweep_table(spec.n, spec.lambda_range.values(), spec.epsilon_range.values(),
                                 spec.omega, spec.delta, spec.branch, spec.seeds, tol["residual"],
                                 spec.workers)
    if spec.mode == "verify":
        results = run_checks(spec.only, spec.fault)
        return all(r.passed for r in results), verify_table(results)
    params = HamiltonianParams(spec.delta, spec.epsilon, spec.omega, spec.lam)
    return True, oracle_table(params, spec.energy, spec.levels, tol["oracle"], spec.truncation)


# ---------------------------------------------------------------------------
# alpha-scan

def alpha_scan_table(ratios: Sequence[float]) -> CsvTable:
    ratios = np.asarray(ratios, dtype=float)
    if np.any(ratios == 0) or (ratios.min() < 0 < ratios.max()):
        raise InvalidParameters("coupling-ratio grid must not contain or straddle 0")
    header = (["Lambda"]
              + [f"{p}_alpha{i}" for i in range(1, 5) for p in ("re", "im")]
              + [f"admissible{i}" for i in range(1, 5)]
              + [f"residual{i}" for i in range(1, 5)]
              + ["branch_point"])
    table = CsvTable(header)
    values, fallback = alpha_mod.track_branches(ratios)
    for L, row, fb in zip(ratios, values, fallback):
        rec = {"Lambda": float(L), "branch_point": int(fb)}
        for i, a in enumerate(row, start=1):
            rec.update(split_complex(f"alpha{i}", a))
            rec[f"admissible{i}"] = int(alpha_mod.admissible(a))
            # -1 marks rows whose values come from the companion fallback
            rec[f"residual{i}"] = -1.0 if fb else alpha_mod.quartic_residual(a, L)
        table.add(rec)
    return table


# ---------------------------------------------------------------------------
# solve

def oracle_code(params: ModelParams, energy: float, tol: float, ladder=DEFAULT_LADDER) -> int:
    if not abs(params.ratio) < 0.5:
        return ORACLE_SKIPPED
    try:
        return ORACLE_MATCHED if converged_level_match(params, energy, tol, ladder).matched \
            else ORACLE_UNMATCHED
    except TruncationUnstable:
        return ORACLE_UNSTABLE


def _state_verified(s: BetheState, tol: float) -> bool:
    ok = s.bae_residual < tol and s.sum_constraint_residual < tol and s.operator_residual < tol
    if s.n >= 2:
        ok = ok and s.verified
    return ok


def solve_table(n: int, omega: float, lam: float, epsilon: float, branch="auto",
                delta: float | None = None, seeds: int = 64, tol_residual: float = 1e-9,
                tol_oracle: float = 1e-6, ladder=DEFAULT_LADDER) -> CsvTable:
    """Every Bethe root set at one parameter point, with residuals and verdicts.

    The oracle column is 1 (matched), 0 (unmatched), -1 (truncation
    unstable) or -2 (not run: unverified, unphysical or |lambda/omega| >= 0.5).
    It always uses Delta from the required Delta^2.
    """
    ModelParams(delta=0.0, epsilon=epsilon, omega=omega, lam=lam)
    if n < 0:
        raise InvalidParameters("n must be nonnegative")
    br = alpha_mod.select_branch(lam / omega, branch)
    header = (["n", "branch"] + ["re_alpha", "im_alpha", "admissible", "re_E", "im_E"]
              + [f"{p}_z{i}" for i in range(1, n + 1) for p in ("re", "im")]
              + ["re_delta_sq", "im_delta_sq", "abs_p3", "abs_sum_z", "bae_residual",
                 "sum_constraint_residual", "operator_residual", "nullspace_distance",
                 "verified", "physical", "delta_match", "oracle"])
    table = CsvTable(header)
    for s in bethe_states(n, br, omega, lam, epsilon, seeds=seeds):
        verified = _state_verified(s, tol_residual)
        rec = {"n": n, "branch": br.index, "admissible": int(br.admissible)}
        rec.update(split_complex("alpha", br.value))
        rec.update(split_complex("E", s.energy))
        for i, z in enumerate(s.roots, start=1):
            rec.update(split_complex(f"z{i}", z))
        rec.update(split_complex("delta_sq", s.delta_sq_required))
        rec.update(abs_p3=abs(s.p3), abs_sum_z=abs(complex(sum(s.roots))),
                   bae_residual=s.bae_residual, sum_constraint_residual=s.sum_constraint_residual,
                   operator_residual=s.operator_residual, nullspace_distance=s.nullspace_distance,
                   verified=int(verified), physical=int(s.physical))
        if delta is None:
            rec["delta_match"] = -1
        else:
            rec["delta_match"] = int(s.physical and abs(s.delta_sq_required.real - delta**2)
                                     <= tol_oracle * max(1.0, delta**2))
        code = ORACLE_SKIPPED
        if verified and s.physical and br.admissible:
            p = ModelParams(delta=s.delta, epsilon=epsilon, omega=omega, lam=lam)
            code = oracle_code(p, s.energy.real, tol_oracle, ladder)
        rec["oracle"] = code
        table.add(rec)
    return table


# ---------------------------------------------------------------------------
# sweep

SWEEP_HEADER = ["lambda", "epsilon", "solution", "branch", "admissible", "re_alpha", "im_alpha",
                "re_E", "im_E", "re_delta_sq_required", "im_delta_sq_required", "real_state",
                "curve_gap", "physical", "bae_residual", "sum_constraint_residual",
                "operator_residual"]


def _closed_form_point(n: int, br: alpha_mod.AlphaBranch, omega: float, lam: float,
                       eps: float) -> dict:
    p0 = ModelParams(delta=0.0, epsilon=eps, omega=omega, lam=lam)
    if n == 0:
        E = ground_energy(br.value, p0)
        d2 = ground_delta_squared(br.value, p0, E)
        phi = ONE
    else:
        E = first_excited_energy(br.value, p0)
        d2 = first_excited_delta_squared(br.value, p0, E, 0.0)
        phi = ComplexPolynomial([0.0, 1.0])
    c = ode_coefficients(p0, br.value, E, delta_sq=d2)
    return {"solution": 0, "E": E, "d2": d2, "bae": 0.0, "sum": 0.0,
            "op": operator_residual(c, phi)}


def _sweep_point(task) -> list[dict]:
    n, omega, lam, eps, branch, seeds, tol = task
    br = alpha_mod.select_branch(lam / omega, branch)
    if n in (0, 1):
        sols = [_closed_form_point(n, br, omega, lam, eps)]
    else:
        states = [s for s in bethe_states(n, br, omega, lam, eps, seeds=seeds, cross_check=False)
                  if _state_verified(s, tol)]
        states.sort(key=lambda s: (round(s.delta_sq_required.real, 9), round(s.delta_sq_required.imag, 9)))
        sols = [{"solution": k, "E": s.energy, "d2": s.delta_sq_required, "bae": s.bae_residual,
                 "sum": s.sum_constraint_residual, "op": s.operator_residual}
                for k, s in enumerate(states)]
        if not sols:
            sols = [{"solution": -1, "E": complex(math.nan, math.nan), "d2": complex(math.nan, math.nan),
                     "bae": math.nan, "sum": math.nan, "op": math.nan}]
    rows = []
    for s in sols:
        E, d2 = complex(s["E"]), complex(s["d2"])
        real = bool(br.admissible and abs(E.imag) < 1e-8 and abs(d2.imag) < 1e-8 and d2.real >= 0)
        rows.append({"lambda": lam, "epsilon": eps, "solution": s["solution"], "branch": br.index,
                     "admissible": int(br.admissible), **split_complex("alpha", br.value),
                     **split_complex("E", E), **split_complex("delta_sq_required", d2),
                     "real_state": int(real), "bae_residual": s["bae"],
                     "sum_constraint_residual": s["sum"], "operator_residual": s["op"]})
    return rows


def mark_curve(gap: np.ndarray) -> np.ndarray:
    """Grid points next to a sign change of ``gap`` (NaN = unavailable).

    For each pair of grid neighbours with opposite signs, the point with the
    smaller |gap| is marked, tracing the zero level set on the grid.
    """
    mark = gap == 0
    for axis in (0, 1):
        a = np.moveaxis(gap, axis, 0)
        m = np.moveaxis(mark, axis, 0)
        lo, hi = a[:-1], a[1:]
        cross = np.isfinite(lo) & np.isfinite(hi) & (np.sign(lo) * np.sign(hi) < 0)
        pick_lo = cross & (np.abs(lo) <= np.abs(hi))
        pick_hi = cross & ~pick_lo
        m[:-1] |= pick_lo
        m[1:] |= pick_hi
    return mark


def sweep_table(n: int, lambdas: Sequence[float], epsilons: Sequence[float], omega: float = 1.0,
                delta: float = 1.0, branch="auto", seeds: int = 64, tol_residual: float = 1e-9,
                workers: int = 1) -> CsvTable:
    """Energies and required Delta^2 over a (lambda, epsilon) grid.

    ``real_state`` flags admissible points with real E and real Delta^2 >= 0.
    ``curve_gap`` is Re(Delta^2 required) - delta^2 there, and ``physical``
    marks grid points on the curve where the requirement meets the given
    delta. For n = 0 and 1 the closed forms are used (z1 = 0 for n = 1).
    """
    lambdas = [float(x) for x in lambdas]
    epsilons = [float(x) for x in epsilons]
    for lam in lambdas:
        ModelParams(delta=0.0, epsilon=0.0, omega=omega, lam=lam)
    tasks = [(n, omega, lam, eps, branch, seeds, tol_residual) for lam in lambdas for eps in epsilons]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_sweep_point(t) for t in tasks]
    shape = (len(lambdas), len(epsilons))
    solutions = sorted({r["solution"] for rows in results for r in rows if r["solution"] >= 0})
    on_curve: dict[tuple, bool] = {}
    for sol in solutions:
        gap = np.full(shape, np.nan)
        for k, rows in enumerate(results):
            for r in rows:
                if r["solution"] == sol and r["real_state"]:
                    gap[np.unravel_index(k, shape)] = r["re_delta_sq_required"] - delta**2
        for idx in zip(*np.nonzero(mark_curve(gap))):
            on_curve[(int(np.ravel_multi_index(idx, shape)), sol)] = True
    table = CsvTable(SWEEP_HEADER)
    for k, rows in enumerate(results):
        for r in rows:
            r["curve_gap"] = r["re_delta_sq_required"] - delta**2 if r["real_state"] else math.nan
            r["physical"] = int(on_curve.get((k, r["solution"]), False))
            table.add(r)
    return table


# ---------------------------------------------------------------------------
# oracle and verify

def oracle_table(params: HamiltonianParams, energy: float | None = None, levels: int = 10,
                 tol: float = 1e-6, ladder=DEFAULT_LADDER) -> CsvTable:
    """Lowest eigenvalues per truncation, or a match verdict for one energy."""
    if energy is not None:
        table = CsvTable(["energy", "matched", "nearest", "truncation", "oracle"])
        try:
            m = converged_level_match(params, energy, tol, ladder)
            table.add({"energy": energy, "matched": int(m.matched), "nearest": m.nearest,
                       "truncation": m.truncation,
                       "oracle": ORACLE_MATCHED if m.matched else ORACLE_UNMATCHED})
        except TruncationUnstable:
            table.add({"energy": energy, "matched": 0, "nearest": math.nan,
                       "truncation": max(ladder), "oracle": ORACLE_UNSTABLE})
        return table
    table = CsvTable(["truncation", "level", "eigenvalue"])
    for N in sorted(ladder):
        vals = spectrum(build_hamiltonian(params, N))
        for k, v in enumerate(vals[:levels]):
            table.add({"truncation": N, "level": k, "eigenvalue": float(v)})
    return table


def verify_table(results: Sequence[CheckResult]) -> CsvTable:
    table = CsvTable(["check", "name", "measured", "threshold", "passed"])
    for r in results:
        table.add({"check": r.group, "name": r.name, "measured": r.measured,
                   "threshold": r.threshold, "passed": int(r.passed)})
    return table
