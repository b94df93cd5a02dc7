"""Polynomial (quasi-exact) solutions: energies, constraints and root finding.

A degree-n monic polynomial varphi solves the reduced equation when

* the energy makes q2 = -n p3,
* p3 * sum(z_i) = 0,
* q0 = -p3 sum(z_i^2) - n p1 - n(n-1) b2, which fixes Delta^2,

and the roots z_i satisfy the Bethe ansatz equations. Two root solvers are
provided and meant to be cross-checked: damped Newton on the Bethe
equations, and a linear null-space solve on the operator image.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .alpha import AlphaBranch, match_sets, select_branch
from .core import ComplexPolynomial, ModelParams, inverse_differences, min_pairwise_distance, \
    poly_from_roots
from .errors import DegenerateRoots, NoConvergence, SingularDenominator
from .ode import OdeCoefficients, apply_operator, ode_coefficients, operator_residual

VERIFY_TOL = 1e-9
NEWTON_TOL = 1e-10
DEDUP_TOL = 1e-7
DISTINCT_TOL = 1e-8
PHYSICAL_TOL = 1e-8


# ---------------------------------------------------------------------------
# closed forms

def energy_level(n: int, alpha: complex, params: ModelParams) -> complex:
    """Energy for which a degree-n polynomial can solve the reduced equation."""
    a = complex(alpha)
    w, lam, eps = params.omega, params.lam, params.epsilon
    den = 2 * a * (2 * a * lam + w)
    if abs(den) < 1e-12:
        raise SingularDenominator(f"energy denominator {abs(den):.3e} too small")
    num = (4 * a * (n + 1) * w**2
           - 2 * eps * (2 * a**2 * lam + a * w + lam)
           - 2 * a * lam**2 * (8 * a**2 * (2 * n + 3) + 2 * n + 1)
           - lam * w * (8 * a**2 + n - 2))
    return num / den


def ground_energy(alpha: complex, params: ModelParams) -> complex:
    a = complex(alpha)
    w, lam, eps = params.omega, params.lam, params.epsilon
    return ((w * (lam - a * (4 * a * lam + eps))
             - lam * (24 * a**3 * lam + 2 * a**2 * eps + a * lam + eps) + 2 * a * w**2)
            / (a * (2 * a * lam + w)))


def ground_delta_squared(alpha: complex, params: ModelParams, energy: complex) -> complex:
    a, E = complex(alpha), complex(energy)
    w, lam, eps = params.omega, params.lam, params.epsilon
    return 2 * lam * (a * (6 * a * lam + E + 2 * w) + lam) + 2 * a * lam * eps - E**2 + eps**2


def first_excited_energy(alpha: complex, params: ModelParams) -> complex:
    a = complex(alpha)
    w, lam, eps = params.omega, params.lam, params.epsilon
    return ((w * (lam - 2 * a * (4 * a * lam + eps))
             - 2 * lam * ((40 * a**2 + 3) * a * lam + 2 * a**2 * eps + eps) + 8 * a * w**2)
            / (2 * a * (2 * a * lam + w)))


def first_excited_delta_squared(alpha: complex, params: ModelParams, energy: complex,
                                z1: complex = 0.0) -> complex:
    a, E, z1 = complex(alpha), complex(energy), complex(z1)
    w, lam, eps = params.omega, params.lam, params.epsilon
    bracket = (4 * a * w**2 - 4 * (8 * a**3 + a) * lam**2 - lam * w) / lam**2
    return (lam**2 * (60 * a**2 + 2 - bracket * z1**2) + (6 * a * lam + w) * E
            + 12 * a * lam * w + eps * (6 * a * lam + w) - E**2 - w**2 + eps**2)


def sum_constraint(roots: Sequence[complex], c: OdeCoefficients) -> complex:
    return c.p3 * complex(np.sum(np.asarray(roots, dtype=complex)))


def delta_squared(n: int, alpha: complex, params: ModelParams, roots: Sequence[complex],
                  energy: complex) -> complex:
    """Squared splitting required by a degree-n solution with the given roots."""
    if len(roots) != n:
        raise ValueError(f"expected {n} roots, got {len(roots)}")
    a, E = complex(alpha), complex(energy)
    w, lam, eps = params.omega, params.lam, params.epsilon
    s2 = complex(np.sum(np.asarray(roots, dtype=complex) ** 2))
    bracket = (4 * a * w**2 - 4 * (8 * a**3 + a) * lam**2 - lam * w) / lam**2
    return (n * w * E - E**2 - lam**2 * (n - n**2 - 2 + bracket * s2)
            + eps**2 + 12 * a**2 * lam**2 * (2 * n * (n + 1) + 1) - n**2 * w**2
            + 2 * a * lam * (2 * n + 1) * (E + 2 * w)
            + eps * (2 * a * (lam + 2 * lam * n) + n * w))


# ---------------------------------------------------------------------------
# Bethe equations

def _power_sums(w: np.ndarray, upto: int) -> list[np.ndarray]:
    out = [None]
    wk = np.ones_like(w)
    for _ in range(upto):
        wk = wk * w
        out.append(wk.sum(axis=1))
    return out


def bae_residuals(roots: Sequence[complex], c: OdeCoefficients) -> np.ndarray:
    """Left sides of the n Bethe ansatz equations.

    The pole sums run over ordered tuples of distinct indices, written here
    through power sums p_k(i) = sum_j (z_i - z_j)^-k.
    """
    z = np.asarray(roots, dtype=complex)
    if z.size == 0:
        return np.zeros(0, dtype=complex)
    w = inverse_differences(z)
    _, p1, p2, p3 = _power_sums(w, 3)
    triples = p1**3 - 3 * p1 * p2 + 2 * p3
    pairs = p1**2 - p2
    return (4 * triples + 3 * c.a1 * z * pairs + 2 * (c.b2 * z**2 + c.b0) * p1
            + c.p3 * z**3 + c.p1 * z)


def bae_jacobian(roots: Sequence[complex], c: OdeCoefficients) -> np.ndarray:
    """Holomorphic Jacobian d(residual_i)/d(z_k) of ``bae_residuals``."""
    z = np.asarray(roots, dtype=complex)
    w = inverse_differences(z)
    _, p1, p2, p3, p4 = _power_sums(w, 4)
    dF1 = 12 * (p1**2 - p2) + 6 * c.a1 * z * p1 + 2 * (c.b2 * z**2 + c.b0)
    dF2 = -12 * p1 - 3 * c.a1 * z
    dF3 = 8.0
    explicit = 3 * c.a1 * (p1**2 - p2) + 4 * c.b2 * z * p1 + 3 * c.p3 * z**2 + c.p1
    jac = dF1[:, None] * w**2 + 2 * dF2[:, None] * w**3 + 3 * dF3 * w**4
    np.fill_diagonal(jac, explicit - dF1 * p2 - 2 * dF2 * p3 - 3 * dF3 * p4)
    return jac


def bae_norm(roots: Sequence[complex], c: OdeCoefficients) -> float:
    """Largest Bethe residual divided by (1 + coefficient scale)."""
    r = bae_residuals(roots, c)
    return float(np.abs(r).max()) / (1.0 + c.scale) if r.size else 0.0


def canonical_roots(roots: Sequence[complex]) -> np.ndarray:
    """Sort by real part then imaginary part, rounding away float noise."""
    z = np.asarray(roots, dtype=complex)
    key = np.lexsort((np.round(z.imag, 9), np.round(z.real, 9)))
    return z[key]


def rootset_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest distance under the best pairing of two equal-size root sets."""
    if len(a) != len(b):
        return math.inf
    if len(a) == 0:
        return 0.0
    return match_sets(a, b)[1]


def _newton(z0: np.ndarray, c: OdeCoefficients, max_iter: int, tol: float):
    z = z0.copy()
    scale = 1.0 + c.scale
    try:
        f = bae_residuals(z, c)
    except DegenerateRoots:
        return z, math.inf
    norm = float(np.abs(f).max()) / scale
    for _ in range(max_iter):
        if norm < tol:
            break
        try:
            step = np.linalg.solve(bae_jacobian(z, c), -f)
        except (np.linalg.LinAlgError, DegenerateRoots):
            return z, math.inf
        t = 1.0
        for _ in range(30):
            trial = z + t * step
            try:
                ft = bae_residuals(trial, c)
                nt = float(np.abs(ft).max()) / scale
            except DegenerateRoots:
                nt = math.inf
            if nt < norm:
                break
            t *= 0.5
        else:
            return z, norm
        z, f, norm = trial, ft, nt
    else:
        return z, norm
    # polish while the residual keeps dropping
    for _ in range(5):
        try:
            trial = z + np.linalg.solve(bae_jacobian(z, c), -f)
            ft = bae_residuals(trial, c)
        except (np.linalg.LinAlgError, DegenerateRoots):
            break
        nt = float(np.abs(ft).max()) / scale
        if not nt < norm:
            break
        z, f, norm = trial, ft, nt
    return z, norm


def root_scale(c: OdeCoefficients) -> float:
    """Magnitude at which the cubic and linear one-body terms balance."""
    return math.sqrt(abs(c.p1) / abs(c.p3)) if abs(c.p3) > 0 else 0.0


def solve_bae(n: int, c: OdeCoefficients, seeds: int = 64, radius: float = 3.0,
              rng_seed: int = 0, max_iter: int = 200, tol: float = NEWTON_TOL) -> list[np.ndarray]:
    """Multi-start damped Newton on the Bethe equations.

    Starts are drawn uniformly from a seeded generator, alternating between
    the disc |z| <= radius and a disc twice ``root_scale`` wide, so that
    families whose outer roots sit beyond ``radius`` are still reached. Returns deduplicated, canonically sorted root sets whose
    scaled residual is below ``tol``.
    """
    if n == 0:
        return []
    if n < 0:
        raise ValueError("n must be nonnegative")
    if abs(c.q4) >= VERIFY_TOL:
        raise ValueError(f"q4 = {c.q4} is not cancelled; choose alpha on a gauge branch")
    rng = np.random.default_rng(rng_seed)
    radii = (radius, max(radius, 2.0 * root_scale(c)))
    found: list[np.ndarray] = []
    best = math.inf
    for k in range(seeds):
        r = radii[k % 2] * np.sqrt(rng.random(n))
        th = 2 * np.pi * rng.random(n)
        z, norm = _newton(r * np.exp(1j * th), c, max_iter, tol)
        best = min(best, norm)
        if not norm < tol or min_pairwise_distance(z) < DISTINCT_TOL:
            continue
        z = canonical_roots(z)
        if not any(rootset_distance(z, other) < DEDUP_TOL for other in found):
            found.append(z)
    if not found:
        raise NoConvergence(f"no Newton start converged for n={n}", best)
    found.sort(key=lambda s: tuple(np.round(np.concatenate([s.real, s.imag]), 9)))
    return found


# ---------------------------------------------------------------------------
# linear-algebra route

@dataclass(frozen=True)
class NullspaceSolution:
    roots: np.ndarray
    defect: float
    sigma_min: float
    polynomial: ComplexPolynomial


def image_matrix(n: int, c: OdeCoefficients) -> np.ndarray:
    """Columns are the coefficient vectors of L[z^k], k = 0..n, length n+3."""
    cols = []
    for k in range(n + 1):
        img = apply_operator(c, ComplexPolynomial.monomial(k), reduced=True)
        col = np.zeros(n + 3, dtype=complex)
        col[: len(img)] = img.coeffs
        cols.append(col)
    return np.array(cols).T


def nullspace_oracle(n: int, c: OdeCoefficients, tol: float = 1e-8) -> NullspaceSolution | None:
    """Monic degree-n polynomial annihilated by the reduced operator, if any.

    The operator is linear, so varphi = z^n + sum c_k z^k is a solution iff
    the stacked image matrix has a null vector with nonzero last entry.
    Present when the smallest singular value is below tol * (1 + largest).
    """
    if abs(c.q4) >= VERIFY_TOL:
        raise ValueError(f"q4 = {c.q4} is not cancelled")
    m = image_matrix(n, c)
    _, s, vh = np.linalg.svd(m)
    sigma_min = float(s[-1])
    if not sigma_min < tol * (1.0 + float(s[0])):
        return None
    v = vh[-1].conj()
    if abs(v[-1]) < 1e-8 * np.abs(v).max():
        return None
    coeffs = v / v[-1]
    poly = ComplexPolynomial(coeffs)
    roots = canonical_roots(poly.roots())
    return NullspaceSolution(roots, operator_residual(c, poly), sigma_min, poly)


def q0_family(n: int, c: OdeCoefficients) -> list[tuple[complex, ComplexPolynomial]]:
    """All (q0, varphi) pairs with L[varphi] = 0 once q0 is substituted.

    Independent of the Bethe equations: the constant coefficient q0 enters
    L only as q0 * varphi, so the admissible q0 are minus the eigenvalues of
    the square block of the q0-free image matrix (degrees 0..n). Eigenvectors
    that cannot be made monic, or that leave the top two degrees nonzero,
    are dropped.
    """
    c0 = replace(c, q0=0j)
    m = image_matrix(n, c0)
    vals, vecs = np.linalg.eig(m[: n + 1])
    out = []
    for lam, v in zip(vals, vecs.T):
        if abs(v[-1]) < 1e-8 * np.abs(v).max():
            continue
        poly = ComplexPolynomial(v / v[-1])
        q0 = -complex(lam)
        if operator_residual(replace(c, q0=q0), poly) < VERIFY_TOL:
            out.append((q0, poly))
    out.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return out


# ---------------------------------------------------------------------------
# full pipeline

@dataclass(frozen=True)
class BetheState:
    n: int
    alpha: AlphaBranch
    energy: complex
    roots: tuple
    delta_sq_required: complex
    bae_residual: float
    sum_constraint_residual: float
    operator_residual: float
    p3: complex = 0j
    nullspace_distance: float = math.nan
    coefficients: OdeCoefficients | None = field(default=None, compare=False, repr=False)

    @property
    def verified(self) -> bool:
        ok = (self.bae_residual < VERIFY_TOL and self.sum_constraint_residual < VERIFY_TOL
              and self.operator_residual < VERIFY_TOL)
        if self.n >= 2:
            ok = ok and min_pairwise_distance(self.roots) > DISTINCT_TOL
        return ok

    @property
    def physical(self) -> bool:
        """Real energy and a real, nonnegative required Delta^2."""
        d2 = self.delta_sq_required
        return (abs(self.energy.imag) < PHYSICAL_TOL and abs(d2.imag) < PHYSICAL_TOL
                and d2.real >= 0)

    @property
    def delta(self) -> float:
        return math.sqrt(max(self.delta_sq_required.real, 0.0))

    @property
    def vanishing_factor(self) -> str:
        """Which factor of p3 * sum(z_i) vanishes: 'sum', 'p3', 'both' or 'none'."""
        s = abs(complex(np.sum(self.roots))) < VERIFY_TOL
        p = abs(self.p3) < VERIFY_TOL
        return {(True, True): "both", (True, False): "sum", (False, True): "p3"}.get((s, p), "none")


def make_state(n: int, branch: AlphaBranch, params: ModelParams, roots: Sequence[complex],
               energy: complex | None = None, cross_check: bool = False) -> BetheState:
    """Evaluate energy, required Delta^2 and all residuals for one root set.

    ``params.delta`` is ignored: q0 is built from the required Delta^2.
    """
    alpha = branch.value
    E = energy_level(n, alpha, params) if energy is None else complex(energy)
    roots = tuple(complex(r) for r in roots)
    d2 = delta_squared(n, alpha, params, roots, E)
    c = ode_coefficients(params, alpha, E, delta_sq=d2)
    phi = poly_from_roots(roots)
    try:
        bae = bae_norm(roots, c)
    except DegenerateRoots:
        bae = math.inf
    dist = math.nan
    if cross_check:
        sol = nullspace_oracle(n, c)
        dist = math.inf if sol is None else rootset_distance(sol.roots, roots)
    return BetheState(
        n=n, alpha=branch, energy=complex(E), roots=roots, delta_sq_required=complex(d2),
        bae_residual=bae, sum_constraint_residual=abs(sum_constraint(roots, c)),
        operator_residual=operator_residual(c, phi), p3=c.p3, nullspace_distance=dist,
        coefficients=c,
    )


def bethe_states(n: int, branch: AlphaBranch, omega: float, lam: float, epsilon: float,
                 seeds: int = 64, rng_seed: int = 0, cross_check: bool = True) -> list[BetheState]:
    """Every Bethe root set at these parameters, with residuals and labels.

    Root sets violating the sum constraint are kept (unverified) so callers
    can see them; filter on ``verified`` and ``physical``.
    """
    params = ModelParams(delta=0.0, epsilon=epsilon, omega=omega, lam=lam)
    alpha = branch.value
    E = energy_level(n, alpha, params)
    if n == 0:
        return [make_state(0, branch, params, (), E, cross_check)]
    c = ode_coefficients(params, alpha, E)
    try:
        root_sets = solve_bae(n, c, seeds=seeds, rng_seed=rng_seed)
    except NoConvergence:
        return []
    return [make_state(n, branch, params, z, E, cross_check) for z in root_sets]


def consistency_solve(n: int, branch: AlphaBranch | int | str, omega: float, lam: float,
                      epsilon: float, seeds: int = 64, rng_seed: int = 0) -> list[BetheState]:
    """Verified, physical solutions: real E and a real Delta^2 >= 0.

    ``delta`` of the returned states is the positive square root of the
    required Delta^2.
    """
    if not isinstance(branch, AlphaBranch):
        branch = select_branch(lam / omega, branch)
    if not branch.admissible:
        return []
    states = bethe_states(n, branch, omega, lam, epsilon, seeds=seeds, rng_seed=rng_seed)
    return [s for s in states if s.verified and s.physical]


def params_with_delta(state: BetheState, omega: float, lam: float, epsilon: float) -> ModelParams:
    return ModelParams(delta=state.delta, epsilon=epsilon, omega=omega, lam=lam)
