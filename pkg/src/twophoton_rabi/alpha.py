"""Gauge exponents that cancel the z**4 term, and their admissibility.

The exponent alpha in phi_1 = exp(alpha z^2) varphi solves

    (16 a^4 + 4 a^2 + 1) L^2 - 4 a^2 + 2 a L = 0,      L = lambda / omega.

Roots come from the radical closed form (principal branches, validated by
back-substitution) and, independently, from a companion-matrix eigensolve.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import linear_sum_assignment

from .core import ComplexPolynomial, ONE, check_ratio, poly_eval
from .errors import BranchPoint, ValidationFailure

RESIDUAL_TOL = 1e-9
BRANCH_TOL = 1e-12
_SQRT3 = math.sqrt(3.0)
_SQRT6 = math.sqrt(6.0)


@dataclass(frozen=True)
class AlphaBranch:
    index: int
    value: complex
    quartic_residual: float
    admissible: bool


def quartic_coefficients(ratio: float) -> np.ndarray:
    """Ascending coefficients of the gauge quartic in alpha."""
    L = check_ratio(ratio)
    return np.array([L * L, 2 * L, 4 * L * L - 4, 0.0, 16 * L * L])


def quartic_residual(alpha: complex, ratio: float) -> float:
    L = ratio
    a2 = alpha * alpha
    return abs((16 * a2 * a2 + 4 * a2 + 1) * L * L - 4 * a2 + 2 * alpha * L)


def discriminant_factor(ratio: float) -> float:
    """Polynomial under the inner square root of f; roots collide where it vanishes."""
    x = ratio * ratio
    return 144 * x**4 + 332 * x**3 - 191 * x**2 - 76 * x + 20


def collision_ratios() -> np.ndarray:
    """Positive coupling ratios at which two gauge exponents coincide."""
    x = np.roots([144, 332, -191, -76, 20])
    x = x[(np.abs(x.imag) < 1e-12) & (x.real > 0)].real
    return np.sort(np.sqrt(x))


def _cbrt(w: complex) -> complex:
    if w == 0:
        return 0j
    return cmath.exp(cmath.log(w) / 3)


def f_of_lambda(ratio: float) -> complex:
    L = check_ratio(ratio)
    L2 = L * L
    inner = -(L2 * L2) * discriminant_factor(L)
    radicand = -35 * L2**3 + 93 * L2**2 / 2 + 3 * L2 - 1 + 1.5 * _SQRT3 * cmath.sqrt(inner)
    f = _cbrt(radicand)
    if abs(f) < BRANCH_TOL:
        raise BranchPoint(f"f vanishes at ratio {L}")
    return f


def h_of_lambda(ratio: float, f: complex | None = None) -> complex:
    L = check_ratio(ratio)
    if f is None:
        f = f_of_lambda(L)
    if abs(f) < BRANCH_TOL:
        raise BranchPoint(f"f vanishes at ratio {L}")
    L2 = L * L
    h = cmath.sqrt(2 * (-2 * L2 * f + f * f + 2 * f + 13 * L2 * L2 - 2 * L2 + 1) / (L2 * f))
    if abs(h) < BRANCH_TOL:
        raise BranchPoint(f"h vanishes at ratio {L}")
    return h


def admissible(alpha: complex) -> bool:
    """Bargmann normalizability of exp(alpha z^2) times a polynomial."""
    return abs(alpha) < 0.5


def _branch(index: int, value: complex, ratio: float) -> AlphaBranch:
    return AlphaBranch(index, complex(value), quartic_residual(value, ratio), admissible(value))


def alpha_closed_form(ratio: float) -> list[AlphaBranch]:
    """The four roots from the radical formulas, indices 1..4.

    Indices 1 and 2 take the upper and lower sign of the first pair, 3 and 4
    of the second. Raises ValidationFailure if any value does not satisfy
    the quartic to RESIDUAL_TOL.
    """
    L = check_ratio(ratio)
    f = f_of_lambda(L)
    h = h_of_lambda(L, f)
    L2 = L * L
    common = h * (4 * (L2 - 1) * f + f * f + 13 * L2 * L2 - 2 * L2 + 1)
    den = 48 * L2 * f * h
    r12 = cmath.sqrt((6 * _SQRT6 * L * f - common) / den)
    r34 = cmath.sqrt((-6 * _SQRT6 * L * f - common) / den)
    shift = h / (4 * _SQRT6)
    values = (-shift - r12, -shift + r12, shift - r34, shift + r34)
    out = [_branch(i + 1, v, L) for i, v in enumerate(values)]
    bad = [b for b in out if not b.quartic_residual < RESIDUAL_TOL]
    if bad:
        raise ValidationFailure(
            f"closed-form alpha_{bad[0].index} has quartic residual "
            f"{bad[0].quartic_residual:.3e} at ratio {L}"
        )
    return out


def alpha_companion(ratio: float) -> np.ndarray:
    """Roots of the gauge quartic as eigenvalues of its companion matrix."""
    c = quartic_coefficients(ratio)
    monic = c[:4] / c[4]
    comp = np.zeros((4, 4))
    comp[1:, :3] = np.eye(3)
    comp[:, 3] = -monic
    return np.linalg.eigvals(comp).astype(complex)


def match_sets(a: Sequence[complex], b: Sequence[complex]) -> tuple[np.ndarray, float]:
    """Optimal one-to-one matching of b onto a.

    Returns the permutation ``perm`` with b[perm[i]] paired to a[i], and
    the largest paired distance.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(a), dtype=int)
    perm[rows] = cols
    return perm, float(cost[rows, cols].max()) if len(a) else 0.0


def hausdorff(a: Sequence[complex], b: Sequence[complex]) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def alpha_branches(ratio: float) -> tuple[list[AlphaBranch], bool]:
    """Closed-form branches, falling back to companion roots when they fail.

    The fallback labels companion roots by matching them to the closed form
    at a slightly shifted ratio. The flag is True when the fallback was used.
    """
    try:
        return alpha_closed_form(ratio), False
    except (BranchPoint, ValidationFailure):
        pass
    roots = alpha_companion(ratio)
    for step in (1e-3, -1e-3, 1e-2, -1e-2):
        try:
            ref = alpha_closed_form(ratio * (1 + step))
        except (BranchPoint, ValidationFailure):
            continue
        perm, _ = match_sets([b.value for b in ref], roots)
        roots = roots[perm]
        break
    return [_branch(i + 1, v, ratio) for i, v in enumerate(roots)], True


def select_branch(ratio: float, branch: int | str = "auto") -> AlphaBranch:
    """One labeled branch; ``auto`` is the second closed-form root."""
    index = 2 if branch == "auto" else int(branch)
    if index not in (1, 2, 3, 4):
        raise ValueError(f"branch must be 1..4 or 'auto', got {branch!r}")
    branches, _ = alpha_branches(ratio)
    return branches[index - 1]


def track_branches(ratios: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Continuity-labeled roots along a grid of ratios.

    The first grid point takes the closed-form labels; every later point is
    matched to its predecessor by minimal total displacement. Returns the
    (len(ratios), 4) array of values and a boolean array marking grid points
    where the closed form failed and companion roots were used.
    """
    values = np.empty((len(ratios), 4), dtype=complex)
    fallback = np.zeros(len(ratios), dtype=bool)
    prev = None
    for k, L in enumerate(ratios):
        branches, used = alpha_branches(L)
        cur = np.array([b.value for b in branches])
        if prev is not None:
            perm, _ = match_sets(prev, cur)
            cur = cur[perm]
        values[k] = cur
        fallback[k] = used
        prev = cur
    return values, fallback


def alpha_slope(alpha: complex, ratio: float) -> complex:
    """d(alpha)/d(ratio) along a root branch, by implicit differentiation."""
    a, L = alpha, ratio
    dP_da = (64 * a**3 + 8 * a) * L * L - 8 * a + 2 * L
    dP_dL = 2 * L * (16 * a**4 + 4 * a**2 + 1) + 2 * a
    return -dP_dL / dP_da


def normalizability_integral(alpha: complex, phi: ComplexPolynomial = ONE, radius: float = 10.0,
                             n_radial: int = 400, n_angular: int = 256) -> float:
    """Truncated Bargmann norm of exp(alpha z^2) phi over the disc |z| <= radius.

    Gauss-Legendre in r and the periodic trapezoid rule in theta.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    x, w = leggauss(n_radial)
    r = 0.5 * radius * (x + 1)
    wr = 0.5 * radius * w
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    z = r[:, None] * np.exp(1j * theta[None, :])
    weight = np.exp(2 * np.real(alpha * z * z) - r[:, None] ** 2)
    integrand = np.abs(poly_eval(phi, z)) ** 2 * weight * r[:, None]
    value = (integrand.sum(axis=1) * (2 * np.pi / n_angular)) @ wr / np.pi
    return float(value)
