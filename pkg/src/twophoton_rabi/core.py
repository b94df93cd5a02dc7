"""Model parameters, dense complex polynomials and root-sum identities.

Polynomials are stored dense in ascending degree and every operation works
in coefficient space, so an operator image that should vanish identically
can be checked coefficient by coefficient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateRoots, InvalidParameters

DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the biased two-photon qubit-boson Hamiltonian.

    ``delta`` couples the two spin states, ``epsilon`` is the bias,
    ``omega`` the mode frequency and ``lam`` the two-photon coupling.
    All are energies with hbar = 1.
    """

    delta: float
    epsilon: float
    omega: float
    lam: float

    def __post_init__(self):
        for name in ("delta", "epsilon", "omega", "lam"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
        if self.omega <= 0:
            raise InvalidParameters(f"omega must be positive, got {self.omega}")
        if self.lam == 0:
            raise InvalidParameters("lambda must be nonzero")

    @property
    def ratio(self) -> float:
        """Dimensionless coupling lambda / omega."""
        return self.lam / self.omega


def check_ratio(ratio: float) -> float:
    ratio = float(ratio)
    if ratio == 0 or not math.isfinite(ratio):
        raise InvalidParameters(f"coupling ratio must be finite and nonzero, got {ratio}")
    return ratio


def _trim(coeffs: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        return coeffs[:0]
    return coeffs[: nz[-1] + 1]


class ComplexPolynomial:
    """Dense polynomial with complex coefficients, ascending order.

    The zero polynomial has no stored coefficients and degree -1.
    Instances are immutable.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] = ()):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=complex).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        c = _trim(c).copy()
        c.setflags(write=False)
        self._c = c

    @classmethod
    def monomial(cls, k: int, value: complex = 1.0) -> "ComplexPolynomial":
        c = np.zeros(k + 1, dtype=complex)
        c[k] = value
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self._c.size == 0

    def __len__(self):
        return self._c.size

    def __repr__(self):
        return f"ComplexPolynomial({self._c.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, ComplexPolynomial):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    __hash__ = None

    def __add__(self, other):
        other = _as_poly(other)
        n = max(self._c.size, other._c.size)
        out = np.zeros(n, dtype=complex)
        out[: self._c.size] += self._c
        out[: other._c.size] += other._c
        return ComplexPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return ComplexPolynomial(-self._c)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return ComplexPolynomial()
        return ComplexPolynomial(np.convolve(self._c, other._c))

    __rmul__ = __mul__

    def __call__(self, z):
        return poly_eval(self, z)

    def derivative(self) -> "ComplexPolynomial":
        return poly_derivative(self)

    def shift(self, k: int) -> "ComplexPolynomial":
        """Multiply by z**k."""
        if self.is_zero():
            return self
        return ComplexPolynomial(np.concatenate([np.zeros(k, dtype=complex), self._c]))

    def roots(self) -> np.ndarray:
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return np.roots(self._c[::-1])


def _as_poly(x) -> ComplexPolynomial:
    if isinstance(x, ComplexPolynomial):
        return x
    return ComplexPolynomial([complex(x)])


ZERO = ComplexPolynomial()
ONE = ComplexPolynomial([1.0])


def poly_from_roots(roots: Sequence[complex]) -> ComplexPolynomial:
    """Monic polynomial prod (z - r); the empty product is 1."""
    c = np.array([1.0 + 0j])
    for r in roots:
        r = complex(r)
        if not (math.isfinite(r.real) and math.isfinite(r.imag)):
            raise ValueError("roots must be finite")
        # multiply by (z - r) in ascending order
        c = np.concatenate([[-r * c[0]], c[:-1] - r * c[1:], [c[-1]]])
    return ComplexPolynomial(c)


def poly_derivative(p: ComplexPolynomial) -> ComplexPolynomial:
    if p.degree < 1:
        return ZERO
    k = np.arange(1, p.coeffs.size)
    return ComplexPolynomial(p.coeffs[1:] * k)


def poly_arith(a: ComplexPolynomial, b: ComplexPolynomial, op: str) -> ComplexPolynomial:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}; expected 'add' or 'mul'")


def poly_eval(p: ComplexPolynomial, z):
    """Horner evaluation; accepts a scalar or an array of points."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for c in p.coeffs[::-1]:
        out = out * z + c
    return complex(out) if out.ndim == 0 else out


def min_pairwise_distance(roots: Sequence[complex]) -> float:
    z = np.asarray(roots, dtype=complex)
    if z.size < 2:
        return math.inf
    d = np.abs(z[:, None] - z[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def inverse_differences(roots: Sequence[complex], tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Matrix W[i, j] = 1 / (z_i - z_j) with a zero diagonal."""
    z = np.asarray(roots, dtype=complex)
    if min_pairwise_distance(z) <= tol:
        raise DegenerateRoots(f"roots closer than {tol:g}")
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / diff
    np.fill_diagonal(w, 0.0)
    return w


def symmetric_sums(roots: Sequence[complex]) -> tuple[complex, complex, complex]:
    """The three root sums whose values are (0, n(n-1)/2, 0) for distinct roots.

    Returns the sums over i != j of 1/(z_i - z_j) and z_i/(z_i - z_j), and
    the sum over ordered pairs l != j, both distinct from i, of
    1/((z_i - z_l)(z_i - z_j)).
    """
    z = np.asarray(roots, dtype=complex)
    if z.size == 0:
        return 0j, 0j, 0j
    w = inverse_differences(z)
    row = w.sum(axis=1)
    s1 = complex(row.sum())
    s2 = complex((z[:, None] * w).sum())
    s3 = complex((row**2 - (w**2).sum(axis=1)).sum())
    return s1, s2, s3
