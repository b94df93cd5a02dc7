"""Fourth-order operator acting on the spin-up Bargmann component.

The untransformed equation for phi_1 reads

    phi'''' + (B0 + B2 z^2) phi'' + (P1 z + P3 z^3) phi' + (Q0 + Q2 z^2 + z^4) phi = 0

with the B, P, Q coefficients of ``untransformed_coefficients``. After the
substitution phi_1 = exp(alpha z^2) varphi the operator on varphi has the
eight coefficients collected in ``OdeCoefficients``.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from math import comb

import numpy as np

from .core import ComplexPolynomial, ModelParams, poly_eval

Q4_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class OdeCoefficients:
    a1: complex
    b2: complex
    b0: complex
    p3: complex
    p1: complex
    q4: complex
    q2: complex
    q0: complex

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=complex)

    @property
    def scale(self) -> float:
        """Largest coefficient magnitude."""
        return float(np.abs(self.as_array()).max())

    def perturbed(self, name: str, amount: float) -> "OdeCoefficients":
        return replace(self, **{name: getattr(self, name) + amount})


def ode_coefficients(params: ModelParams, alpha: complex, energy: complex,
                     delta_sq: complex | None = None) -> OdeCoefficients:
    """Coefficients of the gauge-transformed operator.

    ``delta_sq`` overrides params.delta**2 in q0, so that a required
    (possibly negative or complex) squared splitting can be inserted.
    """
    a = complex(alpha)
    E = complex(energy)
    w, lam, eps = params.omega, params.lam, params.epsilon
    d2 = params.delta**2 if delta_sq is None else complex(delta_sq)
    lam2 = lam * lam
    # each coefficient is its alpha = 0 value plus an alpha-proportional part,
    # so the identity gauge reproduces the untransformed equation bit for bit
    return OdeCoefficients(
        a1=8 * a,
        b2=1 - w**2 / lam2 + 24 * a**2,
        b0=(2 * w + eps + E + 12 * a * lam) / lam,
        p3=w / lam + 32 * a**3 + a * (4 - 4 * w**2 / lam2),
        p1=((w * (eps + E) - w**2) + 12 * a * lam * w + 4 * a * lam * (12 * a * lam + E - w + eps)) / lam2,
        q4=(-4 * a**2 * w**2 + (16 * a**4 + 4 * a**2 + 1) * lam2 + 2 * a * lam * w) / lam2,
        q2=2 * (eps - w) / lam
        + (2 * lam * (2 * a**2 * eps + a * (2 * a * (12 * a * lam + E) + lam))
           - 4 * a * w**2 + 2 * w * a * (4 * a * lam + E + eps)) / lam2,
        q0=(2 * lam**2 + eps**2 - E**2 - d2) / lam2
        + (2 * lam * a * (6 * a * lam + E + 2 * w) + 2 * a * lam * eps) / lam2,
    )


def untransformed_coefficients(params: ModelParams, energy: complex,
                               delta_sq: complex | None = None) -> OdeCoefficients:
    """Coefficients of the equation for phi_1 itself, in the same layout.

    a1 is identically zero and q4 identically one there.
    """
    E = complex(energy)
    w, lam, eps = params.omega, params.lam, params.epsilon
    d2 = params.delta**2 if delta_sq is None else complex(delta_sq)
    lam2 = lam * lam
    return OdeCoefficients(
        a1=0j,
        b2=complex(1 - w**2 / lam2),
        b0=(2 * w + eps + E) / lam,
        p3=complex(w / lam),
        p1=(w * (eps + E) - w**2) / lam2,
        q4=1 + 0j,
        q2=complex(2 * (eps - w) / lam),
        q0=(2 * lam**2 + eps**2 - E**2 - d2) / lam2,
    )


def apply_operator(c: OdeCoefficients, phi: ComplexPolynomial,
                   reduced: bool | None = None) -> ComplexPolynomial:
    """Exact image L[phi] in coefficient space.

    With ``reduced`` the q4 z^4 term is dropped; by default that happens
    when |q4| < Q4_ZERO_TOL, which is the operator with q4 set to zero.
    """
    if reduced is None:
        reduced = abs(c.q4) < Q4_ZERO_TOL
    d1 = phi.derivative()
    d2 = d1.derivative()
    d3 = d2.derivative()
    d4 = d3.derivative()
    out = (d4
           + c.a1 * d3.shift(1)
           + c.b2 * d2.shift(2) + c.b0 * d2
           + c.p3 * d1.shift(3) + c.p1 * d1.shift(1)
           + c.q2 * phi.shift(2) + c.q0 * phi)
    if not reduced:
        out = out + c.q4 * phi.shift(4)
    return out


def residual_norm(p: ComplexPolynomial, scale: float = 0.0) -> float:
    """Largest coefficient magnitude divided by (1 + scale)."""
    if p.is_zero():
        return 0.0
    return float(np.abs(p.coeffs).max()) / (1.0 + scale)


def operator_residual(c: OdeCoefficients, phi: ComplexPolynomial) -> float:
    """residual_norm of L[phi], scaled by the operator and polynomial magnitudes."""
    phi_scale = float(np.abs(phi.coeffs).max()) if not phi.is_zero() else 0.0
    return residual_norm(apply_operator(c, phi), c.scale * max(1.0, phi_scale))


def gauge_derivatives(alpha: complex, phi: ComplexPolynomial, z) -> np.ndarray:
    """Values of d^k/dz^k [exp(alpha z^2) phi(z)] for k = 0..4.

    Returns an array whose first axis is k.
    """
    a = complex(alpha)
    z = np.asarray(z, dtype=complex)
    g = np.exp(a * z * z)
    gauge = [
        g,
        2 * a * z * g,
        (2 * a + 4 * a**2 * z**2) * g,
        (12 * a**2 * z + 8 * a**3 * z**3) * g,
        (12 * a**2 + 48 * a**3 * z**2 + 16 * a**4 * z**4) * g,
    ]
    p = [phi]
    for _ in range(4):
        p.append(p[-1].derivative())
    pv = [np.asarray(poly_eval(q, z), dtype=complex) for q in p]
    return np.array([sum(comb(k, j) * gauge[j] * pv[k - j] for j in range(k + 1))
                     for k in range(5)])


def raw_residual_pointwise(params: ModelParams, energy: complex, alpha: complex,
                           phi: ComplexPolynomial, z, delta_sq: complex | None = None):
    """Left side of the untransformed equation at z for phi_1 = exp(alpha z^2) phi."""
    u = untransformed_coefficients(params, energy, delta_sq)
    z_arr = np.asarray(z, dtype=complex)
    d = gauge_derivatives(alpha, phi, z_arr)
    z2 = z_arr * z_arr
    out = (d[4]
           + (u.b0 + u.b2 * z2) * d[2]
           + (u.p1 * z_arr + u.p3 * z2 * z_arr) * d[1]
           + (u.q0 + u.q2 * z2 + z2 * z2) * d[0])
    return complex(out) if out.ndim == 0 else out
