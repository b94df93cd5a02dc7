"""Truncated Fock-space diagonalization, used as an independent oracle.

Basis ordering is m-major, spin-minor: index 2*m + s with s = 0 for the
sigma_z = +1 state and s = 1 for sigma_z = -1, m = 0..N.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameters, InvalidTruncation, TruncationUnstable

DEFAULT_LADDER = (40, 80, 160)


@dataclass(frozen=True)
class HamiltonianParams:
    """Hamiltonian parameters without the lambda != 0 restriction.

    ``ModelParams`` is accepted wherever this type is; the matrix oracle
    also covers the uncoupled case.
    """

    delta: float
    epsilon: float
    omega: float
    lam: float

    def __post_init__(self):
        if not self.omega > 0:
            raise InvalidParameters(f"omega must be positive, got {self.omega}")

    @property
    def ratio(self) -> float:
        return self.lam / self.omega


@dataclass(frozen=True)
class FockMatrix:
    truncation: int
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _boson_ops(N: int):
    m = np.arange(N + 1, dtype=float)
    number = np.diag(m)
    pair = np.zeros((N + 1, N + 1))
    k = np.arange(N - 1)
    # <m+2| a†^2 |m> = sqrt((m+1)(m+2))
    pair[k + 2, k] = np.sqrt((k + 1.0) * (k + 2.0))
    return number, pair + pair.T


_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])


def build_hamiltonian(params: HamiltonianParams, N: int) -> FockMatrix:
    """Matrix of Delta sx + eps sz + omega a†a + lambda sz (a†^2 + a^2)."""
    if N < 4:
        raise InvalidTruncation(f"truncation must be at least 4, got {N}")
    number, pair = _boson_ops(N)
    h = (params.delta * np.kron(np.eye(N + 1), _SX)
         + params.epsilon * np.kron(np.eye(N + 1), _SZ)
         + params.omega * np.kron(number, np.eye(2))
         + params.lam * np.kron(pair, _SZ))
    return FockMatrix(N, h)


def build_lab_hamiltonian(params: HamiltonianParams, N: int) -> FockMatrix:
    """Matrix of Delta sz + eps sx + omega a†a + lambda sx (a†^2 + a^2), before rotation."""
    if N < 4:
        raise InvalidTruncation(f"truncation must be at least 4, got {N}")
    number, pair = _boson_ops(N)
    h = (params.delta * np.kron(np.eye(N + 1), _SZ)
         + params.epsilon * np.kron(np.eye(N + 1), _SX)
         + params.omega * np.kron(number, np.eye(2))
         + params.lam * np.kron(pair, _SX))
    return FockMatrix(N, h)


def spin_rotation(N: int) -> np.ndarray:
    """(sz + sx)/sqrt(2) acting on the spin factor of every boson level."""
    return np.kron(np.eye(N + 1), (_SZ + _SX) / np.sqrt(2.0))


def spectrum(M: FockMatrix | np.ndarray, check: bool = True) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric matrix."""
    a = M.entries if isinstance(M, FockMatrix) else np.asarray(M, dtype=float)
    vals, vecs = np.linalg.eigh(a)
    if check and a.size:
        res = np.linalg.norm(a @ vecs - vecs * vals, axis=0).max()
        bound = 1e-10 * max(np.linalg.norm(a, 2), 1.0)
        if res > bound:
            raise ArithmeticError(f"eigenvector residual {res:.3e} exceeds {bound:.3e}")
    return vals


@dataclass(frozen=True)
class LevelMatch:
    matched: bool
    nearest: float
    truncation: int


def _nearest(vals: np.ndarray, energy: float) -> float:
    return float(vals[np.argmin(np.abs(vals - energy))])


def converged_level_match(params: HamiltonianParams, energy: float, tol: float = 1e-6,
                          ladder: Sequence[int] = DEFAULT_LADDER) -> LevelMatch:
    """Whether ``energy`` is a converged eigenvalue of the truncated Hamiltonian.

    A match needs an eigenvalue within tol of the energy at the two largest
    truncations, moving by less than tol/10 between them. ``truncation`` is
    the smallest ladder entry from which the match holds. An energy with no
    eigenvalue within tol at either large truncation is simply unmatched.
    """
    if not abs(params.ratio) < 0.5:
        raise InvalidParameters("oracle verdicts need |lambda/omega| < 0.5")
    ladder = sorted(ladder)
    if len(ladder) < 2:
        raise InvalidTruncation("need at least two truncations")
    nearest = [_nearest(spectrum(build_hamiltonian(params, N)), energy) for N in ladder]
    lo, hi = nearest[-2], nearest[-1]
    close = [abs(v - energy) < tol for v in nearest]
    if not (close[-2] or close[-1]):
        return LevelMatch(False, hi, ladder[-1])
    if abs(hi - lo) >= tol / 10:
        raise TruncationUnstable(
            f"nearest eigenvalue moved {abs(hi - lo):.3e} between N={ladder[-2]} and N={ladder[-1]}")
    if not (close[-2] and close[-1]):
        return LevelMatch(False, hi, ladder[-1])
    used = ladder[-2]
    for N, ok in zip(ladder[-2::-1], close[-2::-1]):
        if not ok:
            break
        used = N
    return LevelMatch(True, hi, used)
