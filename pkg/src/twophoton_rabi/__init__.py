"""Quasi-exact spectra of the asymmetric two-photon Rabi model via Bethe equations."""
from .alpha import AlphaBranch, alpha_branches, alpha_closed_form, select_branch
from .bethe import BetheState, bethe_states, consistency_solve, nullspace_oracle, solve_bae
from .core import ComplexPolynomial, ModelParams
from .fock import HamiltonianParams, build_hamiltonian, converged_level_match, spectrum
from .ode import OdeCoefficients, apply_operator, ode_coefficients

__all__ = [
    "AlphaBranch", "BetheState", "ComplexPolynomial", "HamiltonianParams", "ModelParams",
    "OdeCoefficients", "alpha_branches", "alpha_closed_form", "apply_operator", "bethe_states",
    "build_hamiltonian", "consistency_solve", "converged_level_match", "nullspace_oracle",
    "ode_coefficients", "select_branch", "solve_bae", "spectrum",
]
