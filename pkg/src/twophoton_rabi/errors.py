"""Exception types raised by the solver stack."""


class RabiError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameters(RabiError, ValueError):
    """Physical or numerical parameters outside the allowed domain."""


class DegenerateRoots(RabiError, ValueError):
    """Two polynomial roots coincide within the degeneracy tolerance."""


class BranchPoint(RabiError, ArithmeticError):
    """A radical in the closed-form gauge exponents vanishes."""


class ValidationFailure(RabiError):
    """A closed-form value failed validation by back-substitution."""


class SingularDenominator(RabiError, ZeroDivisionError):
    """The closed-form energy has a vanishing denominator."""


class NoConvergence(RabiError):
    """No Newton start converged.

    ``best_residual`` holds the smallest residual seen over all starts.
    """

    def __init__(self, message, best_residual=float("nan")):
        super().__init__(message)
        self.best_residual = best_residual


class InvalidTruncation(RabiError, ValueError):
    """Fock truncation too small for the requested operation."""


class TruncationUnstable(RabiError):
    """Nearest eigenvalue drifts between the two largest truncations."""
