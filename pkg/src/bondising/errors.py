"""Exception types raised across the package."""


class BondIsingError(Exception):
    """Base class for all package errors."""


class InvalidInputError(BondIsingError, ValueError):
    """An argument violates a documented precondition."""


class NumericFailure(BondIsingError, ArithmeticError):
    """A numerical kernel failed (non-convergence, LAPACK error, ...)."""


class ConvergenceError(NumericFailure):
    """An iterative solver did not reach its tolerance.

    Attributes
    ----------
    residual : float
        Residual norm at the last iterate.
    iterations : int
        Total number of iterations spent, restarts included.
    estimate : complex or None
        Last eigenvalue estimate, if any.
    magnitude : float or None
        Growth-rate estimate ``|A v| / |v|`` at the last iterate. For operators
        with several eigenvalues tied in magnitude this still approximates the
        spectral radius even though no eigenvector converged.
    """

    def __init__(self, message, residual, iterations, estimate=None, magnitude=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.estimate = estimate
        self.magnitude = magnitude


class DegenerateStateError(BondIsingError, ValueError):
    """A state has zero norm and cannot be normalized."""


class BoundaryError(BondIsingError, ValueError):
    """The coupling angle lies on a phase boundary (extensively degenerate point)."""
