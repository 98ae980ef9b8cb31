"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ConvergenceError(RuntimeError):
    """A fixed-point iteration failed to converge.

    The last iterate and the final step norm are kept so callers can
    inspect how far the solver got.
    """

    def __init__(self, message, last_iterate=None, residual=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
        self.iterations = iterations


class ConsistencyError(RuntimeError):
    """A result violates a bound that must hold; signals a bug rather than bad input."""
