"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class UnphysicalStateError(ValidationError):
    """Raised when a covariance matrix fails the quantum physicality test.

    Carries the offending minimum symplectic eigenvalue so callers can
    report how far below the vacuum limit the state sits.
    """

    def __init__(self, message: str, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DegenerateDataError(ValidationError):
    """Raised when sampled data cannot support the requested estimate."""


class InternalConsistencyError(RuntimeError):
    """Raised when an internal invariant breaks; indicates a bug, not bad input."""
