"""Exception types shared by every module."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NonConvergenceError(RuntimeError):
    """A numerical procedure stopped before meeting its target.

    ``achieved`` holds the best error estimate reached, ``best`` the best
    point or value found (whatever is meaningful for the caller).
    """

    def __init__(self, message, achieved=None, best=None):
        super().__init__(message)
        self.achieved = achieved
        self.best = best


class InsufficientDataError(ValueError):
    """A finite prefix is too short to certify the requested property."""


class InvariantFailure(RuntimeError):
    """A mathematical identity the library relies on did not hold numerically."""
