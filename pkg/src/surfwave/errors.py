"""Exception types shared across the package."""


class SurfwaveError(Exception):
    """Base class for all package errors."""


class DomainError(SurfwaveError, ValueError):
    """An input lies outside the domain of a formula."""


class InsufficientDataError(SurfwaveError, ValueError):
    pass


class ConvergenceError(SurfwaveError, RuntimeError):
    """The optimizer hit its iteration cap.

    ``best`` holds the best iterate found before giving up.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class MeshingError(SurfwaveError, ValueError):
    pass


class InstabilityError(SurfwaveError, RuntimeError):
    """Non-finite or runaway displacement during time stepping."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class PreconditionError(SurfwaveError, ValueError):
    pass


class DegenerateSlopeError(SurfwaveError, ValueError):
    pass


class AliasingError(SurfwaveError, ValueError):
    pass


class UnreliablePeakError(SurfwaveError, ValueError):
    pass
