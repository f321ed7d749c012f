"""Exception hierarchy shared across the package."""


class SaddleError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(SaddleError):
    """Operands live on different grids or have incompatible sizes."""


class GridFileError(SaddleError):
    """A solution file is malformed or bound to an incompatible grid."""


class RetractionError(SaddleError):
    """The sphere retraction hit a (numerically) vanishing denominator."""


class ConditioningError(SaddleError):
    """A support-space Gram system is too ill-conditioned to solve."""


class BoundaryConditionError(SaddleError):
    """Input violates the boundary conditions required by the problem."""


class DegenerateDirectionError(SaddleError):
    """An initial-direction recipe produced a (numerically) zero function."""


class InitialDirectionError(SaddleError):
    """The initial unit direction is (numerically) inside the support space."""


class PeakSelectionError(SaddleError):
    """The inner maximization failed to converge."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class StepSearchError(SaddleError):
    """Backtracking exhausted the step-size budget without acceptance."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ConfigError(SaddleError):
    """A run configuration failed validation."""
