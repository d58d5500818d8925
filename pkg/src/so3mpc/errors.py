"""Exception types shared across the package."""


class So3MpcError(Exception):
    """Base class for all package errors."""


class NotSkewError(So3MpcError):
    """Matrix handed to vee() is not skew-symmetric within tolerance."""


class DomainError(So3MpcError):
    """Attitude matrix left the open domain det(X) > 0 of the potential."""


class StepSizeUnderflowError(So3MpcError):
    """Adaptive integrator needed a step below the minimum resolvable size."""


class GainError(So3MpcError):
    """Feedback gains fail the required Hurwitz/Schur stability check."""


class InfeasibleBoxError(So3MpcError):
    """A translated control box is empty (lower bound above upper bound)."""


class InfeasibleError(So3MpcError):
    """QP constraints are inconsistent; no feasible point exists."""


class ReferenceBoundsError(So3MpcError):
    """Reference trajectory violates the uniform Gram-matrix bounds."""


class ConfigError(So3MpcError):
    """Scenario or controller configuration failed validation."""
