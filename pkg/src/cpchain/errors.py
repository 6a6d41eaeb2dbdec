"""Exception types shared across the package."""


class CpchainError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(CpchainError):
    """Invalid or inconsistent run configuration."""


class GeometryError(CpchainError):
    """Emitter layout violates the half-space geometry (e.g. point below surface)."""


class SingularityError(CpchainError):
    """A diverging quantity was requested (coincident points, x0 = 0 free-space term)."""


class BranchAmbiguityError(CpchainError):
    """The medium-side square root landed exactly on the branch cut."""


class ResonanceError(CpchainError):
    """Near-field closed forms evaluated at the surface-plasmon pole."""


class QuadratureError(CpchainError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the achieved error estimate so callers can decide whether the
    partial result is still usable.
    """

    def __init__(self, message, achieved_error=None, value=None):
        super().__init__(message)
        self.achieved_error = achieved_error
        self.value = value


class StabilityError(CpchainError):
    """Fixed-step integration became unstable (norm blow-up or drift)."""
