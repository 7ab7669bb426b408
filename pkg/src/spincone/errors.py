"""Exception hierarchy shared by every module."""


class SpinconeError(Exception):
    """Base class for all package errors."""


class DomainError(SpinconeError, ValueError):
    """A point or finite-difference stencil leaves the chart domain."""


class PositiveDefinitenessError(SpinconeError, ValueError):
    """A metric (or deformed metric) is not positive definite."""


class ImmersionError(SpinconeError, ValueError):
    """An immersion or its normal field violates its invariants."""


class IntertwiningError(SpinconeError, RuntimeError):
    """A spinor identification failed its Clifford intertwining check."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class OrientationError(SpinconeError, ValueError):
    """An adapted ambient frame is negatively oriented."""


class ZeroSetError(SpinconeError, ValueError):
    """A spinor is too small for its energy-momentum tensor to be defined."""


class PreconditionError(SpinconeError, ValueError):
    """The hypotheses of a closed-form identity are not met."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(SpinconeError, ValueError):
    """Invalid verifier configuration or suite name."""
