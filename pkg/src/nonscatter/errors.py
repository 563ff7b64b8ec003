"""Exception types shared across the package."""


class NonScatterError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(NonScatterError):
    """Invalid or inconsistent configuration input."""


class NumericalError(NonScatterError):
    """A numerical procedure failed to converge or returned non-finite values."""


class HypothesisError(NonScatterError):
    """A mathematical hypothesis required by the requested computation is violated.

    Example: asking for an interior impedance symbol at a frequency that is
    (numerically) an interior PEC eigenvalue of the ball.
    """
