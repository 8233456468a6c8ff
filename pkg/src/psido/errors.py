"""Exception types shared across the package."""

from __future__ import annotations


class ShapeMismatchError(ValueError):
    """Operands disagree in rank, cutoff, or grid shape."""


class DegreeError(ValueError):
    """A homogeneity degree outside the supported range was requested."""


class ConfigError(ValueError):
    """Invalid or unknown configuration input."""


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge within the iteration cap.

    Carries the last estimate and iterate so callers can inspect how far
    the iteration got.
    """

    def __init__(self, message: str, estimate: float, iterate=None):
        super().__init__(message)
        self.estimate = estimate
        self.iterate = iterate
