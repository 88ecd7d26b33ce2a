"""Exception and warning types shared across the package."""
from __future__ import annotations


class NoiseRadianceError(Exception):
    """Base class for errors raised by this package."""


class PointwiseUndefinedError(NoiseRadianceError):
    """The requested pointwise value does not exist (delta-correlated noise)."""


class QuadratureNonConvergentError(NoiseRadianceError):
    """A quadrature failed its internal convergence check."""


class ParseError(NoiseRadianceError):
    """A text input could not be parsed. Carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InvariantViolationError(NoiseRadianceError):
    """A structural invariant of an input object is violated."""


class ZeroWidthError(NoiseRadianceError):
    """A regularized evaluation needs a positive level width but got zero."""


class ResonantMixedTermError(NoiseRadianceError):
    """Mixed-term evaluation requested at an exactly resonant frequency."""


class InadmissibleNoiseError(NoiseRadianceError):
    """The noise model has a negative spectral density somewhere."""


class TrajectoryTooShortError(NoiseRadianceError):
    """A sampled noise trajectory does not cover the requested time span."""


class OutOfSupportWarning(UserWarning):
    """Correlation evaluated outside the tabulated support (treated as 0)."""


class EdgeLevelWarning(UserWarning):
    """The top retained level contributes noticeably; truncation is suspect."""


class NonGroundInitialWarning(UserWarning):
    """The initial state is not the ground state."""
