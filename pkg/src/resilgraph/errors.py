"""Exception types shared across the toolkit.

Every failure mode callers are expected to handle gets its own class so the
CLI can map input problems and computation problems to distinct exit codes.
"""


class ResilError(Exception):
    """Base class for all toolkit errors."""


class InputError(ResilError):
    """Base for problems with user-supplied data or configuration."""


class ParseError(InputError):
    """Malformed file content. Carries the offending path/line when known."""

    def __init__(self, message, path=None, line=None):
        detail = message
        if path is not None:
            detail = f"{path}: {detail}"
        if line is not None:
            detail = f"{detail} (line {line})"
        super().__init__(detail)
        self.path = path
        self.line = line


class BoundsError(InputError):
    """Node or class id outside the valid range."""


class ShapeError(InputError):
    """Array shape or length does not match the graph."""


class ConfigError(InputError):
    """Invalid parameter value or unknown configuration key."""


class ComputationError(ResilError):
    """Base for failures arising during numeric work on valid inputs."""


class DegenerateInputError(ComputationError):
    """Input is structurally valid but carries no usable signal
    (e.g. no edges, or every feature-distinction sum is zero)."""


class InsufficientDataError(ComputationError):
    """Too few samples for the requested reduction."""


class DomainError(ComputationError):
    """Argument outside the mathematical domain (negative state,
    non-positive theta, unsupported exponent)."""


class SingularityError(ComputationError):
    """A closed-form denominator vanished. Names the factor."""

    def __init__(self, factor):
        super().__init__(f"closed-form denominator vanished: {factor} = 0")
        self.factor = factor


class DivergenceError(ComputationError):
    """Integration produced a non-finite state. Carries the time stamp."""

    def __init__(self, time):
        super().__init__(f"state became non-finite at t = {time:.6g}")
        self.time = time


class ScaleError(ComputationError):
    """Problem size exceeds the dense-computation guard."""


class NumericError(ComputationError):
    """A numeric routine produced non-finite output."""
