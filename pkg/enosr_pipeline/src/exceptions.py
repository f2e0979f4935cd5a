"""
Exception hierarchy for the ENO-SR interpolation pipeline.

Every error derives from EnosrError and from the builtin that best describes
it, so callers catching ValueError or IndexError keep working.
"""


class EnosrError(Exception):
    """Base class for all pipeline errors."""


class GridError(EnosrError, ValueError):
    """Invalid grid construction input."""


class TooFewNodesError(GridError):
    pass


class NonMonotonicNodesError(GridError):
    pass


class InvalidSigmaError(GridError):
    pass


class StencilOutOfRangeError(EnosrError, IndexError):
    pass


class IntervalIndexError(EnosrError, IndexError):
    pass


class NonpositiveSupError(EnosrError, ValueError):
    pass


class NonpositiveErrorValueError(EnosrError, ValueError):
    pass


class InvalidModeError(EnosrError, ValueError):
    pass


class WrongModeError(EnosrError, ValueError):
    pass


class OutOfDomainError(EnosrError, ValueError):
    pass


class DataFileError(EnosrError, ValueError):
    """Malformed CSV input."""


class ConfigError(EnosrError):
    """Unreadable or malformed configuration file."""
