"""Exception hierarchy.

The CLI maps the three top-level families onto exit codes:
configuration -> 2, convergence -> 3, resource -> 4.
"""


class ExnarrowError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ExnarrowError, ValueError):
    """Invalid physical or numerical parameters."""


class ResourceError(ExnarrowError):
    """A requested computation exceeds a configured size cap."""


class ConvergenceError(ExnarrowError):
    """A numerical procedure failed to reach its accuracy target."""


class IntegratorDivergenceError(ConvergenceError):
    pass


class StepSizeError(ConvergenceError):
    pass


class TruncationError(ConvergenceError):
    """A correlation trace was cut off before it decayed."""


class DimensionError(ExnarrowError, ValueError):
    pass


class RangeError(ExnarrowError, ValueError):
    """A spectral feature sits at (or beyond) the edge of its grid."""


class AmbiguityError(ExnarrowError, ValueError):
    pass


class MetadataMismatchError(ExnarrowError, ValueError):
    """Spectra that should share a bath or aggregate size do not."""
