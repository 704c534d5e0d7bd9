"""Exception types shared across the package.

Every failure mode named in a module contract maps to one class here, so
callers (and the harness) can catch at check-level granularity.
"""


class FreqlabError(Exception):
    """Base class for all package errors."""


class InvalidDomain(FreqlabError):
    """Domain bounds are degenerate (lower >= upper on some axis)."""


class TooCoarse(FreqlabError):
    """Grid resolution below the minimum of 3 points per axis."""


class BoundaryViolation(FreqlabError):
    """A field that must vanish on the boundary does not."""


class ShapeMismatch(FreqlabError):
    """Field length does not match the grid node count."""


class InvalidGeometry(FreqlabError):
    """Observation-ball geometry is inconsistent (e.g. m < r**2)."""


class LinearSolveFailure(FreqlabError):
    """A sparse linear solve did not reach the required residual."""


class Instability(FreqlabError):
    """Time stepping blew up (norm growth beyond the safety factor)."""


class IndexOutOfRange(FreqlabError):
    """Time level outside the range required by a stencil."""


class DegenerateNorm(FreqlabError):
    """A norm that must be positive vanished."""


class DegenerateH(FreqlabError):
    """Weighted mass H underflowed; the frequency function is undefined."""


class TimeOutOfRange(FreqlabError):
    """Caloric weight evaluated outside [0, T]."""


class NotApplicable(FreqlabError):
    """A check's hypothesis fails (reported, not counted as failure)."""


class ZeroObservation(FreqlabError):
    """Observation integral underflowed while the global norm did not."""


class ZeroInitialData(FreqlabError):
    """Theorem hypothesis u(0) != 0 violated."""


class InsufficientFamily(FreqlabError):
    """Too few runs for a family-level fit or sweep."""


class ParseError(FreqlabError):
    """Configuration file could not be parsed."""


class ValidationError(FreqlabError):
    """Configuration parsed but violates an invariant."""


class SchemaError(FreqlabError):
    """Result file misses a required column or field."""


class IoError(FreqlabError):
    """Filesystem failure while emitting results."""
