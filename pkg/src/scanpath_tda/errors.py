"""Exception types shared across the package.

Everything raised on bad input or bad configuration derives from
``PipelineError`` so the command line layer can map it to exit code 1;
anything else escaping is an internal error (exit code 2).
"""


class PipelineError(Exception):
    """Base class for validation and data errors raised by this package."""


class SchemaError(PipelineError):
    """A required CSV column is missing or the header is unreadable."""


class ParseError(PipelineError):
    """A cell could not be parsed; the message carries the row number."""


class ValidationError(PipelineError):
    """Structurally valid input violating an invariant (e.g. duplicate onsets)."""


class DegenerateRangeError(PipelineError):
    """A value range of width zero where a positive width is required."""


class NonFiniteResultError(PipelineError):
    """A filtration value came out infinite or NaN (padding precondition breach)."""


class TieUnresolvedError(PipelineError):
    """Two adjacent vertices share a filtration value (uncollapsed plateau)."""


class UnresolvedDomainError(PipelineError):
    """An image spec with a fit-from-data domain was used before fitting."""


class ResolutionMismatchError(PipelineError):
    """Persistence images of different resolutions cannot be assembled."""


class InsufficientDataError(PipelineError):
    """Not enough rows to fit a transform (PCA needs at least two)."""


class EmptyGroupError(PipelineError):
    """An aggregation group contains no vectors."""
