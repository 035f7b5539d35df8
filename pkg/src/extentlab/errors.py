"""Exception hierarchy shared across the package."""


class ExtentError(Exception):
    """Base class for all extentlab errors."""


class DimensionMismatchError(ExtentError):
    """Operands live in different vector spaces."""


class NormalizationError(ExtentError):
    """A vector that must be unit norm is not."""


class EmptyDictionaryError(ExtentError):
    """A dictionary needs at least one word."""


class SpanError(ExtentError):
    """The dictionary does not span the ambient space."""


class CapacityError(ExtentError):
    """Requested size exceeds what this implementation will materialize."""


class StructureError(ExtentError):
    """Input lacks the combinatorial structure an operation requires."""


class FeasibilityError(ExtentError):
    """A point violates the feasibility tolerance of an analysis routine."""


class SolverError(ExtentError):
    """Numerical breakdown inside the cone solver."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PreconditionError(ExtentError):
    """An analytic precondition on the arguments fails."""


class ParseError(ExtentError):
    """A serialized file cannot be read.

    ``offset`` is the byte offset of the first problem when known.
    """

    def __init__(self, message, offset=None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


class FormatVersionError(ParseError):
    """File carries an unsupported format version."""
