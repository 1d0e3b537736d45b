"""Exception hierarchy shared by all fliess-kit modules.

Every domain error raised by the library derives from FliessKitError so the
CLI can map it to exit code 1 and print the class name.
"""


class FliessKitError(Exception):
    """Base class for all domain errors raised by fliess-kit."""


class QueryBeyondTruncation(FliessKitError):
    """A coefficient beyond the stored truncation length was requested.

    Beyond the truncation a coefficient is unknown, not zero; answering
    zero would silently corrupt downstream products.
    """


class TruncationMismatch(FliessKitError):
    """An operand is truncated below the requested output truncation."""


class ComponentMismatch(FliessKitError):
    """Operand component counts or alphabets are incompatible."""


class ProperSeriesError(FliessKitError):
    """A shuffle inverse/quotient was requested for a proper series."""


class NonConvergence(FliessKitError):
    """The degreewise group-inverse sweep failed to fix the coefficients.

    This indicates an implementation bug, not an input condition.
    """


class UnsupportedArity(FliessKitError):
    """Operation restricted to the single-input single-output case."""


class PreconditionUnsatisfiable(FliessKitError):
    """A bound-verification precondition could not be met by rescaling."""


class GridTooCoarse(FliessKitError):
    """An input signal grid has fewer than two points."""


class LoopDiverged(FliessKitError):
    """Feedback-loop Picard iteration increments grew repeatedly."""


class TriangularityViolation(FliessKitError):
    """The level-by-level evolution solve touched an unsolved coefficient."""


class OrderCapExceeded(FliessKitError):
    """A capped Volterra sum left a tail above the requested tolerance."""


class OracleMismatch(FliessKitError):
    """Two independent computations of the same quantity disagree."""


class SeriesSyntaxError(FliessKitError):
    """Malformed series/word/signal text.  Carries a 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateWordError(SeriesSyntaxError):
    """The same (component, word) pair appeared twice in a series file."""
