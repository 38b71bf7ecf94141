"""
Exception hierarchy for the p-adic Darboux toolkit.

Input problems subclass ValueError so callers that only care about
"bad input" can catch that. The CLI maps each family to an exit code.
"""

from typing import Optional


class PadicError(Exception):
    """Root of every error raised by this package."""


class ContextError(PadicError, ValueError):
    """Invalid prime or truncation orders."""


class DimensionError(PadicError, ValueError):
    """Vector, matrix or variable-list lengths do not match."""


class SeriesError(PadicError, ValueError):
    """Incompatible series operands (variables, centers, orders)."""


class CompositionError(SeriesError):
    """Substituted series violate the constant-term precondition."""


class InversionError(SeriesError):
    """A series or polynomial with zero constant term was inverted."""


class FormError(PadicError, ValueError):
    """Malformed or incompatible differential forms and form matrices."""


class HypothesisError(PadicError):
    """An analytic hypothesis required by a construction does not hold."""


class DegenerateFormError(HypothesisError):
    """A 2-form is degenerate at the center of the chart."""


class IdentityError(PadicError):
    """An identity that must hold exactly at truncation failed."""


class StageError(PadicError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: Optional[BaseException] = None):
        self.stage = stage
        self.cause = cause
        detail = f"{type(cause).__name__}: {cause}" if cause else "unknown failure"
        super().__init__(f"stage '{stage}' failed: {detail}")
