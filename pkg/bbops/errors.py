"""Exception hierarchy for bbops.

Every error also derives from the builtin it refines, so callers that only
know about ``ValueError``/``RuntimeError`` keep working.
"""


class BbopsError(Exception):
    """Base class for all bbops errors."""


class DomainError(BbopsError, ValueError):
    """An argument lies outside the domain of the operation."""


class QuadratureError(BbopsError, RuntimeError):
    """A Beta-weighted integral could not reach the requested accuracy."""


class UnsupportedVariantError(BbopsError, ValueError):
    """The operator variant does not support the requested operation."""


class DegenerateFitError(BbopsError, ValueError):
    """A log-log fit has fewer than two usable (positive) samples."""


class NotC1Error(BbopsError, ValueError):
    """The function has no registered continuous derivative."""


class NotInWLambdaError(BbopsError, ValueError):
    """The function is not tagged as a member of W_lambda."""


class FunctionParseError(BbopsError, ValueError):
    """A function token does not match the function grammar."""

    def __init__(self, token: str, reason: str):
        self.token = token
        super().__init__(f"Cannot parse function token '{token}': {reason}")


class IngestionError(BbopsError, ValueError):
    """A sampled-function CSV file is missing or malformed."""
