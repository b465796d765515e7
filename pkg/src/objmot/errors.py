"""Exception hierarchy shared across the toolkit."""


class ObjmotError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(ObjmotError, ValueError):
    """A caller-supplied parameter violates a precondition."""


class GenerationExhaustedError(ObjmotError):
    """Rejection sampling hit its retry limit."""

    def __init__(self, message: str, rejects: int):
        super().__init__(f"{message} (after {rejects} rejected draws)")
        self.rejects = rejects


class NumericalError(ObjmotError):
    """A numerical routine failed beyond recoverable tolerance."""


class UndefinedMetricError(ObjmotError):
    """A metric's denominator is zero; the value is unavailable, not 0."""


class ValidationError(ObjmotError):
    """On-disk data does not conform to the expected layout."""
