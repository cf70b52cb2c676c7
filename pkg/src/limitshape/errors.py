"""Exception types shared across the toolkit."""


class LimitShapeError(Exception):
    """Base class for all toolkit errors."""


class DomainError(LimitShapeError, ValueError):
    """Input lies outside the domain of an operation."""


class WeightSpecError(LimitShapeError, ValueError):
    """A weight specification string or file could not be parsed."""


class WeightValidationError(LimitShapeError, ValueError):
    """A weight failed the validity requirements of a construction."""


class AdmissibilityError(DomainError):
    """A curve segment violates the admissible-normal condition."""

    def __init__(self, message: str, segment_index: int | None = None):
        super().__init__(message)
        self.segment_index = segment_index


class WindowTooSmallError(LimitShapeError):
    """The construction window does not contain a usable boundary piece."""


class DivergenceError(LimitShapeError):
    """A volume normalization was requested for a divergent weight."""

    def __init__(self, message: str, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class DegenerateWeightError(LimitShapeError):
    """A weight produced a degenerate (zero-volume) body."""


class SamplingError(LimitShapeError):
    """A rejection sampler exhausted its attempt budget."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class EnumerationLimitError(LimitShapeError, ValueError):
    """Exhaustive enumeration was requested beyond its size bound."""


class BoxTooSmallError(LimitShapeError, ValueError):
    """The reflection box is too small for the dual weight to stay positive."""


class ConstructionError(LimitShapeError):
    """An internal construction invariant failed."""
