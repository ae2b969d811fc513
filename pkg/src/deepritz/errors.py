"""Exception types shared across the package."""


class DeepRitzError(Exception):
    """Base class for all package errors."""


class ConfigurationError(DeepRitzError):
    """Invalid or inconsistent inputs: bad shapes, bad parameters, bad configs."""


class ValidationError(DeepRitzError):
    """Structurally well-formed input that violates a documented contract."""


class ParseError(DeepRitzError):
    """Malformed serialized document; message carries the location when known."""


class NumericError(DeepRitzError):
    """Non-finite value encountered; ``stage`` names the offending computation."""

    def __init__(self, message: str, stage: str = ""):
        super().__init__(message if not stage else f"{message} (stage: {stage})")
        self.stage = stage


class DomainError(DeepRitzError):
    """Point lies outside the domain of definition."""


class DegenerateInputError(DeepRitzError):
    """Input is too close to a degenerate case (e.g. the zero function)."""


class DivergenceError(DeepRitzError):
    """Optimization diverged; ``step`` is the failing iteration."""

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} at step {step}")
        self.step = step


class SweepAborted(DeepRitzError):
    """A sweep cell failed; ``partial`` holds the records finished so far."""

    def __init__(self, message: str, cell: int, partial, cause: Exception):
        super().__init__(f"{message} (cell {cell}): {cause}")
        self.cell = cell
        self.partial = partial
        self.cause = cause
