"""Exception hierarchy shared by every subpackage."""
from typing import Optional, Sequence


class UQEvoError(Exception):
    """Base class for all errors raised by the package."""


class ConfigError(UQEvoError):
    """Invalid or incomplete configuration."""


class UsageError(UQEvoError):
    """Bad command-line usage (exit status 2)."""


class DatasetError(UQEvoError):
    """Dataset ingestion, validation or split failure."""


class EstimatorError(UQEvoError):
    """Invalid estimator parameters or unknown catalog feature."""


class DSLError(UQEvoError):
    """Base class for candidate-language errors."""


class DSLSyntaxError(DSLError):
    """Source text does not match the grammar."""

    def __init__(self, message: str, offset: int, expected: Sequence[str] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"syntax error at offset {offset}: {message}"
        if self.expected:
            detail += f" (expected {', '.join(repr(e) for e in self.expected)})"
        super().__init__(detail)


class DSLNameError(DSLError):
    """Unknown identifier or function, or an illegal binding."""


class DSLTypeError(DSLError):
    """Scalar/array type mismatch."""


class UnknownChannelError(DSLError):
    """A program references a channel the sample does not carry."""

    def __init__(self, channel: str):
        self.channel = channel
        super().__init__(f"unknown channel '{channel}'")


class MetricError(UQEvoError):
    """Metric undefined for the given inputs."""


class StatsError(UQEvoError):
    """Statistical procedure could not be carried out."""


class MutationClientError(UQEvoError):
    """A proposal request failed after its retry budget."""

    def __init__(self, message: str, attempts: int = 1, status_code: Optional[int] = None):
        self.attempts = attempts
        self.status_code = status_code
        super().__init__(message)


class RunStoreError(UQEvoError):
    """Run directory missing, unwritable or corrupt."""


class EvolutionError(UQEvoError):
    """The search loop cannot start or continue."""
