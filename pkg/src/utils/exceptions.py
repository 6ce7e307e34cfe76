"""
Custom exception classes for the concentra verification lab.

Every domain error carries an error code for structured logs and an
exit code that the CLI returns unchanged (1 runtime error, 2 refusal).
"""

from typing import Optional, Any


class ConcentraException(Exception):
    """
    Base exception class for the verification lab.

    All custom exceptions inherit from this base class.
    """

    exit_code: int = 1

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Any] = None,
    ) -> None:
        """
        Initialize base exception.

        Args:
            message: Error message
            error_code: Optional error code for categorization
            details: Additional error details
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.details = details

    def __str__(self) -> str:
        """String representation of exception."""
        if self.error_code:
            return f"[{self.error_code}] {self.message}"
        return self.message


class ValidationError(ConcentraException):
    """
    Exception raised when an input value breaks a domain invariant.

    Used for negative weights, probabilities outside [0, 1],
    malformed vertices and similar data problems.
    """

    exit_code = 2

    def __init__(
        self, message: str, field: Optional[str] = None, value: Optional[Any] = None
    ) -> None:
        """
        Initialize validation error.

        Args:
            message: Error message
            field: Field that failed validation
            value: Value that failed validation
        """
        super().__init__(message, "VALIDATION_ERROR", {"field": field, "value": value})
        self.field = field
        self.value = value


class DimensionError(ValidationError):
    """Raised on dimension mismatches and out-of-range coordinate indices."""

    def __init__(self, message: str, expected: Optional[int] = None, actual: Optional[Any] = None) -> None:
        super().__init__(message, "dimension", actual)
        self.error_code = "DIMENSION_ERROR"
        self.expected = expected
        self.actual = actual


class EnumerationLimitError(ConcentraException):
    """
    Exception raised when an exhaustive computation exceeds its guard.

    The cube verifiers enumerate all 2^m vertices; the guard keeps
    that within desk-scale memory and time.
    """

    exit_code = 2

    def __init__(self, message: str, limit: Optional[int] = None, requested: Optional[int] = None) -> None:
        """
        Initialize enumeration limit error.

        Args:
            message: Error message
            limit: Configured ceiling
            requested: Requested size
        """
        super().__init__(
            message, "ENUMERATION_LIMIT", {"limit": limit, "requested": requested}
        )
        self.limit = limit
        self.requested = requested


class PreconditionError(ConcentraException):
    """
    Exception raised when an operation's precondition does not hold.

    The verifier refuses to certify rather than report a vacuous result.
    """

    exit_code = 2

    def __init__(self, message: str, condition: Optional[str] = None, details: Optional[Any] = None) -> None:
        super().__init__(message, "PRECONDITION_FAILED", {"condition": condition, "details": details})
        self.condition = condition


class MonotonicityError(PreconditionError):
    """Raised when Z or some V_i decreases along a coordinate flip."""

    def __init__(self, message: str, witness: Optional[Any] = None) -> None:
        super().__init__(message, "monotone", witness)
        self.witness = witness


class GuardError(ConcentraException):
    """
    Exception raised when a numeric regime guard is breached.

    Examples: np at or below e^e for the event-E thresholds, or a
    graph too large for cycle enumeration at the requested k.
    """

    exit_code = 2

    def __init__(self, message: str, guard: Optional[str] = None, value: Optional[Any] = None) -> None:
        super().__init__(message, "GUARD_BREACH", {"guard": guard, "value": value})
        self.guard = guard
        self.value = value


class EmptySetError(ConcentraException):
    """Raised when a convex distance is requested to an empty vertex set."""

    exit_code = 2

    def __init__(self, message: str = "Vertex set A must be nonempty") -> None:
        super().__init__(message, "EMPTY_SET")


class SolverError(ConcentraException):
    """
    Exception raised when the min-norm-point solver does not converge.

    Non-convergence beyond the iteration cap signals a solver bug,
    not a data condition.
    """

    def __init__(self, message: str, iterations: Optional[int] = None) -> None:
        super().__init__(message, "SOLVER_ERROR", {"iterations": iterations})
        self.iterations = iterations


class ReportError(ConcentraException):
    """
    Exception raised for report export and parsing failures.
    """

    def __init__(self, message: str, path: Optional[str] = None) -> None:
        """
        Initialize report error.

        Args:
            message: Error message
            path: Output or input path involved
        """
        super().__init__(message, "REPORT_ERROR", {"path": path})
        self.path = path


class ConfigurationError(ConcentraException):
    """
    Exception raised for configuration errors.

    Used when lab or experiment configuration is invalid.
    """

    def __init__(self, message: str, config_key: Optional[str] = None) -> None:
        """
        Initialize configuration error.

        Args:
            message: Error message
            config_key: Configuration key that caused the error
        """
        super().__init__(message, "CONFIG_ERROR", {"config_key": config_key})
        self.config_key = config_key
