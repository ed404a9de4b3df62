"""
Custom exception hierarchy for the engine.

Every error carries the process exit code it maps to, so the CLI error
handler can translate failures without knowing each type:
- 2: the input (problem file, expression, configuration) is unusable
- 3: an internal verification failed, the result must not be trusted
"""

from app.constants import EXIT_INPUT_ERROR, EXIT_VERIFICATION_FAILURE


class AppException(Exception):
    """
    Base exception for all engine errors.

    Attributes:
        message: Human-readable error message
        exit_code: Process exit code for the CLI
        details: Optional additional error information
    """

    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_VERIFICATION_FAILURE,
        details: dict = None
    ):
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}


class InputError(AppException):
    """Base class for errors caused by user input (exit code 2)."""

    def __init__(self, message: str, details: dict = None):
        super().__init__(message=message, exit_code=EXIT_INPUT_ERROR, details=details)


class ValidationError(InputError):
    """
    Raised when a problem-file field fails validation.

    Examples:
        - order below 1
        - unknown frequency keyword
        - negative ansatz degree
    """

    def __init__(self, field: str, message: str):
        super().__init__(
            message=f"Validation error on '{field}': {message}",
            details={'field': field, 'validation_message': message}
        )
        self.field = field


class ConfigurationError(InputError):
    """
    Raised when the runtime configuration is invalid.

    The engine refuses to start with a bad configuration.

    Examples:
        - NOETHER_SEED is not an integer
        - NOETHER_MAX_ORDER outside the supported range
    """

    def __init__(self, message: str):
        super().__init__(message=f"Configuration error: {message}")


class ProblemFileError(InputError):
    """Raised when a problem file cannot be read or is malformed."""

    def __init__(self, message: str, line: int = None, path: str = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(
            message=f"Problem file error{where}: {message}",
            details={'line': line, 'path': path}
        )
        self.line = line
        self.path = path


# Expression language

class ExpressionError(InputError):
    """Base class for errors raised while building or evaluating expressions."""


class ExpressionSyntaxError(ExpressionError):
    """Raised when expression text does not follow the grammar."""

    def __init__(self, text: str, position: int, expected: str):
        super().__init__(
            message=f"Syntax error at position {position}: expected {expected} in '{text}'",
            details={'position': position, 'expected': expected}
        )
        self.position = position
        self.expected = expected


class UnknownIdentifierError(ExpressionError):
    """Raised for an identifier that is neither t, a coordinate nor a parameter."""

    def __init__(self, name: str):
        super().__init__(
            message=f"Unknown identifier '{name}'",
            details={'identifier': name}
        )
        self.name = name


class NonRationalExponentError(ExpressionError):
    """Raised when an exponent is not a literal rational p/q."""

    def __init__(self, text: str):
        super().__init__(message=f"Exponent must be a rational p/q, got '{text}'")


class NonlinearTransArgumentError(ExpressionError):
    """Raised when a sin/cos/exp argument is not linear in t and coordinates."""

    def __init__(self, function: str, argument: str):
        super().__init__(
            message=f"Argument of {function} must be linear in t and coordinates, got '{argument}'",
            details={'function': function}
        )


class NonMonomialPowerError(ExpressionError):
    """Raised when a fractional or negative power is applied to a non-monomial."""

    def __init__(self, exponent, reason: str = "base is not a single term"):
        super().__init__(message=f"Cannot raise to power {exponent}: {reason}")


class OrderCapExceeded(ExpressionError):
    """Raised when a derivative would exceed the global jet-order cap."""

    def __init__(self, order: int, cap: int):
        super().__init__(
            message=f"Jet order {order} exceeds the configured cap {cap}",
            details={'order': order, 'cap': cap}
        )
        self.order = order
        self.cap = cap


class DomainError(ExpressionError):
    """Raised when numeric evaluation leaves the real domain."""


class UnboundJetVarError(ExpressionError):
    """Raised when a jet variable has no value during evaluation."""

    def __init__(self, name: str):
        super().__init__(message=f"No value bound for jet variable {name}")
        self.name = name


# Symmetry and verification

class SymmetryError(AppException):
    """Raised when a symmetry computation receives unusable data."""

    def __init__(self, message: str):
        super().__init__(message=f"Symmetry error: {message}")


class VerificationFailure(AppException):
    """
    Raised when an internal postcondition fails.

    Examples:
        - a nullspace vector does not satisfy the determining identity
        - the bracket and the general charge formula disagree
    """

    def __init__(self, message: str, details: dict = None):
        super().__init__(
            message=f"Verification failure: {message}",
            exit_code=EXIT_VERIFICATION_FAILURE,
            details=details
        )


class DegeneratePointSet(VerificationFailure):
    """Raised when sampled points cannot decide span membership."""

    def __init__(self, points: int):
        super().__init__(
            f"span membership undecided on {points} sample points",
            details={'points': points}
        )


# Point transformations

class TransformError(InputError):
    """Base class for point-transformation errors."""


class NonInvertibleTimeFactor(TransformError):
    """Raised when dt/dt' is not a single invertible term."""

    def __init__(self, factor: str):
        super().__init__(message=f"dt/dt' = {factor} is not a single invertible term")


class SubstitutionDomainError(TransformError):
    """Raised when a substitution leaves the representable class."""


class InvalidTransformationError(TransformError):
    """Raised when a point transformation is degenerate or malformed."""


# Numeric reduction

class NumericError(InputError):
    """Base class for errors raised while reducing or integrating equations."""


class DegenerateLeadingCoefficient(NumericError):
    """Raised when the highest-derivative coefficient matrix is singular."""

    def __init__(self, determinant: float):
        super().__init__(
            message=f"Leading coefficient matrix is singular (|det| = {determinant:.3e})",
            details={'determinant': determinant}
        )


class NotReducibleError(NumericError):
    """Raised when the equations are not linear in their highest derivatives."""
