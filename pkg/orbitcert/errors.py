"""Centralized error handling and response system for orbitcert.

This module provides:
- The exception hierarchy raised by every operation (each carries a ``code``)
- Error code definitions with user-facing messages and CLI exit codes
- Helper functions for consistent error responses and logging

Architecture:
- OrbitCertError subclasses for typed failures
- ERROR_CODES dictionary mapping codes to messages, troubleshooting, exit codes
- ErrorResponse dataclass for the JSON error payload printed by the CLI
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Optional

from .const import EXIT_CHECK_FAILED, EXIT_NOT_CONVERGED, EXIT_USAGE

_LOGGER = logging.getLogger(__name__)


# ============================================================================
# Exceptions
# ============================================================================


class OrbitCertError(Exception):
    """Base class for all orbitcert failures.

    Attributes:
        code: Machine-readable error code (key of ERROR_CODES).
        message: Human-readable description of this occurrence.
        details: Structured context for logs and JSON responses.
    """

    code: str = "internal_error"

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(message)


class MatrixValidationError(OrbitCertError):
    """Raised when matrix entries or structure violate a type invariant."""

    code = "invalid_matrix"


class ShapeError(OrbitCertError):
    """Raised for non-square inputs or mismatched dimensions."""

    code = "shape_mismatch"


class RegimeError(OrbitCertError):
    """Raised when an exponent lies outside the regime an operation is stated for."""

    code = "invalid_exponent"


class IndexRangeError(OrbitCertError):
    """Raised when eigenvalue rank indices violate their admissibility constraints."""

    code = "index_out_of_range"


class SpectralDomainError(OrbitCertError):
    """Raised when a scalar function is not finite on some eigenvalue."""

    code = "spectral_domain"

    def __init__(self, eigenvalue: float, value: Any):
        self.eigenvalue = float(eigenvalue)
        super().__init__(
            f"Scalar function is not finite at eigenvalue {eigenvalue!r} (got {value!r})",
            details={"eigenvalue": self.eigenvalue},
        )


class SpectralConvergenceError(OrbitCertError):
    """Raised when the Hermitian eigensolver fails; carries the residual."""

    code = "eigensolver_failed"

    def __init__(self, message: str, residual: float):
        self.residual = float(residual)
        super().__init__(message, details={"residual": self.residual})


class DominanceError(OrbitCertError):
    """Raised when eigenvalue dominance fails beyond the allowed slack.

    Attributes:
        ranks: 1-based eigenvalue ranks j with lambda_j(S) > lambda_j(T) + slack.
    """

    code = "dominance_violated"

    def __init__(self, ranks: list[int], excess: list[float]):
        self.ranks = list(ranks)
        self.excess = list(excess)
        super().__init__(
            f"Eigenvalue dominance violated at ranks {self.ranks}",
            details={"ranks": self.ranks, "excess": self.excess},
        )


class NonCommutingError(OrbitCertError):
    """Raised when the exact commuting-case path is given non-commuting inputs."""

    code = "non_commuting"


class CertificateFormatError(OrbitCertError):
    """Raised when a serialized certificate cannot be parsed."""

    code = "invalid_certificate"


class UsageError(OrbitCertError):
    """Raised for command-line or configuration mistakes."""

    code = "usage_error"


class SearchNotConvergedError(OrbitCertError):
    """Raised when a composite construction's key1 step did not converge.

    Orbit-search operations report ``converged=False`` instead of raising.
    """

    code = "search_not_converged"

    def __init__(self, message: str, trace: Any = None):
        self.trace = trace
        details = {"trace": trace.to_dict()} if trace is not None else None
        super().__init__(message, details=details)


# ============================================================================
# Error Code Definitions
# ============================================================================


ERROR_CODES: dict[str, dict[str, Any]] = {
    "invalid_matrix": {
        "message": "Input matrix violates its structural invariants.",
        "troubleshooting": [
            "Check the .cmat file for NaN/Inf entries or a wrong entry count",
            "Hermitian/PSD inputs must be symmetric and nonnegative within tolerance",
        ],
        "exit_code": EXIT_USAGE,
    },
    "shape_mismatch": {
        "message": "Matrix dimensions are incompatible.",
        "troubleshooting": [
            "Both operands must be square and of the same dimension",
        ],
        "exit_code": EXIT_USAGE,
    },
    "invalid_exponent": {
        "message": "Exponent outside the regime of the requested statement.",
        "troubleshooting": [
            "Use p > 2 for the Clarkson-McCarthy refinements",
            "Use 0 < q < 2 for the reversed statements",
            "p = 2 is the exact parallelogram law",
        ],
        "exit_code": EXIT_USAGE,
    },
    "index_out_of_range": {
        "message": "Eigenvalue indices are not admissible.",
        "troubleshooting": [
            "Indices are 0-based with j + k + 1 <= n",
        ],
        "exit_code": EXIT_USAGE,
    },
    "spectral_domain": {
        "message": "Scalar function is undefined on the spectrum.",
        "troubleshooting": [
            "Use a function defined and finite on [0, inf)",
        ],
        "exit_code": EXIT_USAGE,
    },
    "eigensolver_failed": {
        "message": "Hermitian eigensolver did not converge.",
        "troubleshooting": [
            "Rescale the input matrix",
        ],
        "exit_code": EXIT_CHECK_FAILED,
    },
    "dominance_violated": {
        "message": "Eigenvalue dominance needed for the alignment unitary fails.",
        "troubleshooting": [
            "The scalar function may not be monotone convex (or concave)",
            "Near-degenerate spectra may need a larger alignment slack",
        ],
        "exit_code": EXIT_CHECK_FAILED,
    },
    "non_commuting": {
        "message": "Inputs do not commute; the exact commuting path does not apply.",
        "troubleshooting": [
            "Use the 'search' subcommand, which falls back to orbit search",
        ],
        "exit_code": EXIT_USAGE,
    },
    "invalid_certificate": {
        "message": "Certificate file is malformed.",
        "troubleshooting": [
            "Regenerate the certificate with 'construct' or 'search'",
        ],
        "exit_code": EXIT_USAGE,
    },
    "usage_error": {
        "message": "Invalid command-line usage or configuration.",
        "troubleshooting": [
            "Run with --help for the accepted options",
        ],
        "exit_code": EXIT_USAGE,
    },
    "search_not_converged": {
        "message": "Orbit search did not reach the target gap.",
        "troubleshooting": [
            "Increase --restarts or --max-iterations",
            "A miss is not a counterexample: existence is guaranteed in-regime",
        ],
        "exit_code": EXIT_NOT_CONVERGED,
    },
    "internal_error": {
        "message": "An unexpected error occurred.",
        "troubleshooting": [
            "Re-run with --verbose and inspect the log",
        ],
        "exit_code": EXIT_CHECK_FAILED,
    },
}


# ============================================================================
# Response payload
# ============================================================================


@dataclass
class ErrorResponse:
    """JSON error payload the CLI prints on stderr.

    Attributes:
        error_code: Key into ERROR_CODES (e.g. "shape_mismatch")
        message: One-line description for the user
        details: Exception type, offending fields, command context
        timestamp: Unix time of the failure
        troubleshooting: Steps copied from ERROR_CODES
    """

    error_code: str
    message: str
    details: Optional[dict[str, Any]] = None
    timestamp: float = field(default_factory=time.time)
    troubleshooting: Optional[list[str]] = None

    @property
    def exit_code(self) -> int:
        """CLI exit status for this error."""
        return ERROR_CODES.get(self.error_code, ERROR_CODES["internal_error"])["exit_code"]

    def to_dict(self, include_timestamp: bool = True) -> dict[str, Any]:
        """JSON form; the timestamp can be left out for reproducible output."""
        result: dict[str, Any] = {
            "error": self.error_code,
            "message": self.message,
        }
        if include_timestamp:
            result["timestamp"] = self.timestamp

        if self.details:
            result["details"] = self.details

        if self.troubleshooting:
            result["troubleshooting"] = self.troubleshooting

        return result


# ============================================================================
# Building and logging responses
# ============================================================================


def create_error_response(
    error_code: str,
    details: Optional[dict[str, Any]] = None,
    custom_message: Optional[str] = None,
) -> ErrorResponse:
    """ErrorResponse for a code; unknown codes become internal_error.

    custom_message replaces the table message (exceptions pass their own text).
    """
    error_info = ERROR_CODES.get(error_code, ERROR_CODES["internal_error"])

    return ErrorResponse(
        error_code=error_code if error_code in ERROR_CODES else "internal_error",
        message=custom_message or error_info["message"],
        details=details,
        troubleshooting=error_info.get("troubleshooting") or None,
    )


def log_error(
    error_code: str,
    context: Optional[dict[str, Any]] = None,
    exception: Optional[BaseException] = None,
    level: str = "error",
) -> None:
    """Log "[code] message | Context: k=v, ..." at the given level.

    The stack trace of ``exception`` is attached only at level "error".
    """
    log_func = getattr(_LOGGER, level, _LOGGER.error)

    error_info = ERROR_CODES.get(error_code, ERROR_CODES["internal_error"])
    log_message = f"[{error_code}] {error_info['message']}"

    if context:
        context_str = ", ".join(f"{k}={v}" for k, v in context.items())
        log_message += f" | Context: {context_str}"

    if exception is not None and level == "error":
        log_func(log_message, exc_info=exception)
    else:
        log_func(log_message)


def handle_exception(
    exception: BaseException,
    context: Optional[dict[str, Any]] = None,
    fallback_code: str = "internal_error",
) -> ErrorResponse:
    """Map an exception to its ErrorResponse and log it.

    OrbitCertError subclasses carry their own code, message and details and are
    logged as warnings. Anything else becomes ``fallback_code`` and is logged
    with its stack trace. ``context`` is merged into the response details.
    """
    if isinstance(exception, OrbitCertError):
        error_code = exception.code
        details = {"exception_type": type(exception).__name__, **exception.details}
        level = "warning"
        message = exception.message
    else:
        error_code = fallback_code
        details = {"exception_type": type(exception).__name__}
        level = "error"
        message = None

    log_error(error_code, context=context, exception=exception, level=level)

    if context:
        details.update(context)

    return create_error_response(error_code, details=details, custom_message=message)
