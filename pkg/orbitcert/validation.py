"""Input validation for orbitcert.

This module provides validation functions for every numeric input an
operation accepts:
- Matrix entries (finite, rectangular, non-empty)
- Shapes (square, matching dimensions, even block dimension)
- Exponent regimes (p > 2, 0 < q < 2, p >= 1, ...)
- Eigenvalue rank indices of the Weyl-type corollaries
- Seeds

All validation functions return ValidationResult with:
- valid: bool (True if input passes validation)
- error_message: Optional[str] (Human-readable error if validation fails)
- sanitized_value: Optional[Any] (Normalized value ready for use)

Operations turn a failed result into the matching OrbitCertError subclass
with ``require``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
import math
from typing import Any, Optional

import numpy as np

from .errors import OrbitCertError

U64_MAX: int = 2**64 - 1


@dataclass
class ValidationResult:
    """Result of input validation.

    Attributes:
        valid: True if input passes validation rules
        error_message: Human-readable error message (None if valid)
        sanitized_value: Cleaned/normalized value ready for use (None if invalid)
    """

    valid: bool
    error_message: Optional[str] = None
    sanitized_value: Optional[Any] = None


class Regime(StrEnum):
    """Exponent regimes the statements are split into."""

    POSITIVE = "positive"  # p > 0
    NORM = "norm"  # p >= 1
    AT_LEAST_TWO = "at_least_two"  # p >= 2
    ABOVE_TWO = "above_two"  # p > 2
    BELOW_TWO = "below_two"  # 0 < q < 2
    NOT_TWO = "not_two"  # p > 0, p != 2


_REGIME_MESSAGES: dict[Regime, str] = {
    Regime.POSITIVE: "must be > 0",
    Regime.NORM: "must be >= 1",
    Regime.AT_LEAST_TWO: "must be >= 2",
    Regime.ABOVE_TWO: "must be > 2",
    Regime.BELOW_TWO: "must satisfy 0 < q < 2",
    Regime.NOT_TWO: "must be > 0 and != 2 (p = 2 is the exact parallelogram law)",
}


def require(result: ValidationResult, error_cls: type[OrbitCertError]) -> Any:
    """Return the sanitized value or raise ``error_cls`` with the validation message."""
    if not result.valid:
        raise error_cls(result.error_message or "validation failed")
    return result.sanitized_value


def validate_matrix_entries(data: Any) -> ValidationResult:
    """Validate raw matrix data.

    Validation rules:
    - Convertible to a 2-D complex array
    - At least one row and one column
    - All entries finite (no NaN/Inf)

    Args:
        data: Array-like matrix data

    Returns:
        ValidationResult with sanitized_value=complex128 ndarray (a copy)
    """
    try:
        array = np.array(data, dtype=np.complex128)
    except (TypeError, ValueError) as err:
        return ValidationResult(
            valid=False,
            error_message=f"Matrix entries must be numeric: {err}",
        )

    if array.ndim != 2:
        return ValidationResult(
            valid=False,
            error_message=f"Matrix must be 2-dimensional, got {array.ndim} dimension(s)",
        )

    rows, cols = array.shape
    if rows < 1 or cols < 1:
        return ValidationResult(
            valid=False,
            error_message=f"Matrix must have positive dimensions, got {rows}x{cols}",
        )

    if not np.all(np.isfinite(array)):
        bad = np.argwhere(~np.isfinite(array))[0]
        return ValidationResult(
            valid=False,
            error_message=f"Matrix entry ({bad[0]}, {bad[1]}) is not finite",
        )

    return ValidationResult(valid=True, sanitized_value=array)


def validate_square(shape: tuple[int, ...], name: str = "matrix") -> ValidationResult:
    """Validate that a shape is square; sanitized_value is the dimension."""
    if len(shape) != 2 or shape[0] != shape[1]:
        return ValidationResult(
            valid=False,
            error_message=f"{name} must be square, got shape {tuple(shape)}",
        )
    return ValidationResult(valid=True, sanitized_value=int(shape[0]))


def validate_same_shape(
    first: tuple[int, ...], second: tuple[int, ...], names: tuple[str, str] = ("A", "B")
) -> ValidationResult:
    """Validate that two shapes agree; sanitized_value is the common shape."""
    if tuple(first) != tuple(second):
        return ValidationResult(
            valid=False,
            error_message=(
                f"{names[0]} and {names[1]} must have the same shape, "
                f"got {tuple(first)} and {tuple(second)}"
            ),
        )
    return ValidationResult(valid=True, sanitized_value=tuple(first))


def validate_even_dimension(dim: int) -> ValidationResult:
    """Validate that a block matrix splits into four equal blocks; sanitized_value is n."""
    if dim % 2 != 0:
        return ValidationResult(
            valid=False,
            error_message=f"Block matrix dimension must be even (2n), got {dim}",
        )
    return ValidationResult(valid=True, sanitized_value=dim // 2)


def validate_exponent(value: Any, regime: Regime, name: str = "p") -> ValidationResult:
    """Validate an exponent against the regime of a statement.

    Args:
        value: Exponent (int, float, or numeric string)
        regime: Regime the statement is stated for
        name: Parameter name for the message (p or q)

    Returns:
        ValidationResult with sanitized_value=float(value)
    """
    try:
        exponent = float(value)
    except (TypeError, ValueError):
        return ValidationResult(
            valid=False,
            error_message=f"{name} must be a real number, got {value!r}",
        )

    if not math.isfinite(exponent):
        return ValidationResult(valid=False, error_message=f"{name} must be finite")

    ok = {
        Regime.POSITIVE: exponent > 0,
        Regime.NORM: exponent >= 1,
        Regime.AT_LEAST_TWO: exponent >= 2,
        Regime.ABOVE_TWO: exponent > 2,
        Regime.BELOW_TWO: 0 < exponent < 2,
        Regime.NOT_TWO: exponent > 0 and exponent != 2,
    }[regime]

    if not ok:
        return ValidationResult(
            valid=False,
            error_message=f"{name} {_REGIME_MESSAGES[regime]}, got {exponent}",
        )

    return ValidationResult(valid=True, sanitized_value=exponent)


def validate_weyl_indices(n: int, j: Any, k: Any, which: str) -> ValidationResult:
    """Validate 0-based eigenvalue indices of the Weyl-type corollaries.

    Validation rules:
    - j, k nonnegative integers
    - cor3 / cor4: j + k + 1 <= n
    - cor5: j <= n - 1 (k is not used and must be 0)

    Returns:
        ValidationResult with sanitized_value=(j, k)
    """
    try:
        j_int = int(j)
        k_int = int(k)
    except (TypeError, ValueError):
        return ValidationResult(valid=False, error_message="Indices j, k must be integers")

    if j_int < 0 or k_int < 0:
        return ValidationResult(
            valid=False,
            error_message=f"Indices must be nonnegative, got j={j_int}, k={k_int}",
        )

    if which in ("cor3", "cor4"):
        if j_int + k_int + 1 > n:
            return ValidationResult(
                valid=False,
                error_message=f"Indices must satisfy j + k + 1 <= n={n}, got j={j_int}, k={k_int}",
            )
    elif which == "cor5":
        if j_int > n - 1:
            return ValidationResult(
                valid=False,
                error_message=f"Index j must be <= n - 1 = {n - 1}, got {j_int}",
            )
        if k_int != 0:
            return ValidationResult(
                valid=False,
                error_message=f"Index k is not used by cor5 and must be 0, got {k_int}",
            )
    else:
        return ValidationResult(
            valid=False,
            error_message=f"Unknown Weyl statement {which!r}; use cor3, cor4 or cor5",
        )

    return ValidationResult(valid=True, sanitized_value=(j_int, k_int))


def validate_seed(seed: Any) -> ValidationResult:
    """Validate a 64-bit unsigned seed (int or decimal string)."""
    try:
        seed_int = int(seed)
    except (TypeError, ValueError):
        return ValidationResult(
            valid=False,
            error_message=f"Seed must be an unsigned 64-bit integer, got {seed!r}",
        )

    if seed_int < 0 or seed_int > U64_MAX:
        return ValidationResult(
            valid=False,
            error_message=f"Seed must be between 0 and {U64_MAX}, got {seed_int}",
        )

    return ValidationResult(valid=True, sanitized_value=seed_int)


def validate_dims(text: str) -> ValidationResult:
    """Parse a dimension selector such as ``1..6`` or ``1,2,3``.

    Returns:
        ValidationResult with sanitized_value=sorted tuple of unique dimensions
    """
    text = text.strip()
    try:
        if ".." in text:
            low, high = text.split("..", 1)
            dims = list(range(int(low), int(high) + 1))
        else:
            dims = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        return ValidationResult(
            valid=False,
            error_message=f"Dimensions must look like '1..6' or '1,2,3', got {text!r}",
        )

    if not dims:
        return ValidationResult(valid=False, error_message="Dimension selector is empty")

    return ValidationResult(valid=True, sanitized_value=tuple(sorted(set(dims))))
