"""Matrix text format (.cmat) and JSON embedding.

Format:
    line 1:        ``rows cols``
    next rows*cols: ``re im`` in row-major order

Numbers are written with ``repr(float)``, which round-trips exactly and never
depends on the locale.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .const import CMAT_SUFFIX
from .errors import MatrixValidationError, UsageError
from .matrices import ComplexMatrix, MatrixLike, as_complex

_LOGGER = logging.getLogger(__name__)


def validate_cmat_lines(lines: list[str]) -> list[str]:
    """Validate .cmat content line by line.

    Args:
        lines: File content split into lines (blank lines are ignored)

    Returns:
        List of error messages with 1-based line numbers (empty list if valid).

    Validates:
        - Header has two positive integers
        - Exactly rows*cols entry lines follow
        - Each entry line holds two finite decimals
    """
    errors: list[str] = []
    numbered = [(index + 1, line.strip()) for index, line in enumerate(lines) if line.strip()]

    if not numbered:
        return ["line 1: missing header 'rows cols'"]

    header_line, header = numbered[0]
    parts = header.split()
    if len(parts) != 2:
        return [f"line {header_line}: header must be 'rows cols', got {header!r}"]
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        return [f"line {header_line}: header dimensions must be integers, got {header!r}"]
    if rows < 1 or cols < 1:
        return [f"line {header_line}: dimensions must be positive, got {rows}x{cols}"]

    entries = numbered[1:]
    if len(entries) != rows * cols:
        errors.append(
            f"expected {rows * cols} entry lines for a {rows}x{cols} matrix, got {len(entries)}"
        )

    for line_number, text in entries:
        fields = text.split()
        if len(fields) != 2:
            errors.append(f"line {line_number}: entry must be 're im', got {text!r}")
            continue
        try:
            real, imag = float(fields[0]), float(fields[1])
        except ValueError:
            errors.append(f"line {line_number}: entry is not numeric: {text!r}")
            continue
        if not (np.isfinite(real) and np.isfinite(imag)):
            errors.append(f"line {line_number}: entry is not finite: {text!r}")

    return errors


def parse_cmat(text: str, source: str = "<string>") -> ComplexMatrix:
    """Parse .cmat content.

    Raises:
        MatrixValidationError: Listing every offending line
    """
    lines = text.splitlines()
    errors = validate_cmat_lines(lines)
    if errors:
        raise MatrixValidationError(
            f"Invalid matrix file {source}: " + "; ".join(errors),
            details={"source": source, "errors": errors},
        )

    rows_text = [line.split() for line in lines if line.strip()]
    rows, cols = int(rows_text[0][0]), int(rows_text[0][1])
    values = np.array(
        [complex(float(re), float(im)) for re, im in rows_text[1:]], dtype=np.complex128
    )
    return ComplexMatrix(values.reshape(rows, cols))


def format_cmat(matrix: MatrixLike) -> str:
    """Serialize a matrix to .cmat text."""
    data = as_complex(matrix).data
    lines = [f"{data.shape[0]} {data.shape[1]}"]
    lines.extend(f"{value.real!r} {value.imag!r}" for value in data.ravel(order="C").tolist())
    return "\n".join(lines) + "\n"


def read_cmat(path: str | Path) -> ComplexMatrix:
    """Read a .cmat file."""
    path = Path(path)
    if path.suffix != CMAT_SUFFIX:
        _LOGGER.debug("Reading matrix file without %s suffix: %s", CMAT_SUFFIX, path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"Cannot read matrix file {path}: {err}") from err
    matrix = parse_cmat(text, source=str(path))
    _LOGGER.debug("Loaded %dx%d matrix from %s", matrix.rows, matrix.cols, path)
    return matrix


def write_cmat(path: str | Path, matrix: MatrixLike) -> None:
    """Write a .cmat file."""
    path = Path(path)
    try:
        path.write_text(format_cmat(matrix), encoding="utf-8")
    except OSError as err:
        raise UsageError(f"Cannot write matrix file {path}: {err}") from err


# ============================================================================
# JSON embedding
# ============================================================================


def matrix_to_dict(matrix: MatrixLike) -> dict[str, Any]:
    """{"rows", "cols", "entries": [[re, im], ...]} in row-major order."""
    data = as_complex(matrix).data
    return {
        "rows": int(data.shape[0]),
        "cols": int(data.shape[1]),
        "entries": [[value.real, value.imag] for value in data.ravel(order="C").tolist()],
    }


def array_from_dict(payload: Mapping[str, Any]) -> np.ndarray:
    """Inverse of matrix_to_dict; raises MatrixValidationError on malformed payloads."""
    try:
        rows = int(payload["rows"])
        cols = int(payload["cols"])
        entries = payload["entries"]
        values = [complex(float(re), float(im)) for re, im in entries]
    except (KeyError, TypeError, ValueError) as err:
        raise MatrixValidationError(f"Malformed embedded matrix: {err!r}") from err

    if rows < 1 or cols < 1 or len(values) != rows * cols:
        raise MatrixValidationError(
            f"Embedded matrix declares {rows}x{cols} but holds {len(values)} entries"
        )
    return np.array(values, dtype=np.complex128).reshape(rows, cols)
