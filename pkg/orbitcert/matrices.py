"""Validated dense matrix types.

Every type stores a read-only complex128 copy of its entries, so instances can
be shared across worker threads without copying.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
import logging
from typing import Any, Union

import numpy as np
import scipy.linalg

from .const import HERMITIAN_TOL, ORTHO_TOL, PSD_TOL
from .errors import MatrixValidationError, ShapeError
from .validation import require, validate_matrix_entries, validate_square

_LOGGER = logging.getLogger(__name__)


def _frozen_copy(array: np.ndarray) -> np.ndarray:
    copy = np.array(array, dtype=np.complex128, copy=True)
    copy.flags.writeable = False
    return copy


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    """Dense complex matrix with finite entries.

    Attributes:
        data: Read-only complex128 array of shape (rows, cols)
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        array = require(validate_matrix_entries(self.data), MatrixValidationError)
        object.__setattr__(self, "data", _frozen_copy(array))

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def entries(self) -> Iterator[complex]:
        """Iterate entries in row-major order."""
        for value in self.data.ravel(order="C"):
            yield complex(value)

    def to_array(self) -> np.ndarray:
        """Return a writable copy of the entries."""
        return np.array(self.data, copy=True)

    def adjoint(self) -> ComplexMatrix:
        return ComplexMatrix(self.data.conj().T)

    def orthonormality_defect(self) -> float:
        """Return ||T*T - I||_max."""
        gram = self.data.conj().T @ self.data
        return float(np.max(np.abs(gram - np.eye(self.cols))))

    def is_unitary(self, tol: float = ORTHO_TOL) -> bool:
        return self.is_square and self.orthonormality_defect() <= tol

    def is_isometry(self, tol: float = ORTHO_TOL) -> bool:
        return self.rows > self.cols and self.orthonormality_defect() <= tol

    def spectral_norm(self) -> float:
        return float(scipy.linalg.norm(self.data, 2))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.data)))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(shape={self.shape})"


@dataclass(frozen=True, eq=False)
class HermitianMatrix(ComplexMatrix):
    """Square matrix equal to its adjoint within HERMITIAN_TOL.

    The stored entries are exactly symmetrized: (H + H*) / 2.
    """

    def __post_init__(self) -> None:
        super().__post_init__()
        require(validate_square(self.data.shape, type(self).__name__), ShapeError)

        deviation = float(np.max(np.abs(self.data - self.data.conj().T)))
        bound = HERMITIAN_TOL * (1.0 + self.max_abs())
        if deviation > bound:
            raise MatrixValidationError(
                f"Matrix is not Hermitian: max |h_ij - conj(h_ji)| = {deviation:.3e} "
                f"exceeds {bound:.3e}",
                details={"deviation": deviation},
            )

        object.__setattr__(self, "data", _frozen_copy((self.data + self.data.conj().T) / 2))

    @property
    def dim(self) -> int:
        return self.rows

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues sorted nonincreasing (no frame)."""
        return scipy.linalg.eigvalsh(self.data)[::-1].copy()

    def min_eigenvalue(self) -> float:
        return float(scipy.linalg.eigvalsh(self.data, subset_by_index=[0, 0])[0])


@dataclass(frozen=True, eq=False)
class PsdMatrix(HermitianMatrix):
    """Hermitian matrix whose smallest eigenvalue is >= -PSD_TOL * (1 + ||P||).

    Attributes:
        min_eig: Smallest eigenvalue found at construction (validation record)
    """

    min_eig: float = field(default=float("nan"))

    def __post_init__(self) -> None:
        super().__post_init__()
        eigenvalues = scipy.linalg.eigvalsh(self.data)
        lowest = float(eigenvalues[0])
        norm = float(np.max(np.abs(eigenvalues)))
        bound = -PSD_TOL * (1.0 + norm)
        if lowest < bound:
            raise MatrixValidationError(
                f"Matrix is not positive semidefinite: min eigenvalue {lowest:.6e} < {bound:.3e}",
                details={"min_eigenvalue": lowest},
            )
        object.__setattr__(self, "min_eig", lowest)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues in nonincreasing order with the matching orthonormal frame.

    Attributes:
        eigenvalues: Read-only float array, nonincreasing
        frame: Unitary whose j-th column is the eigenvector of eigenvalues[j]
    """

    eigenvalues: np.ndarray
    frame: ComplexMatrix

    def __post_init__(self) -> None:
        values = np.array(self.eigenvalues, dtype=np.float64, copy=True)
        if values.ndim != 1 or values.shape[0] != self.frame.cols or not self.frame.is_square:
            raise ShapeError(
                f"Frame of shape {self.frame.shape} does not match {values.shape[0]} eigenvalues"
            )
        values.flags.writeable = False
        object.__setattr__(self, "eigenvalues", values)

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def ascending(self) -> np.ndarray:
        """Eigenvalues in nondecreasing order."""
        return self.eigenvalues[::-1].copy()

    def reconstruct(self) -> np.ndarray:
        frame = self.frame.data
        return (frame * self.eigenvalues) @ frame.conj().T


MatrixLike = Union[ComplexMatrix, np.ndarray, Any]


def as_complex(value: MatrixLike) -> ComplexMatrix:
    """Coerce array-like input to ComplexMatrix (no copy for existing instances)."""
    if isinstance(value, ComplexMatrix):
        return value
    return ComplexMatrix(value)


def as_hermitian(value: MatrixLike) -> HermitianMatrix:
    if isinstance(value, HermitianMatrix):
        return value
    if isinstance(value, ComplexMatrix):
        return HermitianMatrix(value.data)
    return HermitianMatrix(value)


def as_psd(value: MatrixLike) -> PsdMatrix:
    if isinstance(value, PsdMatrix):
        return value
    if isinstance(value, ComplexMatrix):
        return PsdMatrix(value.data)
    return PsdMatrix(value)


def require_square_pair(
    first: MatrixLike, second: MatrixLike
) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Coerce two operands and check they are square of the same dimension."""
    a = as_complex(first)
    b = as_complex(second)
    require(validate_square(a.shape, "A"), ShapeError)
    require(validate_square(b.shape, "B"), ShapeError)
    if a.shape != b.shape:
        raise ShapeError(f"A and B must have the same shape, got {a.shape} and {b.shape}")
    return a, b
