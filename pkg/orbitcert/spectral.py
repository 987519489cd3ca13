"""Spectral calculus on Hermitian matrices.

Eigendecompositions with deterministic frames, matrix functions, |A|^p,
Schatten norms and PSD gap measurement. Everything here is a pure function of
its inputs.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
import logging
import math

import numpy as np
import scipy.linalg

from .const import COMMUTE_TOL, ORTHO_TOL, PSD_TOL, RECON_TOL
from .errors import (
    NonCommutingError,
    RegimeError,
    ShapeError,
    SpectralConvergenceError,
    SpectralDomainError,
)
from .matrices import (
    ComplexMatrix,
    HermitianMatrix,
    MatrixLike,
    PsdMatrix,
    SpectralDecomposition,
    as_complex,
    as_hermitian,
    as_psd,
)
from .validation import Regime, require, validate_exponent, validate_square

_LOGGER = logging.getLogger(__name__)

ScalarFunction = Callable[[float], float]

# Eigenvalues closer than this (relative to 1 + spectral norm) share a cluster.
TIE_TOL: float = 1e-12


@dataclass(frozen=True)
class PowerFunction:
    """The scalar function t -> t**exponent on [0, inf).

    Negative arguments (rounding noise of clamped spectra) evaluate as 0.
    """

    exponent: float

    def __call__(self, t: float) -> float:
        return max(float(t), 0.0) ** self.exponent

    @property
    def convex(self) -> bool:
        return self.exponent >= 1

    @property
    def concave(self) -> bool:
        return self.exponent <= 1

    @property
    def name(self) -> str:
        return f"t^{self.exponent:g}"


# ============================================================================
# Decompositions
# ============================================================================


def _eigh(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigh with a fallback driver; raises SpectralConvergenceError."""
    try:
        return scipy.linalg.eigh(data, driver="evr")
    except (np.linalg.LinAlgError, ValueError) as err:
        _LOGGER.warning("eigh (evr) failed: %s; retrying with the QR driver", err)
    try:
        return scipy.linalg.eigh(data, driver="ev")
    except (np.linalg.LinAlgError, ValueError) as err:
        raise SpectralConvergenceError(
            f"Hermitian eigensolver did not converge: {err}", residual=math.inf
        ) from err


def _canonical_cluster_basis(vectors: np.ndarray) -> np.ndarray:
    """Basis of span(vectors) that depends only on the span (pivoted QR of the projector)."""
    rank = vectors.shape[1]
    projector = vectors @ vectors.conj().T
    q, _, _ = scipy.linalg.qr(projector, pivoting=True)
    return q[:, :rank]


def _normalize_columns(vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Phase-normalize columns; returns (vectors, index of largest-modulus entry)."""
    pivots = np.argmax(np.abs(vectors), axis=0)
    phases = vectors[pivots, np.arange(vectors.shape[1])]
    vectors = vectors * (np.abs(phases) / phases)
    return vectors, pivots


def spectral_decomposition(matrix: MatrixLike) -> SpectralDecomposition:
    """Eigendecomposition with nonincreasing eigenvalues and a deterministic frame.

    Within a cluster of (numerically) equal eigenvalues the eigenspace basis is
    rebuilt from the cluster projector, ordered by the index of each vector's
    largest-modulus component and phase-normalized so that component is real
    positive.

    Args:
        matrix: Hermitian input

    Returns:
        SpectralDecomposition satisfying the unitarity and reconstruction bounds

    Raises:
        SpectralConvergenceError: Eigensolver failed or the residual is too large
    """
    hermitian = as_hermitian(matrix)
    data = hermitian.data
    values, vectors = _eigh(data)
    values = values[::-1].copy()
    vectors = vectors[:, ::-1].copy()

    scale = 1.0 + float(np.max(np.abs(values)))
    start = 0
    dim = values.shape[0]
    while start < dim:
        stop = start + 1
        while stop < dim and values[start] - values[stop] <= TIE_TOL * scale:
            stop += 1
        block = vectors[:, start:stop]
        if stop - start > 1:
            block = _canonical_cluster_basis(block)
            values[start:stop] = np.mean(values[start:stop])
        block, pivots = _normalize_columns(block)
        order = np.argsort(pivots, kind="stable")
        vectors[:, start:stop] = block[:, order]
        start = stop

    defect = float(np.max(np.abs(vectors.conj().T @ vectors - np.eye(dim))))
    residual = float(np.max(np.abs((vectors * values) @ vectors.conj().T - data)))
    norm = float(np.max(np.abs(values)))
    if defect > ORTHO_TOL or residual > RECON_TOL * (1.0 + norm):
        raise SpectralConvergenceError(
            f"Eigendecomposition residual {residual:.3e} (orthonormality {defect:.3e}) "
            "exceeds tolerance",
            residual=max(residual, defect),
        )

    return SpectralDecomposition(eigenvalues=values, frame=ComplexMatrix(vectors))


def eigenvalues_desc(matrix: MatrixLike) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, nonincreasing, without a frame."""
    return as_hermitian(matrix).eigenvalues()


def apply_spectral_function(matrix: MatrixLike, g: ScalarFunction) -> HermitianMatrix:
    """Evaluate g(P) = frame diag(g(lambda)) frame* for a PSD matrix.

    Eigenvalues are clamped at 0 before g is applied.

    Raises:
        SpectralDomainError: g is not finite on some eigenvalue
    """
    psd = as_psd(matrix)
    decomposition = spectral_decomposition(psd)
    clamped = np.maximum(decomposition.eigenvalues, 0.0)

    mapped = np.empty_like(clamped)
    for index, eigenvalue in enumerate(clamped):
        try:
            value = float(g(float(eigenvalue)))
        except (ValueError, ZeroDivisionError, OverflowError) as err:
            raise SpectralDomainError(eigenvalue, repr(err)) from err
        if not math.isfinite(value):
            raise SpectralDomainError(eigenvalue, value)
        mapped[index] = value

    frame = decomposition.frame.data
    return HermitianMatrix((frame * mapped) @ frame.conj().T)


def matrix_abs_power(matrix: MatrixLike, p: float) -> PsdMatrix:
    """|A|^p = (A*A)^{p/2}.

    p = 2 returns A*A directly; other exponents go through the clamped
    spectral route.
    """
    a = as_complex(matrix)
    require(validate_square(a.shape, "A"), ShapeError)
    exponent = require(validate_exponent(p, Regime.POSITIVE), RegimeError)

    gram = a.data.conj().T @ a.data
    if exponent == 2.0:
        return PsdMatrix(gram)
    return PsdMatrix(apply_spectral_function(PsdMatrix(gram), PowerFunction(exponent / 2)).data)


def singular_values(matrix: MatrixLike) -> np.ndarray:
    """Singular values, nonincreasing."""
    return scipy.linalg.svdvals(as_complex(matrix).data)


def trace_abs_power(matrix: MatrixLike, p: float) -> float:
    """Tr |A|^p = sum of sigma_j^p (any p > 0)."""
    exponent = require(validate_exponent(p, Regime.POSITIVE), RegimeError)
    return float(np.sum(singular_values(matrix) ** exponent))


def schatten_norm(matrix: MatrixLike, p: float) -> float:
    """Schatten p-norm (sum sigma_j^p)^{1/p}; p = inf gives the spectral norm."""
    sigma = singular_values(matrix)
    if math.isinf(p) and p > 0:
        return float(sigma[0])
    exponent = require(validate_exponent(p, Regime.NORM), RegimeError)
    return float(np.sum(sigma**exponent) ** (1.0 / exponent))


def _require_same_dim(left: HermitianMatrix, right: HermitianMatrix) -> None:
    if left.dim != right.dim:
        raise ShapeError(f"Dimension mismatch: {left.dim} vs {right.dim}")


def psd_gap(left: MatrixLike, right: MatrixLike) -> float:
    """lambda_min(R - L); L <= R is certified when this is >= -PSD_TOL * (1 + ||R - L||)."""
    lhs = as_hermitian(left)
    rhs = as_hermitian(right)
    _require_same_dim(lhs, rhs)
    return float(scipy.linalg.eigvalsh(rhs.data - lhs.data)[0])


def psd_le(left: MatrixLike, right: MatrixLike, tol: float = PSD_TOL) -> bool:
    """True when L <= R in the Loewner order up to tol."""
    lhs = as_hermitian(left)
    rhs = as_hermitian(right)
    _require_same_dim(lhs, rhs)
    difference = rhs.data - lhs.data
    values = scipy.linalg.eigvalsh(difference)
    norm = float(np.max(np.abs(values)))
    return float(values[0]) >= -tol * (1.0 + norm)


def direct_sum(*blocks: MatrixLike) -> np.ndarray:
    """Block-diagonal array of the given square blocks."""
    return scipy.linalg.block_diag(*(as_complex(block).data for block in blocks))


def commutator_norm(first: MatrixLike, second: MatrixLike) -> float:
    """||XY - YX||_max."""
    x = as_complex(first).data
    y = as_complex(second).data
    return float(np.max(np.abs(x @ y - y @ x)))


def common_frame(
    first: MatrixLike, second: MatrixLike, tol: float = COMMUTE_TOL
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Simultaneously diagonalize two commuting Hermitian matrices.

    Returns:
        (Q, x, y) with X ~ Q diag(x) Q* and Y ~ Q diag(y) Q*

    Raises:
        NonCommutingError: ||XY - YX||_max > tol * (1 + ||X||)(1 + ||Y||)
    """
    x = as_hermitian(first)
    y = as_hermitian(second)
    _require_same_dim(x, y)

    scale = (1.0 + x.spectral_norm()) * (1.0 + y.spectral_norm())
    defect = commutator_norm(x, y)
    if defect > tol * scale:
        raise NonCommutingError(
            f"Inputs do not commute: ||XY - YX|| = {defect:.3e} > {tol * scale:.3e}",
            details={"commutator": defect},
        )

    decomposition = spectral_decomposition(x)
    frame = decomposition.frame.data.copy()
    values = decomposition.eigenvalues
    cluster_tol = max(TIE_TOL, math.sqrt(tol)) * (1.0 + x.spectral_norm())

    start = 0
    dim = values.shape[0]
    while start < dim:
        stop = start + 1
        while stop < dim and values[start] - values[stop] <= cluster_tol:
            stop += 1
        if stop - start > 1:
            block = frame[:, start:stop]
            compressed = block.conj().T @ y.data @ block
            _, rotation = scipy.linalg.eigh((compressed + compressed.conj().T) / 2)
            frame[:, start:stop] = block @ rotation[:, ::-1]
        start = stop

    x_diag = np.real(np.einsum("ij,ik,kj->j", frame.conj(), x.data, frame))
    y_diag = np.real(np.einsum("ij,ik,kj->j", frame.conj(), y.data, frame))
    return frame, x_diag, y_diag
