"""Exact certificate constructions.

Builders for every certificate that has an explicit construction:
- Eigen-alignment unitaries (the monotone convex/concave averaging step)
- The positive block-matrix decomposition H = U(X (+) 0)U* + V(0 (+) Z)V*
- The isometry parallelogram law and its Cartesian-decomposition corollaries
- The unitary-orbit Clarkson-McCarthy refinement and its direct-sum extension

The step that has no closed form here (superadditivity in the unitary orbit,
``g(X+Y) >= U0 g(X) U0* + V0 g(Y) V0*``) is injected as a ``key1_provider``.
The default provider is the exact commuting path; orbit_search supplies the
general one.
"""

from __future__ import annotations

from collections.abc import Callable
import logging
import math
from typing import TYPE_CHECKING, Optional

import numpy as np
import scipy.linalg

from .certificates import Certificate, Direction, OrbitSide, Transform
from .const import ALIGN_SLACK, PSD_TOL, RECON_TOL
from .errors import (
    DominanceError,
    RegimeError,
    SearchNotConvergedError,
    ShapeError,
    SpectralConvergenceError,
    SpectralDomainError,
    UsageError,
)
from .matrices import (
    ComplexMatrix,
    MatrixLike,
    PsdMatrix,
    as_complex,
    as_hermitian,
    as_psd,
    require_square_pair,
)
from .spectral import (
    PowerFunction,
    ScalarFunction,
    apply_spectral_function,
    common_frame,
    matrix_abs_power,
    spectral_decomposition,
)
from .validation import Regime, require, validate_even_dimension, validate_exponent

if TYPE_CHECKING:
    from .orbit_search import SearchTrace

_LOGGER = logging.getLogger(__name__)

Key1Provider = Callable[
    [PsdMatrix, PsdMatrix, ScalarFunction, bool],
    "tuple[Certificate, Optional[SearchTrace]]",
]

CARTESIAN_READINGS: tuple[str, ...] = ("adjoint", "paired")


def _gram(matrix: np.ndarray) -> np.ndarray:
    """A*A."""
    return matrix.conj().T @ matrix


def _conjugate(transform: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """T M T*."""
    return transform @ matrix @ transform.conj().T


# ============================================================================
# Alignment
# ============================================================================


def frame_alignment(source: MatrixLike, target: MatrixLike) -> ComplexMatrix:
    """W = frame(T) frame(S)*, mapping the k-th eigenvector of S to that of T."""
    s = as_hermitian(source)
    t = as_hermitian(target)
    if s.dim != t.dim:
        raise ShapeError(f"Cannot align dimension {s.dim} with {t.dim}")
    frame_s = spectral_decomposition(s).frame.data
    frame_t = spectral_decomposition(t).frame.data
    return ComplexMatrix(frame_t @ frame_s.conj().T)


def align_unitary(
    source: MatrixLike, target: MatrixLike, slack: float = ALIGN_SLACK
) -> ComplexMatrix:
    """Unitary W with W S W* <= T, given eigenvalue dominance.

    Args:
        source: S (Hermitian)
        target: T (Hermitian, same dimension)
        slack: Allowed excess lambda_j(S) - lambda_j(T), relative to 1 + max |lambda|

    Returns:
        W = frame(T) frame(S)*

    Raises:
        DominanceError: lambda_j(S) > lambda_j(T) + slack at some rank j
    """
    s = as_hermitian(source)
    t = as_hermitian(target)
    if s.dim != t.dim:
        raise ShapeError(f"Cannot align dimension {s.dim} with {t.dim}")

    decomposition_s = spectral_decomposition(s)
    decomposition_t = spectral_decomposition(t)
    values_s = decomposition_s.eigenvalues
    values_t = decomposition_t.eigenvalues
    scale = 1.0 + max(float(np.max(np.abs(values_s))), float(np.max(np.abs(values_t))))

    excess = values_s - values_t
    offending = np.nonzero(excess > slack * scale)[0]
    if offending.size:
        raise DominanceError(
            ranks=[int(j) + 1 for j in offending],
            excess=[float(excess[j]) for j in offending],
        )
    if np.any(excess > 0):
        _LOGGER.debug("Alignment used slack: max excess %.3e", float(np.max(excess)))

    frame_s = decomposition_s.frame.data
    frame_t = decomposition_t.frame.data
    return ComplexMatrix(frame_t @ frame_s.conj().T)


def key2_certificate(
    first: MatrixLike, second: MatrixLike, g: ScalarFunction, convex: bool = True
) -> Certificate:
    """Averaging step for a monotone convex (or concave) g.

    convex:  W g((X+Y)/2) W* <= (g(X) + g(Y))/2
    concave: W g((X+Y)/2) W* >= (g(X) + g(Y))/2

    The certificate's lhs is always W g((X+Y)/2) W*.
    """
    x = as_psd(first)
    y = as_psd(second)
    if x.dim != y.dim:
        raise ShapeError(f"X and Y must share a dimension, got {x.dim} and {y.dim}")

    g_mid = apply_spectral_function(PsdMatrix((x.data + y.data) / 2), g)
    average = (apply_spectral_function(x, g).data + apply_spectral_function(y, g).data) / 2

    if convex:
        w = align_unitary(g_mid, average).data
        direction = Direction.LHS_LE_RHS
    else:
        w = align_unitary(average, g_mid).data.conj().T
        direction = Direction.LHS_GE_RHS

    return Certificate.build(
        "key2",
        [Transform.unitary(w)],
        direction,
        lhs=_conjugate(w, g_mid.data),
        rhs=average,
        terms=[g_mid],
        orbit_side=OrbitSide.LHS,
    )


# ============================================================================
# Exact commuting path of the superadditivity step
# ============================================================================


def _check_g_at_zero(g: ScalarFunction, convex: bool) -> None:
    g0 = float(g(0.0))
    if convex and g0 > 0:
        raise RegimeError(f"Convex superadditivity needs g(0) <= 0, got g(0) = {g0}")
    if not convex and g0 < 0:
        raise RegimeError(f"Concave subadditivity needs g(0) >= 0, got g(0) = {g0}")


def _map_values(values: np.ndarray, g: ScalarFunction) -> np.ndarray:
    mapped = np.empty_like(values)
    for index, value in enumerate(values):
        result = float(g(float(value)))
        if not math.isfinite(result):
            raise SpectralDomainError(value, result)
        mapped[index] = result
    return mapped


def commuting_key1_certificate(
    first: MatrixLike, second: MatrixLike, g: ScalarFunction, convex: bool = True
) -> Certificate:
    """Exact superadditivity certificate for commuting X, Y.

    In a common eigenframe Q the statement is scalar:
        convex, g(0) <= 0:  g(x + y) >= g(x) + g(y)
        concave, g(0) >= 0: g(x + y) <= g(x) + g(y)
    so U0 = V0 = I. The certificate reads g(X+Y) (>=|<=) g(X) + g(Y).

    Raises:
        NonCommutingError: X and Y do not commute within COMMUTE_TOL
    """
    x = as_psd(first)
    y = as_psd(second)
    _check_g_at_zero(g, convex)

    frame, x_values, y_values = common_frame(x, y)
    x_values = np.maximum(x_values, 0.0)
    y_values = np.maximum(y_values, 0.0)
    g_x = _map_values(x_values, g)
    g_y = _map_values(y_values, g)
    g_sum = _map_values(x_values + y_values, g)

    def in_frame(values: np.ndarray) -> np.ndarray:
        return (frame * values) @ frame.conj().T

    g_x_matrix = in_frame(g_x)
    g_y_matrix = in_frame(g_y)
    identity = np.eye(x.dim, dtype=np.complex128)
    return Certificate.build(
        "key1",
        [Transform.unitary(identity), Transform.unitary(identity)],
        Direction.LHS_GE_RHS if convex else Direction.LHS_LE_RHS,
        lhs=in_frame(g_sum),
        rhs=in_frame(g_x + g_y),
        terms=[g_x_matrix, g_y_matrix],
        orbit_side=OrbitSide.RHS,
    )


def commuting_key1_provider(
    first: PsdMatrix, second: PsdMatrix, g: ScalarFunction, convex: bool
) -> tuple[Certificate, None]:
    """Default key1 provider: the exact commuting path (no search trace)."""
    return commuting_key1_certificate(first, second, g, convex), None


def _run_key1(
    provider: Optional[Key1Provider],
    first: PsdMatrix,
    second: PsdMatrix,
    g: ScalarFunction,
    convex: bool,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Call a key1 provider; returns (U0, V0, tol_used)."""
    certificate, trace = (provider or commuting_key1_provider)(first, second, g, convex)
    if trace is not None and not trace.converged:
        raise SearchNotConvergedError(
            f"Superadditivity search did not converge (final gap {trace.final_gap:.3e})",
            trace=trace,
        )
    return (
        certificate.transforms[0].matrix.data,
        certificate.transforms[1].matrix.data,
        certificate.tol_used,
    )


# ============================================================================
# Block decomposition and the isometry parallelogram law
# ============================================================================


def block_decomposition(matrix: MatrixLike) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Split a PSD block matrix [[X, Y], [Y*, Z]] as U(X (+) 0)U* + V(0 (+) Z)V*.

    With S = H^{1/2}, E its first n columns and F its last n, H = EE* + FF*
    where E*E = X and F*F = Z. U aligns the frame of X (+) 0 with that of EE*,
    V aligns 0 (+) Z with FF*.

    Returns:
        (U, V), both 2n x 2n unitary

    Raises:
        MatrixValidationError: H is not PSD
        ShapeError: odd dimension
        SpectralConvergenceError: reconstruction residual above RECON_TOL
    """
    h = as_psd(matrix)
    n = require(validate_even_dimension(h.dim), ShapeError)

    root = apply_spectral_function(h, math.sqrt).data
    e_cols = root[:, :n]
    f_cols = root[:, n:]
    zeros = np.zeros((n, n), dtype=np.complex128)
    x_embedded = scipy.linalg.block_diag(h.data[:n, :n], zeros)
    z_embedded = scipy.linalg.block_diag(zeros, h.data[n:, n:])

    u = frame_alignment(x_embedded, e_cols @ e_cols.conj().T)
    v = frame_alignment(z_embedded, f_cols @ f_cols.conj().T)

    reconstruction = _conjugate(u.data, x_embedded) + _conjugate(v.data, z_embedded)
    residual = float(np.max(np.abs(h.data - reconstruction)))
    bound = RECON_TOL * (1.0 + h.spectral_norm())
    if residual > bound:
        raise SpectralConvergenceError(
            f"Block decomposition residual {residual:.3e} exceeds {bound:.3e}",
            residual=residual,
        )
    _LOGGER.debug("Block decomposition of dimension %d: residual %.3e", h.dim, residual)
    return u, v


def _hadamard_block(n: int) -> np.ndarray:
    identity = np.eye(n, dtype=np.complex128)
    return np.block([[identity, identity], [identity, -identity]]) / math.sqrt(2)


def parallelogram_isometries(first: MatrixLike, second: MatrixLike) -> Certificate:
    """Isometry parallelogram law.

    |A+B|^2 (+) |A-B|^2 = U(|A|^2+|B|^2)U* + V(|A|^2+|B|^2)V*

    with U, V 2n x n isometries, obtained from the block decomposition of
    [[A, B], [B, A]]*[[A, B], [B, A]] conjugated by (1/sqrt 2)[[I, I], [I, -I]].
    """
    a, b = require_square_pair(first, second)
    n = a.rows

    stacked = np.block([[a.data, b.data], [b.data, a.data]])
    u, v = block_decomposition(PsdMatrix(_gram(stacked)))
    hadamard = _hadamard_block(n)
    iso_u = hadamard @ u.data[:, :n]
    iso_v = hadamard @ v.data[:, n:]

    total = _gram(a.data) + _gram(b.data)
    lhs = scipy.linalg.block_diag(_gram(a.data + b.data), _gram(a.data - b.data))
    rhs = _conjugate(iso_u, total) + _conjugate(iso_v, total)
    certificate = Certificate.build(
        "theorem3",
        [Transform.isometry(iso_u), Transform.isometry(iso_v)],
        Direction.EQUALITY,
        lhs=lhs,
        rhs=rhs,
        terms=[total, total],
        orbit_side=OrbitSide.RHS,
    )
    _LOGGER.debug("Parallelogram isometries (n=%d): deviation %.3e", n, -certificate.gap_min_eig)
    return certificate


def cartesian_certificates(
    matrix: MatrixLike,
    reading: str = "adjoint",
    key1_provider: Optional[Key1Provider] = None,
) -> tuple[Certificate, Certificate]:
    """Cartesian-decomposition identity and its square-root companion.

    With Z = X + iY and S = X^2 + Y^2:
        first:  |Z|^2 (+) |Z*|^2 = U S U* + V S V*   (reading="adjoint")
                |Z|^2 (+) |Z|^2  = U S U* + V S V*   (reading="paired")
        second: |Z| (+) |Z*| <= U' sqrt(S) U'* + V' sqrt(S) V'*  (or |Z| (+) |Z|)

    The paired reading composes the second block with the polar unitary of Z.
    The second certificate needs a concave superadditivity step on 2n x 2n
    operators, supplied by ``key1_provider``.
    """
    if reading not in CARTESIAN_READINGS:
        raise UsageError(f"Unknown reading {reading!r}; use one of {CARTESIAN_READINGS}")
    z = as_complex(matrix)
    if not z.is_square:
        raise ShapeError(f"Z must be square, got shape {z.shape}")
    n = z.rows

    real_part = (z.data + z.data.conj().T) / 2
    imag_part = (z.data - z.data.conj().T) / 2j
    base = parallelogram_isometries(real_part, 1j * imag_part)
    iso_u = base.transforms[0].matrix.data
    iso_v = base.transforms[1].matrix.data
    s = base.terms[0].data

    abs_z = matrix_abs_power(z, 1).data
    if reading == "paired":
        polar_unitary, _ = scipy.linalg.polar(z.data)
        twist = scipy.linalg.block_diag(np.eye(n), polar_unitary.conj().T)
        iso_u = twist @ iso_u
        iso_v = twist @ iso_v
        lhs_squared = scipy.linalg.block_diag(_gram(z.data), _gram(z.data))
        lhs_root = scipy.linalg.block_diag(abs_z, abs_z)
    else:
        lhs_squared = scipy.linalg.block_diag(_gram(z.data), _gram(z.data.conj().T))
        lhs_root = scipy.linalg.block_diag(abs_z, matrix_abs_power(z.data.conj().T, 1).data)

    squared = Certificate.build(
        f"cartesian_{reading}",
        [Transform.isometry(iso_u), Transform.isometry(iso_v)],
        Direction.EQUALITY,
        lhs=lhs_squared,
        rhs=_conjugate(iso_u, s) + _conjugate(iso_v, s),
        terms=[s, s],
        orbit_side=OrbitSide.RHS,
    )

    u0, v0, tol = _run_key1(
        key1_provider,
        PsdMatrix(_conjugate(iso_u, s)),
        PsdMatrix(_conjugate(iso_v, s)),
        math.sqrt,
        False,
    )
    root_s = apply_spectral_function(PsdMatrix(s), math.sqrt).data
    outer_u = u0 @ iso_u
    outer_v = v0 @ iso_v
    rooted = Certificate.build(
        f"cartesian_sqrt_{reading}",
        [Transform.isometry(outer_u), Transform.isometry(outer_v)],
        Direction.LHS_LE_RHS,
        lhs=lhs_root,
        rhs=_conjugate(outer_u, root_s) + _conjugate(outer_v, root_s),
        terms=[root_s, root_s],
        orbit_side=OrbitSide.RHS,
        tol=tol,
    )
    return squared, rooted


# ============================================================================
# Composite Clarkson-McCarthy certificates
# ============================================================================


def theorem1_certificate(
    first: MatrixLike,
    second: MatrixLike,
    p: float,
    key1_provider: Optional[Key1Provider] = None,
) -> Certificate:
    """Unitary-orbit refinement of the Clarkson-McCarthy inequality, p > 2.

        U|(A+B)/2|^p U* + V|(A-B)/2|^p V* <= (|A|^p + |B|^p)/2

    With g(t) = t^{p/2}, X = |(A+B)/2|^2 and Y = |(A-B)/2|^2 (so X + Y =
    (|A|^2 + |B|^2)/2), the provider certifies g(X+Y) >= U0 g(X) U0* + V0 g(Y) V0*
    and the averaging step gives W g(X+Y) W* <= (g(|A|^2) + g(|B|^2))/2.
    Then U = W U0 and V = W V0.

    Raises:
        RegimeError: p <= 2
        NonCommutingError: default provider on non-commuting X, Y
        SearchNotConvergedError: provider search did not converge
        DominanceError: averaging step failed
    """
    a, b = require_square_pair(first, second)
    exponent = require(validate_exponent(p, Regime.ABOVE_TWO), RegimeError)
    g = PowerFunction(exponent / 2)

    half_sum = (a.data + b.data) / 2
    half_diff = (a.data - b.data) / 2
    u0, v0, tol = _run_key1(
        key1_provider, PsdMatrix(_gram(half_sum)), PsdMatrix(_gram(half_diff)), g, True
    )

    averaging = key2_certificate(PsdMatrix(_gram(a.data)), PsdMatrix(_gram(b.data)), g, True)
    w = averaging.transforms[0].matrix.data
    u = w @ u0
    v = w @ v0

    plus = matrix_abs_power(half_sum, exponent).data
    minus = matrix_abs_power(half_diff, exponent).data
    certificate = Certificate.build(
        "theorem1",
        [Transform.unitary(u), Transform.unitary(v)],
        Direction.LHS_LE_RHS,
        lhs=_conjugate(u, plus) + _conjugate(v, minus),
        rhs=averaging.rhs,
        terms=[plus, minus],
        orbit_side=OrbitSide.LHS,
        tol=max(tol, PSD_TOL),
    )
    _LOGGER.info(
        "Constructed theorem1 certificate (n=%d, p=%g): gap %.6e",
        a.rows,
        exponent,
        certificate.gap_min_eig,
    )
    return certificate


def direct_sum_cm_certificate(first: MatrixLike, second: MatrixLike, p: float) -> Certificate:
    """Direct-sum extension of the Clarkson-McCarthy inequality, p > 2.

        |(A+B)/2|^p (+) |(A-B)/2|^p <= (1/2){U S U* + V S V*},  S = (|A|^p + |B|^p)/2

    with U, V 2n x n isometries. The isometry parallelogram law gives
    |(A+B)/2|^2 (+) |(A-B)/2|^2 = (Xb + Yb)/2 with Xb = U N U*, Yb = V N V* and
    N = (|A|^2 + |B|^2)/2; the averaging step is applied once on Xb, Yb (W1)
    and once on |A|^2, |B|^2 (W2). The isometries are W1* U W2* and W1* V W2*.
    """
    a, b = require_square_pair(first, second)
    exponent = require(validate_exponent(p, Regime.ABOVE_TWO), RegimeError)
    g = PowerFunction(exponent / 2)

    parallelogram = parallelogram_isometries(a, b)
    iso_u = parallelogram.transforms[0].matrix.data
    iso_v = parallelogram.transforms[1].matrix.data
    mean_square = parallelogram.terms[0].data / 2

    outer = key2_certificate(
        PsdMatrix(_conjugate(iso_u, mean_square)),
        PsdMatrix(_conjugate(iso_v, mean_square)),
        g,
        True,
    )
    inner = key2_certificate(PsdMatrix(_gram(a.data)), PsdMatrix(_gram(b.data)), g, True)
    w1 = outer.transforms[0].matrix.data
    w2 = inner.transforms[0].matrix.data
    s = inner.rhs.data

    new_u = w1.conj().T @ iso_u @ w2.conj().T
    new_v = w1.conj().T @ iso_v @ w2.conj().T
    lhs = scipy.linalg.block_diag(
        matrix_abs_power((a.data + b.data) / 2, exponent).data,
        matrix_abs_power((a.data - b.data) / 2, exponent).data,
    )
    certificate = Certificate.build(
        "direct_sum_cm",
        [Transform.isometry(new_u), Transform.isometry(new_v)],
        Direction.LHS_LE_RHS,
        lhs=lhs,
        rhs=(_conjugate(new_u, s) + _conjugate(new_v, s)) / 2,
        terms=[s / 2, s / 2],
        orbit_side=OrbitSide.RHS,
    )
    _LOGGER.info(
        "Constructed direct_sum_cm certificate (n=%d, p=%g): gap %.6e",
        a.rows,
        exponent,
        certificate.gap_min_eig,
    )
    return certificate
