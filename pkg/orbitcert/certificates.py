"""Certificates: explicit transforms witnessing an operator inequality.

A certificate records the transforms (unitaries or isometries), both sides of
the inequality, its direction and the smallest eigenvalue of the gap. When
the orbit terms are included, ``verify_certificate`` re-derives the orbit side
from the transforms alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import StrEnum
import logging
import math
from typing import Any, Mapping, Optional, Sequence

import numpy as np
import scipy.linalg

from .const import IDENTITY_TOL, MAX_CERT_TOL, ORTHO_TOL, PSD_TOL, RECON_TOL
from .errors import CertificateFormatError, MatrixValidationError, ShapeError
from .matrices import ComplexMatrix, HermitianMatrix, MatrixLike, as_complex, as_hermitian
from .matrix_io import array_from_dict, matrix_to_dict

_LOGGER = logging.getLogger(__name__)


class Direction(StrEnum):
    LHS_LE_RHS = "lhs_le_rhs"
    LHS_GE_RHS = "lhs_ge_rhs"
    EQUALITY = "equality"

    def flipped(self) -> Direction:
        return {
            Direction.LHS_LE_RHS: Direction.LHS_GE_RHS,
            Direction.LHS_GE_RHS: Direction.LHS_LE_RHS,
            Direction.EQUALITY: Direction.EQUALITY,
        }[self]


class TransformKind(StrEnum):
    UNITARY = "unitary"
    ISOMETRY = "isometry"


class OrbitSide(StrEnum):
    LHS = "lhs"
    RHS = "rhs"


@dataclass(frozen=True)
class Transform:
    """A unitary (square) or isometry (rows > cols) transform."""

    kind: TransformKind
    matrix: ComplexMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", TransformKind(self.kind))
        object.__setattr__(self, "matrix", as_complex(self.matrix))
        rows, cols = self.matrix.shape
        if self.kind is TransformKind.UNITARY and rows != cols:
            raise ShapeError(f"Unitary transform must be square, got {rows}x{cols}")
        if self.kind is TransformKind.ISOMETRY and rows <= cols:
            raise ShapeError(f"Isometry transform needs rows > cols, got {rows}x{cols}")

    @classmethod
    def unitary(cls, matrix: MatrixLike) -> Transform:
        return cls(TransformKind.UNITARY, as_complex(matrix))

    @classmethod
    def isometry(cls, matrix: MatrixLike) -> Transform:
        return cls(TransformKind.ISOMETRY, as_complex(matrix))

    def defect(self) -> float:
        return self.matrix.orthonormality_defect()

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, **matrix_to_dict(self.matrix)}


def _gap(direction: Direction, lhs: np.ndarray, rhs: np.ndarray) -> float:
    if direction is Direction.LHS_LE_RHS:
        return float(scipy.linalg.eigvalsh(rhs - lhs)[0])
    if direction is Direction.LHS_GE_RHS:
        return float(scipy.linalg.eigvalsh(lhs - rhs)[0])
    values = scipy.linalg.eigvalsh(rhs - lhs)
    return float(min(values[0], -values[-1]))


def _default_tol(direction: Direction) -> float:
    return IDENTITY_TOL if direction is Direction.EQUALITY else PSD_TOL


def _scale(lhs: np.ndarray, rhs: np.ndarray) -> float:
    return 1.0 + max(float(scipy.linalg.norm(lhs, 2)), float(scipy.linalg.norm(rhs, 2)))


@dataclass(frozen=True)
class Certificate:
    """A witnessed operator inequality ``lhs (<=|>=|==) rhs``.

    Attributes:
        statement: Tag of the certified statement (e.g. "theorem1")
        transforms: Unitaries or isometries appearing on the orbit side
        direction: lhs_le_rhs, lhs_ge_rhs or equality
        lhs, rhs: The two sides
        gap_min_eig: lambda_min of the gap in the stated direction; for
            equality, min(lambda_min(rhs - lhs), lambda_min(lhs - rhs))
        tol_used: Tolerance the gap sign is judged against (relative to scale)
        terms: Operators S_i with orbit side = sum_i T_i S_i T_i* (optional)
        orbit_side: Which side the transforms act on
    """

    statement: str
    transforms: tuple[Transform, ...]
    direction: Direction
    lhs: HermitianMatrix
    rhs: HermitianMatrix
    gap_min_eig: float
    tol_used: float
    terms: tuple[HermitianMatrix, ...] = field(default=())
    orbit_side: OrbitSide = OrbitSide.LHS

    @classmethod
    def build(
        cls,
        statement: str,
        transforms: Sequence[Transform],
        direction: Direction,
        lhs: MatrixLike,
        rhs: MatrixLike,
        terms: Sequence[MatrixLike] = (),
        orbit_side: OrbitSide = OrbitSide.LHS,
        tol: Optional[float] = None,
    ) -> Certificate:
        """Assemble a certificate and measure its gap.

        ``tol`` defaults to IDENTITY_TOL for equalities and PSD_TOL otherwise;
        search certificates pass their |target_gap|.
        """
        left = as_hermitian(lhs)
        right = as_hermitian(rhs)
        if left.dim != right.dim:
            raise ShapeError(f"Certificate sides differ in dimension: {left.dim} vs {right.dim}")
        direction = Direction(direction)
        gap = _gap(direction, left.data, right.data)
        certificate = cls(
            statement=statement,
            transforms=tuple(transforms),
            direction=direction,
            lhs=left,
            rhs=right,
            gap_min_eig=gap,
            tol_used=_default_tol(direction) if tol is None else max(float(tol), PSD_TOL),
            terms=tuple(as_hermitian(term) for term in terms),
            orbit_side=OrbitSide(orbit_side),
        )
        _LOGGER.debug(
            "Certificate %s (%s): gap %.6e, scale %.3e",
            statement,
            direction.value,
            gap,
            certificate.scale(),
        )
        return certificate

    def scale(self) -> float:
        """1 + max(||lhs||, ||rhs||) in spectral norm."""
        return _scale(self.lhs.data, self.rhs.data)

    @property
    def holds(self) -> bool:
        """Gap sign condition of the stated direction."""
        if self.direction is Direction.EQUALITY:
            deviation = float(np.max(np.abs(self.rhs.data - self.lhs.data)))
            return deviation <= self.tol_used * self.scale()
        return self.gap_min_eig >= -self.tol_used * self.scale()

    @property
    def dim(self) -> int:
        return self.lhs.dim

    def flipped(self) -> Certificate:
        """The same inequality with sides swapped."""
        side = OrbitSide.RHS if self.orbit_side is OrbitSide.LHS else OrbitSide.LHS
        return replace(
            self,
            lhs=self.rhs,
            rhs=self.lhs,
            direction=self.direction.flipped(),
            orbit_side=side,
        )

    def orbit_sum(self) -> Optional[np.ndarray]:
        """sum_i T_i S_i T_i* when terms are present."""
        if not self.terms:
            return None
        total = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for transform, term in zip(self.transforms, self.terms):
            t = transform.matrix.data
            total += t @ term.data @ t.conj().T
        return total

    def to_dict(self) -> dict[str, Any]:
        return {
            "statement": self.statement,
            "direction": self.direction.value,
            "gap_min_eig": self.gap_min_eig,
            "tol_used": self.tol_used,
            "transforms": [transform.to_dict() for transform in self.transforms],
            "lhs": matrix_to_dict(self.lhs),
            "rhs": matrix_to_dict(self.rhs),
            "terms": [matrix_to_dict(term) for term in self.terms],
            "orbit_side": self.orbit_side.value,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> Certificate:
        """Parse a serialized certificate; the recorded gap is kept as written.

        Raises:
            CertificateFormatError: Missing keys, bad enums, or malformed matrices
        """
        try:
            transforms = tuple(
                Transform(TransformKind(item["kind"]), ComplexMatrix(array_from_dict(item)))
                for item in payload["transforms"]
            )
            return cls(
                statement=str(payload["statement"]),
                transforms=transforms,
                direction=Direction(payload["direction"]),
                lhs=HermitianMatrix(array_from_dict(payload["lhs"])),
                rhs=HermitianMatrix(array_from_dict(payload["rhs"])),
                gap_min_eig=float(payload["gap_min_eig"]),
                tol_used=float(payload["tol_used"]),
                terms=tuple(
                    HermitianMatrix(array_from_dict(term)) for term in payload.get("terms", [])
                ),
                orbit_side=OrbitSide(payload.get("orbit_side", OrbitSide.LHS.value)),
            )
        except (KeyError, TypeError, ValueError, MatrixValidationError, ShapeError) as err:
            raise CertificateFormatError(f"Malformed certificate: {err}") from err


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of independently re-verifying a certificate.

    Attributes:
        statement: Statement tag of the certificate
        holds: True when every problem list is empty
        recomputed_gap: Gap recomputed from lhs and rhs
        recorded_gap: Gap stored in the certificate
        scale: 1 + max(||lhs||, ||rhs||)
        transform_defects: ||T*T - I||_max per transform
        orbit_residual: ||orbit side - sum T_i S_i T_i*||_max (None without terms)
        problems: Human-readable reasons the certificate does not verify
    """

    statement: str
    holds: bool
    recomputed_gap: float
    recorded_gap: float
    scale: float
    transform_defects: tuple[float, ...]
    orbit_residual: Optional[float]
    problems: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "statement": self.statement,
            "holds": self.holds,
            "recomputed_gap": self.recomputed_gap,
            "recorded_gap": self.recorded_gap,
            "scale": self.scale,
            "transform_defects": list(self.transform_defects),
            "orbit_residual": self.orbit_residual,
            "problems": list(self.problems),
        }


def verify_certificate(certificate: Certificate) -> CertificateReport:
    """Re-verify a certificate without trusting any recorded number.

    Checks transform orthonormality per tag, shapes, the gap sign in the stated
    direction, agreement of the recorded gap, and (with terms) that the orbit
    side equals sum_i T_i S_i T_i*.
    """
    problems: list[str] = []
    dim = certificate.dim
    lhs = certificate.lhs.data
    rhs = certificate.rhs.data
    scale = _scale(lhs, rhs)

    defects = []
    for index, transform in enumerate(certificate.transforms):
        defect = transform.defect()
        defects.append(defect)
        if defect > ORTHO_TOL:
            problems.append(
                f"transform {index} ({transform.kind.value}) orthonormality defect {defect:.3e}"
            )
        if transform.matrix.rows != dim:
            problems.append(
                f"transform {index} has {transform.matrix.rows} rows, certificate dimension {dim}"
            )

    gap = _gap(certificate.direction, lhs, rhs)
    if certificate.direction is Direction.EQUALITY:
        deviation = float(np.max(np.abs(rhs - lhs)))
        if deviation > IDENTITY_TOL * scale:
            problems.append(f"equality deviation {deviation:.3e} exceeds tolerance")
    else:
        tol = min(max(certificate.tol_used, PSD_TOL), MAX_CERT_TOL)
        if certificate.tol_used > MAX_CERT_TOL:
            problems.append(f"tol_used {certificate.tol_used:g} exceeds {MAX_CERT_TOL:g}")
        if gap < -tol * scale:
            problems.append(f"gap {gap:.6e} is below -{tol:g} * scale")

    if not math.isfinite(certificate.gap_min_eig) or abs(
        certificate.gap_min_eig - gap
    ) > RECON_TOL * scale:
        problems.append(
            f"recorded gap {certificate.gap_min_eig!r} disagrees with recomputed {gap!r}"
        )

    residual: Optional[float] = None
    if certificate.terms:
        if len(certificate.terms) != len(certificate.transforms):
            problems.append(
                f"{len(certificate.terms)} terms for {len(certificate.transforms)} transforms"
            )
        elif any(
            term.dim != transform.matrix.cols
            for term, transform in zip(certificate.terms, certificate.transforms)
        ):
            problems.append("term dimensions do not match transform columns")
        else:
            orbit = certificate.orbit_sum()
            side = lhs if certificate.orbit_side is OrbitSide.LHS else rhs
            residual = float(np.max(np.abs(side - orbit)))
            if residual > RECON_TOL * scale:
                problems.append(f"orbit side residual {residual:.3e} exceeds tolerance")

    report = CertificateReport(
        statement=certificate.statement,
        holds=not problems,
        recomputed_gap=gap,
        recorded_gap=certificate.gap_min_eig,
        scale=scale,
        transform_defects=tuple(defects),
        orbit_residual=residual,
        problems=tuple(problems),
    )
    if problems:
        _LOGGER.warning("Certificate %s failed verification: %s", certificate.statement, problems)
    return report
