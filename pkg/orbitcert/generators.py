"""Seeded random instances for property suites and tests."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
import logging
import math
from typing import Any, Union

import numpy as np
import scipy.linalg

from .errors import UsageError
from .matrices import ComplexMatrix
from .validation import validate_seed

_LOGGER = logging.getLogger(__name__)


class GeneratorKind(StrEnum):
    GINIBRE = "ginibre"
    HERMITIAN = "hermitian"
    PSD = "psd"
    COMMUTING_PAIR = "commuting_pair"
    RANK_DEFICIENT = "rank_deficient"
    NORMAL = "normal"
    SCALAR = "scalar"


@dataclass(frozen=True)
class GeneratorSpec:
    """Kind, dimension, seed and entry scale of a generated instance."""

    kind: GeneratorKind
    dim: int
    seed: int
    scale: float = 1.0

    def __post_init__(self) -> None:
        try:
            kind = GeneratorKind(self.kind)
        except ValueError as err:
            valid = ", ".join(k.value for k in GeneratorKind)
            raise UsageError(f"Unknown generator kind {self.kind!r}; use one of: {valid}") from err
        object.__setattr__(self, "kind", kind)

        if not isinstance(self.dim, int) or self.dim < 1:
            raise UsageError(f"Generator dimension must be a positive integer, got {self.dim!r}")
        if kind is GeneratorKind.SCALAR and self.dim != 1:
            raise UsageError(f"Scalar instances have dimension 1, got {self.dim}")

        seed = validate_seed(self.seed)
        if not seed.valid:
            raise UsageError(seed.error_message or "invalid seed")
        object.__setattr__(self, "seed", seed.sanitized_value)

        if not (math.isfinite(self.scale) and self.scale > 0):
            raise UsageError(f"Generator scale must be > 0, got {self.scale!r}")

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "dim": self.dim, "seed": self.seed, "scale": self.scale}


def derive_seed(master: int, *indices: int) -> int:
    """Deterministic 64-bit sub-seed for (master, indices...)."""
    sequence = np.random.SeedSequence([master, *indices])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with phase correction."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = scipy.linalg.qr(z)
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def _ginibre(dim: int, rng: np.random.Generator, scale: float) -> np.ndarray:
    real = rng.standard_normal((dim, dim))
    imag = rng.standard_normal((dim, dim))
    return scale * (real + 1j * imag) / math.sqrt(2)


def _complex_vector(dim: int, rng: np.random.Generator, scale: float) -> np.ndarray:
    return scale * (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / math.sqrt(2)


def _draw(kind: GeneratorKind, dim: int, rng: np.random.Generator, scale: float) -> np.ndarray:
    if kind in (GeneratorKind.GINIBRE, GeneratorKind.SCALAR):
        return _ginibre(dim, rng, scale)
    if kind is GeneratorKind.HERMITIAN:
        g = _ginibre(dim, rng, scale)
        return (g + g.conj().T) / 2
    if kind is GeneratorKind.PSD:
        g = _ginibre(dim, rng, scale) / math.sqrt(dim)
        return g @ g.conj().T
    if kind is GeneratorKind.RANK_DEFICIENT:
        u, sigma, vh = scipy.linalg.svd(_ginibre(dim, rng, scale))
        sigma[-1] = 0.0
        return (u * sigma) @ vh
    if kind is GeneratorKind.NORMAL:
        q = haar_unitary(dim, rng)
        return (q * _complex_vector(dim, rng, scale)) @ q.conj().T
    raise UsageError(f"Generator kind {kind.value!r} does not produce a single matrix")


def _commuting_pair(
    dim: int, rng: np.random.Generator, scale: float
) -> tuple[ComplexMatrix, ComplexMatrix]:
    q = haar_unitary(dim, rng)
    first = (q * _complex_vector(dim, rng, scale)) @ q.conj().T
    second = (q * _complex_vector(dim, rng, scale)) @ q.conj().T
    return ComplexMatrix(first), ComplexMatrix(second)


def generate(spec: GeneratorSpec) -> Union[ComplexMatrix, tuple[ComplexMatrix, ComplexMatrix]]:
    """Deterministic instance for a spec: one matrix, or a pair for commuting_pair."""
    rng = np.random.default_rng(spec.seed)
    _LOGGER.debug("Generating %s instance (dim=%d, seed=%d)", spec.kind.value, spec.dim, spec.seed)
    if spec.kind is GeneratorKind.COMMUTING_PAIR:
        return _commuting_pair(spec.dim, rng, spec.scale)
    return ComplexMatrix(_draw(spec.kind, spec.dim, rng, spec.scale))


def generate_pair(
    kind: Union[GeneratorKind, str], dim: int, seed: int, scale: float = 1.0
) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Two matrices of one kind drawn from a single seeded stream."""
    spec = GeneratorSpec(kind=kind, dim=dim, seed=seed, scale=scale)
    if spec.kind is GeneratorKind.COMMUTING_PAIR:
        pair = generate(spec)
        assert isinstance(pair, tuple)
        return pair
    rng = np.random.default_rng(spec.seed)
    first = _draw(spec.kind, spec.dim, rng, spec.scale)
    second = _draw(spec.kind, spec.dim, rng, spec.scale)
    return ComplexMatrix(first), ComplexMatrix(second)
