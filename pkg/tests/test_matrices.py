"""Tests for the matrix value types."""

from __future__ import annotations

import numpy as np
import pytest

from orbitcert.errors import MatrixValidationError, ShapeError
from orbitcert.matrices import (
    ComplexMatrix,
    HermitianMatrix,
    PsdMatrix,
    SpectralDecomposition,
    as_hermitian,
    as_psd,
    require_square_pair,
)

from conftest import random_complex, random_psd


class TestComplexMatrix:
    def test_entries_are_copied_and_read_only(self) -> None:
        source = np.array([[1.0, 2.0], [3.0, 4.0]])
        matrix = ComplexMatrix(source)
        source[0, 0] = 99.0

        assert matrix.data[0, 0] == 1.0
        assert matrix.data.dtype == np.complex128
        with pytest.raises(ValueError):
            matrix.data[0, 0] = 5.0

    @pytest.mark.parametrize(
        "data",
        [
            [[1.0, float("nan")]],
            [[float("inf")]],
            [1.0, 2.0],
            np.zeros((0, 3)),
            [["a", "b"]],
        ],
    )
    def test_rejects_invalid_entries(self, data) -> None:
        with pytest.raises(MatrixValidationError):
            ComplexMatrix(data)

    def test_shape_and_entries(self) -> None:
        matrix = ComplexMatrix([[1, 2j, 3]])
        assert matrix.shape == (1, 3)
        assert not matrix.is_square
        assert list(matrix.entries()) == [1 + 0j, 2j, 3 + 0j]

    def test_unitary_and_isometry_predicates(self) -> None:
        swap = ComplexMatrix([[0, 1], [1, 0]])
        column = ComplexMatrix(np.array([[1.0], [1.0]]) / np.sqrt(2))

        assert swap.is_unitary()
        assert not swap.is_isometry()
        assert column.is_isometry()
        assert not ComplexMatrix([[2.0]]).is_unitary()

    def test_adjoint(self, rng: np.random.Generator) -> None:
        data = random_complex(rng, 3)
        np.testing.assert_allclose(ComplexMatrix(data).adjoint().data, data.conj().T)


class TestHermitianMatrix:
    def test_symmetrizes_small_deviation(self) -> None:
        matrix = HermitianMatrix([[1.0, 1.0 + 1e-13], [1.0, 2.0]])
        np.testing.assert_array_equal(matrix.data, matrix.data.conj().T)

    def test_rejects_non_hermitian(self) -> None:
        with pytest.raises(MatrixValidationError):
            HermitianMatrix([[1.0, 1.0], [0.0, 1.0]])

    def test_rejects_non_square(self) -> None:
        with pytest.raises(ShapeError):
            HermitianMatrix([[1.0, 0.0]])

    def test_eigenvalues_nonincreasing(self) -> None:
        matrix = HermitianMatrix(np.diag([1.0, 3.0, 2.0]))
        np.testing.assert_allclose(matrix.eigenvalues(), [3.0, 2.0, 1.0])
        assert matrix.min_eigenvalue() == pytest.approx(1.0)


class TestPsdMatrix:
    def test_accepts_rounding_negative_eigenvalue(self) -> None:
        matrix = PsdMatrix(np.diag([1.0, -1e-12]))
        assert matrix.min_eig == pytest.approx(-1e-12)

    def test_rejects_negative_eigenvalue(self) -> None:
        with pytest.raises(MatrixValidationError):
            PsdMatrix(np.diag([1.0, -1e-3]))

    def test_random_gram_is_psd(self, rng: np.random.Generator) -> None:
        assert as_psd(random_psd(rng, 4)).min_eig >= -1e-12


class TestSpectralDecomposition:
    def test_rejects_mismatched_frame(self) -> None:
        with pytest.raises(ShapeError):
            SpectralDecomposition(np.array([1.0, 2.0, 3.0]), ComplexMatrix(np.eye(2)))

    def test_reconstruct(self) -> None:
        frame = ComplexMatrix(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
        decomposition = SpectralDecomposition(np.array([1.0, -1.0]), frame)
        np.testing.assert_allclose(decomposition.reconstruct(), [[0, 1], [1, 0]], atol=1e-15)
        np.testing.assert_allclose(decomposition.ascending(), [-1.0, 1.0])


def test_coercions_reuse_instances() -> None:
    psd = PsdMatrix(np.eye(2))
    assert as_psd(psd) is psd
    assert as_hermitian(psd) is psd


def test_require_square_pair_rejects_mismatch() -> None:
    with pytest.raises(ShapeError):
        require_square_pair(np.eye(2), np.eye(3))
    with pytest.raises(ShapeError):
        require_square_pair(np.ones((2, 3)), np.ones((2, 3)))
