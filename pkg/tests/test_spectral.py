"""Tests for spectral calculus."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitcert.errors import NonCommutingError, RegimeError, SpectralDomainError
from orbitcert.spectral import (
    PowerFunction,
    apply_spectral_function,
    common_frame,
    commutator_norm,
    direct_sum,
    matrix_abs_power,
    psd_gap,
    psd_le,
    schatten_norm,
    spectral_decomposition,
    trace_abs_power,
)

from conftest import max_abs, random_complex, random_hermitian, random_psd


class TestSpectralDecomposition:
    def test_diagonal(self) -> None:
        decomposition = spectral_decomposition(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(decomposition.eigenvalues, [3.0, 1.0])
        np.testing.assert_allclose(decomposition.frame.data, np.eye(2), atol=1e-15)

    def test_swap_matrix_frame_is_phase_normalized(self) -> None:
        decomposition = spectral_decomposition([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(decomposition.eigenvalues, [1.0, -1.0], atol=1e-15)
        frame = decomposition.frame.data
        np.testing.assert_allclose(frame[:, 0], np.array([1.0, 1.0]) / math.sqrt(2), atol=1e-12)
        np.testing.assert_allclose(np.abs(frame[:, 1]), np.full(2, 1 / math.sqrt(2)), atol=1e-12)
        assert frame[0, 1] * frame[1, 1] == pytest.approx(-0.5)

    def test_invariants_on_random_input(self, rng: np.random.Generator) -> None:
        for dim in range(1, 7):
            h = random_hermitian(rng, dim)
            decomposition = spectral_decomposition(h)
            frame = decomposition.frame.data

            assert np.all(np.diff(decomposition.eigenvalues) <= 0)
            assert max_abs(frame.conj().T @ frame - np.eye(dim)) <= 1e-10
            assert max_abs(decomposition.reconstruct() - h) <= 1e-9 * (1 + np.abs(h).max())

    def test_reconstruction_over_seeded_inputs(self, rng: np.random.Generator) -> None:
        for index in range(1000):
            dim = 1 + index % 8
            h = random_hermitian(rng, dim)
            decomposition = spectral_decomposition(h)
            frame = decomposition.frame.data
            scale = 1 + np.linalg.norm(h, 2)
            assert max_abs(decomposition.reconstruct() - h) <= 1e-9 * scale, index
            assert max_abs(frame.conj().T @ frame - np.eye(dim)) <= 1e-10, index

    def test_degenerate_cluster_is_canonical(self, rng: np.random.Generator) -> None:
        q = np.linalg.qr(random_complex(rng, 3))[0]
        rotation = np.eye(3, dtype=np.complex128)
        rotation[:2, :2] = np.linalg.qr(random_complex(rng, 2))[0]
        values = np.diag([2.0, 2.0, -1.0])
        h = q @ values @ q.conj().T
        rotated = q @ rotation @ values @ rotation.conj().T @ q.conj().T

        first = spectral_decomposition(h).frame.data
        second = spectral_decomposition(rotated).frame.data
        np.testing.assert_allclose(first, second, atol=1e-8)

    def test_largest_component_is_real_positive(self, rng: np.random.Generator) -> None:
        frame = spectral_decomposition(random_hermitian(rng, 4)).frame.data
        for column in frame.T:
            pivot = column[np.argmax(np.abs(column))]
            assert abs(pivot.imag) <= 1e-12
            assert pivot.real > 0


class TestMatrixFunctions:
    def test_square_root(self) -> None:
        root = apply_spectral_function(np.diag([4.0, 9.0]), math.sqrt)
        np.testing.assert_allclose(root.data, np.diag([2.0, 3.0]), atol=1e-14)

    def test_domain_error(self) -> None:
        with pytest.raises(SpectralDomainError):
            apply_spectral_function(np.diag([0.0, 1.0]), lambda t: 1.0 / t)

    def test_abs_power_of_nilpotent(self) -> None:
        result = matrix_abs_power([[0.0, 1.0], [0.0, 0.0]], 3)
        np.testing.assert_allclose(result.data, np.diag([0.0, 1.0]), atol=1e-14)

    def test_abs_power_of_jordan_block(self) -> None:
        gram = np.array([[1.0, 1.0], [1.0, 2.0]])
        result = matrix_abs_power([[1.0, 1.0], [0.0, 1.0]], 4)
        np.testing.assert_allclose(result.data, gram @ gram, atol=1e-12)

    def test_abs_power_two_is_gram(self, rng: np.random.Generator) -> None:
        a = random_complex(rng, 3)
        np.testing.assert_allclose(matrix_abs_power(a, 2).data, a.conj().T @ a, atol=1e-14)

    def test_abs_power_rejects_nonpositive_exponent(self) -> None:
        with pytest.raises(RegimeError):
            matrix_abs_power(np.eye(2), 0)

    def test_power_function(self) -> None:
        g = PowerFunction(1.5)
        assert g(4.0) == pytest.approx(8.0)
        assert g(-1e-15) == 0.0
        assert g.convex and not g.concave
        assert g.name == "t^1.5"


class TestNorms:
    def test_schatten_identity(self) -> None:
        for n in range(1, 5):
            assert schatten_norm(np.eye(n), 2) == pytest.approx(math.sqrt(n))

    def test_schatten_infinity_is_spectral_norm(self, rng: np.random.Generator) -> None:
        a = random_complex(rng, 4)
        assert schatten_norm(a, math.inf) == pytest.approx(np.linalg.norm(a, 2))

    def test_schatten_rejects_quasi_norm(self) -> None:
        with pytest.raises(RegimeError):
            schatten_norm(np.eye(2), 0.5)

    def test_trace_abs_power_matches_matrix_power(self, rng: np.random.Generator) -> None:
        a = random_complex(rng, 3)
        expected = np.trace(matrix_abs_power(a, 3).data).real
        assert trace_abs_power(a, 3) == pytest.approx(expected, rel=1e-10)


class TestOrder:
    @pytest.mark.parametrize(
        ("left", "right", "gap"),
        [
            (np.zeros((2, 2)), np.eye(2), 1.0),
            (np.eye(2), np.eye(2), 0.0),
            (np.eye(2), np.zeros((2, 2)), -1.0),
        ],
    )
    def test_psd_gap(self, left: np.ndarray, right: np.ndarray, gap: float) -> None:
        assert psd_gap(left, right) == pytest.approx(gap, abs=1e-15)

    def test_psd_le_tolerates_rounding(self) -> None:
        assert psd_le(np.eye(2) * (1 + 1e-12), np.eye(2))
        assert not psd_le(np.eye(2) * 1.1, np.eye(2))

    def test_direct_sum(self) -> None:
        result = direct_sum(np.eye(1), 2 * np.eye(2))
        np.testing.assert_array_equal(result, np.diag([1.0, 2.0, 2.0]))


class TestCommonFrame:
    def test_simultaneous_diagonalization(self, rng: np.random.Generator) -> None:
        q = np.linalg.qr(random_complex(rng, 4))[0]
        x = q @ np.diag([3.0, 1.0, 1.0, 0.5]) @ q.conj().T
        y = q @ np.diag([0.0, 2.0, 5.0, 1.0]) @ q.conj().T
        frame, x_values, y_values = common_frame(x, y)

        assert max_abs((frame * x_values) @ frame.conj().T - x) <= 1e-10
        assert max_abs((frame * y_values) @ frame.conj().T - y) <= 1e-10

    def test_non_commuting(self) -> None:
        x = np.diag([1.0, 0.0])
        y = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert commutator_norm(x, y) == pytest.approx(1.0)
        with pytest.raises(NonCommutingError):
            common_frame(x, y)


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    dim=st.integers(min_value=1, max_value=5),
    p=st.floats(min_value=0.5, max_value=8.0),
)
def test_abs_power_matches_singular_values(seed: int, dim: int, p: float) -> None:
    """Eigenvalues of |A|^p are the singular values of A raised to p."""
    a = random_complex(np.random.default_rng(seed), dim)
    eigenvalues = np.sort(np.linalg.eigvalsh(matrix_abs_power(a, p).data))[::-1]
    expected = np.linalg.svd(a, compute_uv=False) ** p
    np.testing.assert_allclose(eigenvalues, expected, atol=1e-7 * (1 + expected.max()))


def test_gap_of_random_psd_pair_is_antisymmetric(rng: np.random.Generator) -> None:
    p = random_psd(rng, 3)
    r = random_psd(rng, 3)
    assert psd_gap(p, r) == pytest.approx(-np.linalg.eigvalsh(p - r).max(), abs=1e-12)
