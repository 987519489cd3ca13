"""Tests for the inequality checks."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitcert.checks import (
    CheckResult,
    admissible_weyl_indices,
    check_antinorm_superadditivity,
    check_cartesian_readings,
    check_clarkson_trace,
    check_direct_sum_spectra,
    check_parallelogram_identity,
    check_symmetric_norm_clarkson,
    check_uniform_convexity,
    check_weak_majorization,
    check_weyl_split,
)
from orbitcert.errors import (
    IndexRangeError,
    MatrixValidationError,
    RegimeError,
    ShapeError,
    UsageError,
)
from orbitcert.generators import haar_unitary

from conftest import random_complex

E11 = np.diag([1.0, 0.0])
E22 = np.diag([0.0, 1.0])
NILPOTENT = np.array([[0.0, 1.0], [0.0, 0.0]])


def detail(result: CheckResult, index: tuple[int, ...]) -> tuple[float, float]:
    for key, lhs, rhs in result.details:
        if key == index:
            return lhs, rhs
    raise KeyError(index)


class TestClarksonTrace:
    def test_scalar_upper_bound_is_tight(self) -> None:
        result = check_clarkson_trace([[1.0]], [[1.0]], 4)
        assert result.holds
        assert result.margin == pytest.approx(0.0, abs=1e-12)
        assert detail(result, (0,)) == pytest.approx((4.0, 16.0))

    def test_orthogonal_projections(self) -> None:
        result = check_clarkson_trace(E11, E22, 4)
        assert result.holds
        assert result.margin == pytest.approx(0.0, abs=1e-12)
        lhs, rhs = detail(result, (2,))
        assert rhs - lhs == pytest.approx(0.75)

    def test_parallelogram_exponent_is_an_equality(self, rng: np.random.Generator) -> None:
        a, b = random_complex(rng, 3), random_complex(rng, 3)
        result = check_clarkson_trace(a, b, 2)
        assert result.holds
        assert len(result.details) == 6
        assert abs(result.margin) <= 1e-10 * result.scale()

    @pytest.mark.parametrize("p", [0.5, 1.0, 1.5, 2.5, 3.0, 4.0, 10.0])
    def test_holds_on_random_pairs(self, rng: np.random.Generator, p: float) -> None:
        for dim in (1, 2, 4):
            result = check_clarkson_trace(random_complex(rng, dim), random_complex(rng, dim), p)
            assert result.holds, result

    def test_symmetric_in_its_arguments(self, rng: np.random.Generator) -> None:
        a, b = random_complex(rng, 3), random_complex(rng, 3)
        forward = check_clarkson_trace(a, b, 3)
        backward = check_clarkson_trace(b, a, 3)
        assert forward.margin == pytest.approx(backward.margin, abs=1e-10)

    def test_unitarily_invariant(self, rng: np.random.Generator) -> None:
        a, b = random_complex(rng, 3), random_complex(rng, 3)
        u, v = haar_unitary(3, rng), haar_unitary(3, rng)
        plain = check_clarkson_trace(a, b, 3)
        moved = check_clarkson_trace(u @ a @ v, u @ b @ v, 3)
        assert moved.margin == pytest.approx(plain.margin, abs=1e-9 * plain.scale())

    def test_rejects_bad_input(self) -> None:
        with pytest.raises(RegimeError):
            check_clarkson_trace(E11, E22, 0)
        with pytest.raises(ShapeError):
            check_clarkson_trace(E11, np.eye(3), 3)


class TestMajorization:
    def test_equal_identities(self) -> None:
        result = check_weak_majorization(np.eye(2), np.eye(2), 3)
        assert result.holds
        assert result.margin == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_projections_prefix_sums(self) -> None:
        result = check_weak_majorization(E11, E22, 4)
        assert detail(result, (1,)) == pytest.approx((1 / 8, 1 / 2))
        assert detail(result, (2,)) == pytest.approx((1 / 4, 1.0))

    def test_rejects_small_exponent(self) -> None:
        with pytest.raises(RegimeError):
            check_weak_majorization(E11, E22, 1.5)

    @pytest.mark.parametrize("variant", ["sum", "geomean"])
    def test_antinorm_equal_operands(self, rng: np.random.Generator, variant: str) -> None:
        a = random_complex(rng, 3)
        result = check_antinorm_superadditivity(a, a, 3, variant)
        assert result.holds
        assert result.margin == pytest.approx(0.0, abs=1e-9 * result.scale())

    @pytest.mark.parametrize("variant", ["sum", "geomean"])
    def test_antinorm_random(self, rng: np.random.Generator, variant: str) -> None:
        for dim in (1, 2, 3, 5):
            a, b = random_complex(rng, dim), random_complex(rng, dim)
            assert check_antinorm_superadditivity(a, b, 4, variant).holds

    def test_antinorm_rejects_unknown_variant(self) -> None:
        with pytest.raises(UsageError):
            check_antinorm_superadditivity(E11, E22, 3, "median")

    def test_antinorm_needs_p_above_two(self) -> None:
        with pytest.raises(RegimeError):
            check_antinorm_superadditivity(E11, E22, 2)


class TestWeyl:
    def test_cor5_scalar(self) -> None:
        result = check_weyl_split([[1.0]], [[1.0]], 3, 0, which="cor5")
        assert result.holds
        assert result.margin == pytest.approx(0.0, abs=1e-12)

    def test_cor3_orthogonal_projections(self) -> None:
        result = check_weyl_split(E11, E22, 4, 0, 0, "cor3")
        assert detail(result, (0, 0)) == pytest.approx((1 / 8, 1 / 2))

    @pytest.mark.parametrize(("which", "exponent"), [("cor3", 3.0), ("cor4", 1.0), ("cor5", 4.0)])
    def test_all_admissible_indices(
        self, rng: np.random.Generator, which: str, exponent: float
    ) -> None:
        n = 4
        a, b = random_complex(rng, n), random_complex(rng, n)
        indices = admissible_weyl_indices(n, which)
        assert indices
        for j, k in indices:
            assert check_weyl_split(a, b, exponent, j, k, which).holds

    def test_index_counts(self) -> None:
        assert len(admissible_weyl_indices(3, "cor3")) == 6
        assert admissible_weyl_indices(3, "cor5") == [(0, 0), (1, 0), (2, 0)]

    def test_rejects_inadmissible_indices(self) -> None:
        with pytest.raises(IndexRangeError):
            check_weyl_split(E11, E22, 3, 1, 1, "cor3")
        with pytest.raises(IndexRangeError):
            check_weyl_split(E11, E22, 3, 2, 0, "cor5")

    def test_regime_per_statement(self) -> None:
        with pytest.raises(RegimeError):
            check_weyl_split(E11, E22, 1.0, 0, 0, "cor3")
        with pytest.raises(RegimeError):
            check_weyl_split(E11, E22, 3.0, 0, 0, "cor4")


class TestIdentities:
    def test_parallelogram_identity(self, rng: np.random.Generator) -> None:
        assert check_parallelogram_identity(np.eye(2), np.eye(2)).holds
        assert check_parallelogram_identity(NILPOTENT, NILPOTENT.T).holds
        a, b = random_complex(rng, 4), random_complex(rng, 4)
        result = check_parallelogram_identity(a, b)
        assert result.holds
        assert len(result.details) == 2 * 16

    def test_cartesian_readings(self, rng: np.random.Generator) -> None:
        for z in (NILPOTENT, random_complex(rng, 3)):
            results = check_cartesian_readings(z)
            assert [result.name for result in results] == ["cartesian_paired", "cartesian_adjoint"]
            assert all(result.holds for result in results)

    def test_cartesian_rejects_rectangular(self) -> None:
        with pytest.raises(ShapeError):
            check_cartesian_readings(np.ones((2, 3)))


class TestNormInequalities:
    def test_uniform_convexity_equal_operands(self) -> None:
        result = check_uniform_convexity(E11, E11, 3)
        assert result.holds
        assert result.margin == pytest.approx(0.0, abs=1e-12)

    def test_uniform_convexity_random(self, rng: np.random.Generator) -> None:
        for p in (2.0, 3.0, 6.0):
            assert check_uniform_convexity(random_complex(rng, 3), random_complex(rng, 3), p).holds

    def test_uniform_convexity_rejects_zero(self) -> None:
        with pytest.raises(MatrixValidationError):
            check_uniform_convexity(np.zeros((2, 2)), E11, 3)

    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0, 5.0])
    def test_symmetric_norm(self, rng: np.random.Generator, p: float) -> None:
        result = check_symmetric_norm_clarkson(random_complex(rng, 3), random_complex(rng, 3), p)
        assert result.holds
        per_k = 4 if p == 2.0 else 2
        assert len(result.details) == 3 * per_k


class TestDirectSumSpectra:
    @pytest.mark.parametrize("form", ["halved", "four_term"])
    @pytest.mark.parametrize("exponent", [0.5, 1.0, 3.0, 4.0])
    def test_random(self, rng: np.random.Generator, form: str, exponent: float) -> None:
        for dim in (1, 2, 3):
            a, b = random_complex(rng, dim), random_complex(rng, dim)
            result = check_direct_sum_spectra(a, b, exponent, form)
            assert result.holds, result
            assert len(result.details) == 2 * dim

    def test_rejects_two(self) -> None:
        with pytest.raises(RegimeError):
            check_direct_sum_spectra(E11, E22, 2, "halved")

    def test_rejects_unknown_form(self) -> None:
        with pytest.raises(UsageError):
            check_direct_sum_spectra(E11, E22, 3, "three_term")


def test_check_result_round_trip() -> None:
    result = check_clarkson_trace(E11, E22, 3)
    assert CheckResult.from_dict(result.to_dict()) == result
    with pytest.raises(UsageError):
        CheckResult.from_dict({"name": "x"})


@settings(max_examples=100, deadline=None)
@given(
    a=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    b=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    p=st.floats(min_value=0.5, max_value=8.0),
)
def test_scalar_clarkson_holds(a: complex, b: complex, p: float) -> None:
    """Clarkson's inequalities hold for complex scalars."""
    assert check_clarkson_trace([[a]], [[b]], p).holds
