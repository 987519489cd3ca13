"""Shared fixtures for orbitcert tests."""

from __future__ import annotations

import math

import numpy as np
import pytest

from orbitcert.config import SearchConfig

TEST_SEED = 20210301


def random_complex(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    """Complex Ginibre matrix."""
    real = rng.standard_normal((dim, dim))
    imag = rng.standard_normal((dim, dim))
    return scale * (real + 1j * imag) / math.sqrt(2)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = random_complex(rng, dim)
    return (g + g.conj().T) / 2


def random_psd(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = random_complex(rng, dim)
    return g @ g.conj().T / dim


def max_abs(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix)))


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator; every test sees the same stream."""
    return np.random.default_rng(TEST_SEED)


@pytest.fixture
def search_config() -> SearchConfig:
    """Search budget small enough for unit tests."""
    return SearchConfig(max_iterations=300, restarts=4, seed=TEST_SEED)


@pytest.fixture(autouse=True)
def _clear_seed_env(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("ORBITCERT_SEED", raising=False)
