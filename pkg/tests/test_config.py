"""Tests for configuration validation and seed resolution."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from orbitcert.config import (
    SearchConfig,
    SuiteConfig,
    load_config_file,
    resolve_seed,
)
from orbitcert.const import DEFAULT_DIMS, DEFAULT_SEED
from orbitcert.errors import UsageError


def test_search_defaults() -> None:
    cfg = SearchConfig()
    assert cfg.max_iterations == 500
    assert cfg.restarts == 8
    assert cfg.target_gap == pytest.approx(-1e-7)
    assert cfg.workers == 1


@pytest.mark.parametrize(
    "overrides",
    [
        {"max_iterations": 0},
        {"restarts": -1},
        {"step_init": 0.0},
        {"target_gap": 0.1},
        {"workers": 0},
    ],
)
def test_search_config_rejects(overrides: dict) -> None:
    with pytest.raises(UsageError) as info:
        SearchConfig(**overrides)
    assert "search." in str(info.value)


def test_suite_config_from_mapping() -> None:
    config = SuiteConfig.from_mapping(
        {"dims": [3, 1, 3], "trials": 2, "seed": "17", "search": {"restarts": 1}}
    )
    assert config.dims == (1, 3)
    assert config.trials == 2
    assert config.seed == 17
    assert config.search.restarts == 1
    assert config.search.max_iterations == 500


def test_suite_config_defaults() -> None:
    config = SuiteConfig.from_mapping({})
    assert config.dims == DEFAULT_DIMS
    assert config.seed == DEFAULT_SEED
    assert config.include_timestamp


@pytest.mark.parametrize(
    "mapping",
    [
        {"dims": []},
        {"dims": [9]},
        {"p_grid": [1.5]},
        {"q_grid": [2.0]},
        {"trials": 0},
        {"unknown": 1},
        {"search": {"restarts": "many"}},
    ],
)
def test_suite_config_rejects(mapping: dict) -> None:
    with pytest.raises(UsageError):
        SuiteConfig.from_mapping(mapping)


def test_seed_resolution_order(monkeypatch: pytest.MonkeyPatch) -> None:
    assert resolve_seed() == DEFAULT_SEED
    monkeypatch.setenv("ORBITCERT_SEED", "123")
    assert resolve_seed() == 123
    assert resolve_seed(5) == 5
    assert SuiteConfig.from_mapping({}).seed == 123


def test_invalid_seeds(monkeypatch: pytest.MonkeyPatch) -> None:
    with pytest.raises(UsageError):
        resolve_seed("abc")
    with pytest.raises(UsageError):
        resolve_seed(2**64)
    monkeypatch.setenv("ORBITCERT_SEED", "-3")
    with pytest.raises(UsageError):
        resolve_seed()


def test_load_config_file(tmp_path: Path) -> None:
    good = tmp_path / "suite.json"
    good.write_text(json.dumps({"trials": 3}), encoding="utf-8")
    assert load_config_file(good) == {"trials": 3}

    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "trials": ,\n}', encoding="utf-8")
    with pytest.raises(UsageError) as info:
        load_config_file(bad)
    assert info.value.details["line"] == 2

    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(UsageError):
        load_config_file(listing)

    with pytest.raises(UsageError):
        load_config_file(tmp_path / "missing.json")
