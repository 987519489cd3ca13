"""Configuration schemas for orbit search and property suites.

Search budgets and suite grids are validated with voluptuous. Schema failures
become UsageError with a field path, and JSON config files report the line of
a parse error.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
import json
import logging
import os
from pathlib import Path
from typing import Any, Mapping, Optional

import voluptuous as vol

from .const import (
    DEFAULT_DIMS,
    DEFAULT_GRAD_EPS,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_P_GRID,
    DEFAULT_Q_GRID,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    DEFAULT_STEP_INIT,
    DEFAULT_TARGET_GAP,
    DEFAULT_TRIALS,
    ENV_SEED,
    MAX_DIM,
)
from .errors import UsageError
from .validation import U64_MAX, validate_seed

_LOGGER = logging.getLogger(__name__)

SEED_VALIDATOR = vol.All(vol.Coerce(int), vol.Range(min=0, max=U64_MAX))

SEARCH_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional("max_iterations", default=DEFAULT_MAX_ITERATIONS): vol.All(
            int, vol.Range(min=1)
        ),
        vol.Optional("restarts", default=DEFAULT_RESTARTS): vol.All(int, vol.Range(min=0)),
        vol.Optional("step_init", default=DEFAULT_STEP_INIT): vol.All(
            vol.Coerce(float), vol.Range(min=0, min_included=False)
        ),
        vol.Optional("grad_eps", default=DEFAULT_GRAD_EPS): vol.All(
            vol.Coerce(float), vol.Range(min=0, min_included=False)
        ),
        vol.Optional("seed", default=DEFAULT_SEED): SEED_VALIDATOR,
        vol.Optional("target_gap", default=DEFAULT_TARGET_GAP): vol.All(
            vol.Coerce(float), vol.Range(max=0)
        ),
        vol.Optional("workers", default=1): vol.All(int, vol.Range(min=1)),
    }
)

SUITE_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional("dims", default=list(DEFAULT_DIMS)): vol.All(
            [vol.All(int, vol.Range(min=1, max=MAX_DIM))], vol.Length(min=1)
        ),
        vol.Optional("p_grid", default=list(DEFAULT_P_GRID)): vol.All(
            [vol.All(vol.Coerce(float), vol.Range(min=2))], vol.Length(min=1)
        ),
        vol.Optional("q_grid", default=list(DEFAULT_Q_GRID)): vol.All(
            [
                vol.All(
                    vol.Coerce(float),
                    vol.Range(min=0, max=2, min_included=False, max_included=False),
                )
            ],
            vol.Length(min=1),
        ),
        vol.Optional("trials", default=DEFAULT_TRIALS): vol.All(int, vol.Range(min=1)),
        vol.Optional("seed"): SEED_VALIDATOR,
        vol.Optional("workers", default=1): vol.All(int, vol.Range(min=1)),
        vol.Optional("search", default={}): SEARCH_CONFIG_SCHEMA,
        vol.Optional("include_timestamp", default=True): bool,
    }
)


def validate_mapping(schema: vol.Schema, data: Mapping[str, Any], prefix: str = "") -> dict:
    """Run a voluptuous schema, turning failures into UsageError field diagnostics."""
    try:
        return schema(dict(data))
    except vol.MultipleInvalid as err:
        problems = []
        for invalid in err.errors:
            path = ".".join(str(part) for part in [prefix, *invalid.path] if part != "")
            problems.append(f"field '{path or '<root>'}': {invalid.msg}")
        raise UsageError(
            "Invalid configuration: " + "; ".join(problems),
            details={"fields": problems},
        ) from err


def resolve_seed(explicit: Optional[Any] = None) -> int:
    """Master seed: explicit value, else $ORBITCERT_SEED, else DEFAULT_SEED."""
    if explicit is not None:
        source, value = "argument", explicit
    elif os.environ.get(ENV_SEED):
        source, value = ENV_SEED, os.environ[ENV_SEED]
    else:
        return DEFAULT_SEED

    result = validate_seed(value)
    if not result.valid:
        raise UsageError(f"Invalid seed from {source}: {result.error_message}")
    return result.sanitized_value


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a JSON config object; parse errors name the offending line."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"Cannot read config file {path}: {err}") from err

    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise UsageError(
            f"{path}:{err.lineno}:{err.colno}: {err.msg}",
            details={"line": err.lineno, "column": err.colno},
        ) from err

    if not isinstance(data, dict):
        raise UsageError(f"{path}: top-level JSON value must be an object")
    return data


@dataclass(frozen=True)
class SearchConfig:
    """Budget and seed of an orbit search.

    Attributes:
        max_iterations: Gradient steps per restart
        restarts: Haar-random restarts after the aligned start
        step_init: Initial step length
        grad_eps: Central finite-difference scale
        seed: Master seed; restart r uses the sub-seed (seed, r)
        target_gap: Acceptance threshold relative to the problem scale (<= 0)
        workers: Threads used to run restarts concurrently
    """

    max_iterations: int = DEFAULT_MAX_ITERATIONS
    restarts: int = DEFAULT_RESTARTS
    step_init: float = DEFAULT_STEP_INIT
    grad_eps: float = DEFAULT_GRAD_EPS
    seed: int = DEFAULT_SEED
    target_gap: float = DEFAULT_TARGET_GAP
    workers: int = 1

    def __post_init__(self) -> None:
        validated = validate_mapping(SEARCH_CONFIG_SCHEMA, asdict(self), prefix="search")
        for key, value in validated.items():
            object.__setattr__(self, key, value)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> SearchConfig:
        return cls(**validate_mapping(SEARCH_CONFIG_SCHEMA, data, prefix="search"))

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class SuiteConfig:
    """Grid, trial count and seeds of a property suite run."""

    dims: tuple[int, ...] = DEFAULT_DIMS
    p_grid: tuple[float, ...] = DEFAULT_P_GRID
    q_grid: tuple[float, ...] = DEFAULT_Q_GRID
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    workers: int = 1
    search: SearchConfig = field(default_factory=SearchConfig)
    include_timestamp: bool = True

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> SuiteConfig:
        """Validate a mapping (e.g. a JSON config file) into a SuiteConfig.

        A missing seed resolves through $ORBITCERT_SEED, then DEFAULT_SEED.
        """
        validated = validate_mapping(SUITE_CONFIG_SCHEMA, data)
        seed = resolve_seed(validated.get("seed"))
        return cls(
            dims=tuple(sorted(set(validated["dims"]))),
            p_grid=tuple(validated["p_grid"]),
            q_grid=tuple(validated["q_grid"]),
            trials=validated["trials"],
            seed=seed,
            workers=validated["workers"],
            search=SearchConfig(**validated["search"]),
            include_timestamp=validated["include_timestamp"],
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "dims": list(self.dims),
            "p_grid": list(self.p_grid),
            "q_grid": list(self.q_grid),
            "trials": self.trials,
            "seed": self.seed,
            "workers": self.workers,
            "search": self.search.to_dict(),
        }
