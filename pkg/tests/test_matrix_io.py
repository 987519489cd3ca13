"""Tests for the .cmat format and JSON matrix embedding."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from orbitcert.errors import MatrixValidationError, UsageError
from orbitcert.matrix_io import (
    array_from_dict,
    format_cmat,
    matrix_to_dict,
    parse_cmat,
    read_cmat,
    validate_cmat_lines,
    write_cmat,
)

from conftest import random_complex

NILPOTENT_CMAT = """2 2
0 0
1 0
0 0
0 0
"""


def test_parse_row_major() -> None:
    matrix = parse_cmat(NILPOTENT_CMAT)
    np.testing.assert_array_equal(matrix.data, [[0, 1], [0, 0]])


def test_blank_lines_are_ignored() -> None:
    matrix = parse_cmat("\n1 2\n\n1.5 -2\n0 1e-3\n\n")
    np.testing.assert_array_equal(matrix.data, [[1.5 - 2j, 1e-3j]])


def test_file_round_trip_is_bit_exact(tmp_path: Path, rng: np.random.Generator) -> None:
    data = random_complex(rng, 3)
    path = tmp_path / "a.cmat"
    write_cmat(path, data)
    np.testing.assert_array_equal(read_cmat(path).data, data)
    assert format_cmat(read_cmat(path)) == path.read_text(encoding="utf-8")


def test_errors_name_every_bad_line() -> None:
    errors = validate_cmat_lines(["2 1", "nan 0", "x"])
    assert len(errors) == 2
    assert errors[0].startswith("line 2")
    assert errors[1].startswith("line 3")


@pytest.mark.parametrize(
    "text",
    ["", "2\n", "a b\n", "0 2\n", "1 1\n", "1 1\n1 0\n2 0\n", "1 1\n1 0 0\n", "1 1\ninf 0\n"],
)
def test_rejects_malformed(text: str) -> None:
    with pytest.raises(MatrixValidationError):
        parse_cmat(text)


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(UsageError):
        read_cmat(tmp_path / "absent.cmat")


def test_json_embedding(rng: np.random.Generator) -> None:
    data = random_complex(rng, 2)
    payload = matrix_to_dict(data)
    assert payload["rows"] == 2 and payload["cols"] == 2
    assert len(payload["entries"]) == 4
    np.testing.assert_array_equal(array_from_dict(payload), data)


@pytest.mark.parametrize(
    "payload",
    [
        {"rows": 1, "cols": 1},
        {"rows": 1, "cols": 2, "entries": [[1, 0]]},
        {"rows": 1, "cols": 1, "entries": [["x", 0]]},
        {"rows": 0, "cols": 0, "entries": []},
    ],
)
def test_json_embedding_rejects(payload: dict) -> None:
    with pytest.raises(MatrixValidationError):
        array_from_dict(payload)
