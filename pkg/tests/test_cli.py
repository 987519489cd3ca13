"""Tests for the command-line interface."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from orbitcert import __version__
from orbitcert.cli import main
from orbitcert.matrix_io import write_cmat

from conftest import random_complex, random_psd


@pytest.fixture
def operands(tmp_path: Path, rng: np.random.Generator) -> tuple[str, str]:
    a_path, b_path = tmp_path / "a.cmat", tmp_path / "b.cmat"
    write_cmat(a_path, random_complex(rng, 3))
    write_cmat(b_path, random_complex(rng, 3))
    return str(a_path), str(b_path)


@pytest.fixture
def diagonal_operands(tmp_path: Path) -> tuple[str, str]:
    a_path, b_path = tmp_path / "da.cmat", tmp_path / "db.cmat"
    write_cmat(a_path, np.diag([2.0, 1.0 + 1.0j, -0.5]))
    write_cmat(b_path, np.diag([0.5j, 1.5, 1.0]))
    return str(a_path), str(b_path)


def _stderr_error(capsys) -> dict:
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


def test_verify_clarkson_trace(operands, capsys) -> None:
    a, b = operands
    assert main(["verify", "--check", "clarkson-trace", "--a", a, "--b", b, "--p", "3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["name"] == "clarkson_trace"
    assert payload["holds"] is True
    assert len(payload["details"]) == 3


def test_verify_cartesian_prints_both_readings(operands, capsys) -> None:
    a, _ = operands
    assert main(["verify", "--check", "cartesian", "--a", a]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert sorted(item["name"] for item in payload) == ["cartesian_adjoint", "cartesian_paired"]


def test_verify_writes_json_file(operands, tmp_path: Path) -> None:
    a, b = operands
    out = tmp_path / "result.json"
    code = main(
        ["verify", "--check", "weyl-cor4", "--a", a, "--b", b, "--q", "1", "--j", "1", "--k", "1"]
    )
    assert code == 0
    code = main(
        ["verify", "--check", "parallelogram", "--a", a, "--b", b, "--json", str(out)]
    )
    assert code == 0
    assert json.loads(out.read_text(encoding="utf-8"))["name"] == "parallelogram_identity"


def test_verify_missing_b(operands, capsys) -> None:
    a, _ = operands
    assert main(["verify", "--check", "clarkson-trace", "--a", a, "--p", "3"]) == 2
    assert _stderr_error(capsys)["error"] == "usage_error"


def test_verify_exponent_out_of_regime(operands, capsys) -> None:
    a, b = operands
    assert main(["verify", "--check", "antinorm-sum", "--a", a, "--b", b, "--p", "1.5"]) == 2
    assert _stderr_error(capsys)["error"] == "invalid_exponent"


def test_verify_index_out_of_range(operands, capsys) -> None:
    a, b = operands
    code = main(
        ["verify", "--check", "weyl-cor3", "--a", a, "--b", b, "--p", "3", "--j", "2", "--k", "1"]
    )
    assert code == 2
    assert _stderr_error(capsys)["error"] == "index_out_of_range"


def test_verify_missing_file(tmp_path: Path) -> None:
    missing = str(tmp_path / "missing.cmat")
    assert main(["verify", "--check", "cartesian", "--a", missing]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--check", "nonsense", "--a", "x.cmat"],
        ["verify", "--a", "x.cmat"],
        ["frobnicate"],
        ["verify", "--check", "clarkson-trace", "--a", "x.cmat", "--p", "3", "--q", "1"],
    ],
)
def test_argument_errors(argv: list[str]) -> None:
    assert main(argv) == 2


def test_help_and_version(capsys) -> None:
    assert main(["--help"]) == 0
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_construct_then_check_cert(diagonal_operands, tmp_path: Path, capsys) -> None:
    a, b = diagonal_operands
    cert = tmp_path / "theorem1.json"
    code = main(
        ["construct", "--statement", "theorem1", "--a", a, "--b", b, "--p", "3", "--out", str(cert)]
    )
    assert code == 0
    payload = json.loads(cert.read_text(encoding="utf-8"))
    assert payload["statement"] == "theorem1"
    assert len(payload["transforms"]) == 2

    assert main(["check-cert", "--in", str(cert)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["holds"] is True
    assert report["problems"] == []


def test_construct_single_certificates(
    operands, tmp_path: Path, rng: np.random.Generator, capsys
) -> None:
    a, b = operands
    assert main(["construct", "--statement", "theorem3", "--a", a, "--b", b]) == 0
    assert json.loads(capsys.readouterr().out)["direction"] == "equality"

    x, y = tmp_path / "x.cmat", tmp_path / "y.cmat"
    write_cmat(x, random_psd(rng, 3))
    write_cmat(y, random_psd(rng, 3))
    code = main(["construct", "--statement", "key2", "--a", str(x), "--b", str(y), "--p", "3"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["statement"] == "key2"


def test_construct_cartesian_lists_both_certificates(tmp_path: Path, capsys) -> None:
    z = tmp_path / "z.cmat"
    write_cmat(z, np.diag([2.0, -1.0, 0.5]))
    assert main(["construct", "--statement", "cartesian", "--a", str(z)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert isinstance(payload, list)
    assert [item["statement"] for item in payload] == [
        "cartesian_adjoint",
        "cartesian_sqrt_adjoint",
    ]


def test_tampered_certificate_fails(operands, tmp_path: Path, capsys) -> None:
    a, b = operands
    cert = tmp_path / "theorem3.json"
    assert main(["construct", "--statement", "theorem3", "--a", a, "--b", b, "--out", str(cert)]) == 0

    payload = json.loads(cert.read_text(encoding="utf-8"))
    entries = payload["transforms"][0]["entries"]
    payload["transforms"][0]["entries"] = [[2 * re, 2 * im] for re, im in entries]
    cert.write_text(json.dumps(payload), encoding="utf-8")
    capsys.readouterr()

    assert main(["check-cert", "--in", str(cert)]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["holds"] is False
    assert report["problems"]


def test_malformed_certificate(tmp_path: Path, capsys) -> None:
    cert = tmp_path / "broken.json"
    cert.write_text('{"statement": "theorem1",\n  "direction": }', encoding="utf-8")
    assert main(["check-cert", "--in", str(cert)]) == 2
    error = _stderr_error(capsys)
    assert error["error"] == "invalid_certificate"
    assert error["details"]["line"] == 2

    cert.write_text('{"statement": "theorem1"}', encoding="utf-8")
    assert main(["check-cert", "--in", str(cert)]) == 2


def test_search_commuting_key1(tmp_path: Path) -> None:
    out = tmp_path / "key1.json"
    psd_a, psd_b = tmp_path / "pa.cmat", tmp_path / "pb.cmat"
    write_cmat(psd_a, np.diag([2.0, 1.0, 0.5]))
    write_cmat(psd_b, np.diag([0.25, 1.5, 1.0]))
    code = main(
        ["search", "--statement", "key1", "--a", str(psd_a), "--b", str(psd_b), "--p", "3",
         "--out", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["search_trace"]["iterations_used"] == 0
    assert payload["search_trace"]["converged"] is True


def test_stress_identities(capsys) -> None:
    code = main(
        ["stress", "--suite", "identities", "--dims", "1,2", "--trials", "2", "--seed", "5",
         "--no-timestamp"]
    )
    assert code == 0
    captured = capsys.readouterr()
    report = json.loads(captured.out)
    assert report["suite"] == "identities"
    assert report["config"]["dims"] == [1, 2]
    assert report["config"]["seed"] == 5
    assert "wall_time" not in report
    assert "identities:" in captured.err


def test_stress_config_file(tmp_path: Path, capsys) -> None:
    config = tmp_path / "suite.json"
    config.write_text(json.dumps({"dims": [2], "trials": 1, "p_grid": [4.0]}), encoding="utf-8")
    report_path = tmp_path / "report.json"
    code = main(
        ["stress", "--suite", "majorization", "--config", str(config), "--json", str(report_path)]
    )
    assert code == 0
    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert report["config"]["p_grid"] == [4.0]
    assert "wall_time" in report


def test_stress_bad_config(tmp_path: Path) -> None:
    config = tmp_path / "suite.json"
    config.write_text(json.dumps({"dims": [0]}), encoding="utf-8")
    assert main(["stress", "--suite", "trace", "--config", str(config)]) == 2


@pytest.mark.slow
def test_search_theorem2(operands, tmp_path: Path) -> None:
    a, b = operands
    out = tmp_path / "theorem2.json"
    code = main(
        ["search", "--statement", "theorem2", "--a", a, "--b", b, "--q", "1", "--out", str(out)]
    )
    assert code in (0, 3)
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["statement"] == "theorem2"
    if code == 0:
        assert main(["check-cert", "--in", str(out)]) == 0
