"""Tests for certificates and their independent verification."""

from __future__ import annotations

import dataclasses
import json

import numpy as np
import pytest

from orbitcert.certificates import (
    Certificate,
    Direction,
    OrbitSide,
    Transform,
    TransformKind,
    verify_certificate,
)
from orbitcert.errors import CertificateFormatError, ShapeError
from orbitcert.generators import haar_unitary

from conftest import random_psd


@pytest.fixture
def certificate(rng: np.random.Generator) -> Certificate:
    """U S U* <= U S U* + I with a Haar unitary U."""
    u = haar_unitary(3, rng)
    s = random_psd(rng, 3)
    orbit = u @ s @ u.conj().T
    return Certificate.build(
        "example",
        [Transform.unitary(u)],
        Direction.LHS_LE_RHS,
        lhs=orbit,
        rhs=orbit + np.eye(3),
        terms=[s],
        orbit_side=OrbitSide.LHS,
    )


def test_gap_and_verification(certificate: Certificate) -> None:
    assert certificate.gap_min_eig == pytest.approx(1.0)
    assert certificate.holds
    report = verify_certificate(certificate)
    assert report.holds
    assert report.problems == ()
    assert report.recomputed_gap == pytest.approx(1.0)
    assert report.orbit_residual is not None and report.orbit_residual <= 1e-12
    assert max(report.transform_defects) <= 1e-12


def test_serialization_round_trip(certificate: Certificate) -> None:
    payload = json.loads(json.dumps(certificate.to_dict()))
    restored = Certificate.from_dict(payload)

    assert restored.statement == certificate.statement
    assert restored.direction is Direction.LHS_LE_RHS
    assert restored.gap_min_eig == certificate.gap_min_eig
    np.testing.assert_array_equal(restored.lhs.data, certificate.lhs.data)
    assert verify_certificate(restored).holds


def test_tampered_gap_is_detected(certificate: Certificate) -> None:
    tampered = dataclasses.replace(certificate, gap_min_eig=certificate.gap_min_eig + 0.5)
    report = verify_certificate(tampered)
    assert not report.holds
    assert any("recorded gap" in problem for problem in report.problems)


def test_wrong_direction_fails(certificate: Certificate) -> None:
    wrong = Certificate.build(
        "example",
        certificate.transforms,
        Direction.LHS_GE_RHS,
        lhs=certificate.lhs,
        rhs=certificate.rhs,
        terms=certificate.terms,
    )
    assert wrong.gap_min_eig == pytest.approx(-1.0)
    assert not wrong.holds
    assert not verify_certificate(wrong).holds


def test_non_unitary_transform_is_detected(certificate: Certificate) -> None:
    broken = dataclasses.replace(certificate, transforms=(Transform.unitary(2 * np.eye(3)),))
    report = verify_certificate(broken)
    assert not report.holds
    assert any("orthonormality" in problem for problem in report.problems)
    assert any("orbit side" in problem for problem in report.problems)


def test_oversized_tolerance_is_rejected(certificate: Certificate) -> None:
    loose = dataclasses.replace(certificate, tol_used=1e-3)
    report = verify_certificate(loose)
    assert any("tol_used" in problem for problem in report.problems)


def test_flipped_keeps_the_inequality(certificate: Certificate) -> None:
    flipped = certificate.flipped()
    assert flipped.direction is Direction.LHS_GE_RHS
    assert flipped.orbit_side is OrbitSide.RHS
    np.testing.assert_array_equal(flipped.lhs.data, certificate.rhs.data)
    assert verify_certificate(flipped).holds
    assert flipped.flipped().direction is Direction.LHS_LE_RHS


def test_equality_certificate() -> None:
    exact = Certificate.build("eq", [], Direction.EQUALITY, lhs=np.eye(2), rhs=np.eye(2))
    assert exact.tol_used == pytest.approx(1e-10)
    assert verify_certificate(exact).holds

    off = Certificate.build("eq", [], Direction.EQUALITY, lhs=np.eye(2), rhs=1.001 * np.eye(2))
    assert not off.holds
    assert not verify_certificate(off).holds


def test_isometry_transform(rng: np.random.Generator) -> None:
    iso = haar_unitary(4, rng)[:, :2]
    s = random_psd(rng, 2)
    orbit = iso @ s @ iso.conj().T
    certificate = Certificate.build(
        "iso",
        [Transform.isometry(iso)],
        Direction.EQUALITY,
        lhs=orbit,
        rhs=orbit,
        terms=[s],
        orbit_side=OrbitSide.RHS,
    )
    assert certificate.transforms[0].kind is TransformKind.ISOMETRY
    assert verify_certificate(certificate).holds


def test_transform_shape_rules() -> None:
    with pytest.raises(ShapeError):
        Transform.unitary(np.ones((3, 2)))
    with pytest.raises(ShapeError):
        Transform.isometry(np.eye(2))


def test_mismatched_sides() -> None:
    with pytest.raises(ShapeError):
        Certificate.build("bad", [], Direction.LHS_LE_RHS, lhs=np.eye(2), rhs=np.eye(3))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda payload: payload.pop("lhs"),
        lambda payload: payload.update(direction="sideways"),
        lambda payload: payload["rhs"].update(rows=5),
        lambda payload: payload["transforms"][0].update(kind="rotation"),
    ],
)
def test_malformed_payloads(certificate: Certificate, mutate) -> None:
    payload = json.loads(json.dumps(certificate.to_dict()))
    mutate(payload)
    with pytest.raises(CertificateFormatError):
        Certificate.from_dict(payload)
