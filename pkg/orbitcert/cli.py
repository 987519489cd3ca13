"""Command-line interface: verify, construct, search, stress, check-cert.

Exit codes: 0 all pass, 1 check failed, 2 usage error, 3 search did not
converge. Errors are printed to stderr as a JSON ErrorResponse.
"""

from __future__ import annotations

import argparse
from collections.abc import Callable, Sequence
import json
import logging
from pathlib import Path
import sys
from typing import Any, Optional

from . import __version__, checks, constructions, orbit_search
from .certificates import Certificate, verify_certificate
from .config import SearchConfig, load_config_file, resolve_seed
from .const import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_RESTARTS,
    EXIT_CHECK_FAILED,
    EXIT_OK,
    EXIT_USAGE,
)
from .errors import (
    CertificateFormatError,
    RegimeError,
    SearchNotConvergedError,
    UsageError,
    handle_exception,
)
from .matrices import ComplexMatrix
from .matrix_io import read_cmat
from .spectral import PowerFunction
from .suites import ALL_SUITES, SUITE_NAMES, run_suite
from .validation import Regime, require, validate_dims, validate_exponent

_LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# ============================================================================
# Helpers
# ============================================================================


def _dump(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_json(payload: Any, path: Optional[str]) -> None:
    text = _dump(payload)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as err:
        raise UsageError(f"Cannot write {path}: {err}") from err
    _LOGGER.info("Wrote %s", path)


def _exponent(args: argparse.Namespace) -> Optional[float]:
    return args.q if args.q is not None else args.p


def _require_exponent(args: argparse.Namespace, regime: Regime, name: str = "p") -> float:
    value = _exponent(args)
    if value is None:
        raise UsageError(f"--{name} is required for this command")
    return require(validate_exponent(value, regime, name), RegimeError)


def _require_b(args: argparse.Namespace) -> ComplexMatrix:
    if args.b is None:
        raise UsageError("--b is required for this command")
    return read_cmat(args.b)


def _search_config(args: argparse.Namespace) -> SearchConfig:
    return SearchConfig(
        max_iterations=getattr(args, "max_iterations", DEFAULT_MAX_ITERATIONS),
        restarts=args.restarts,
        seed=resolve_seed(args.seed),
        workers=getattr(args, "workers", 1),
    )


def _certificate_payload(
    certificate: Certificate, trace: Optional[orbit_search.SearchTrace] = None
) -> dict[str, Any]:
    payload = certificate.to_dict()
    if trace is not None:
        payload["search_trace"] = trace.to_dict()
    return payload


# ============================================================================
# verify
# ============================================================================


def _weyl(which: str) -> Callable[[argparse.Namespace, ComplexMatrix], list]:
    regime = Regime.BELOW_TWO if which == "cor4" else Regime.ABOVE_TWO
    name = "q" if which == "cor4" else "p"

    def run(args: argparse.Namespace, a: ComplexMatrix) -> list:
        exponent = _require_exponent(args, regime, name)
        return [checks.check_weyl_split(a, _require_b(args), exponent, args.j, args.k, which)]

    return run


VERIFY_CHECKS: dict[str, Callable[[argparse.Namespace, ComplexMatrix], list]] = {
    "clarkson-trace": lambda args, a: [
        checks.check_clarkson_trace(a, _require_b(args), _require_exponent(args, Regime.POSITIVE))
    ],
    "weak-majorization": lambda args, a: [
        checks.check_weak_majorization(
            a, _require_b(args), _require_exponent(args, Regime.AT_LEAST_TWO)
        )
    ],
    "antinorm-sum": lambda args, a: [
        checks.check_antinorm_superadditivity(
            a, _require_b(args), _require_exponent(args, Regime.ABOVE_TWO), "sum"
        )
    ],
    "antinorm-geomean": lambda args, a: [
        checks.check_antinorm_superadditivity(
            a, _require_b(args), _require_exponent(args, Regime.ABOVE_TWO), "geomean"
        )
    ],
    "weyl-cor3": _weyl("cor3"),
    "weyl-cor4": _weyl("cor4"),
    "weyl-cor5": _weyl("cor5"),
    "parallelogram": lambda args, a: [checks.check_parallelogram_identity(a, _require_b(args))],
    "uniform-convexity": lambda args, a: [
        checks.check_uniform_convexity(
            a, _require_b(args), _require_exponent(args, Regime.AT_LEAST_TWO)
        )
    ],
    "symmetric-norm": lambda args, a: [
        checks.check_symmetric_norm_clarkson(
            a, _require_b(args), _require_exponent(args, Regime.POSITIVE)
        )
    ],
    "direct-sum-halved": lambda args, a: [
        checks.check_direct_sum_spectra(
            a, _require_b(args), _require_exponent(args, Regime.NOT_TWO), "halved"
        )
    ],
    "direct-sum-four-term": lambda args, a: [
        checks.check_direct_sum_spectra(
            a, _require_b(args), _require_exponent(args, Regime.NOT_TWO), "four_term"
        )
    ],
    "cartesian": lambda args, a: checks.check_cartesian_readings(a),
}


def cmd_verify(args: argparse.Namespace) -> int:
    a = read_cmat(args.a)
    results = VERIFY_CHECKS[args.check](args, a)
    payload: Any = results[0].to_dict() if len(results) == 1 else [r.to_dict() for r in results]
    _write_json(payload, args.json)
    failed = [result.name for result in results if not result.holds]
    if failed:
        _LOGGER.warning("Check(s) failed: %s", ", ".join(failed))
        return EXIT_CHECK_FAILED
    return EXIT_OK


# ============================================================================
# construct
# ============================================================================

CONSTRUCT_STATEMENTS: tuple[str, ...] = (
    "theorem1",
    "theorem3",
    "key2",
    "cartesian",
    "direct-sum-cm",
)


def cmd_construct(args: argparse.Namespace) -> int:
    a = read_cmat(args.a)
    provider = orbit_search.make_key1_provider(_search_config(args))

    if args.statement == "theorem1":
        p = _require_exponent(args, Regime.ABOVE_TWO)
        certificates = [constructions.theorem1_certificate(a, _require_b(args), p, provider)]
    elif args.statement == "theorem3":
        certificates = [constructions.parallelogram_isometries(a, _require_b(args))]
    elif args.statement == "key2":
        p = _require_exponent(args, Regime.POSITIVE)
        certificates = [
            constructions.key2_certificate(a, _require_b(args), PowerFunction(p / 2), p >= 2)
        ]
    elif args.statement == "cartesian":
        certificates = list(constructions.cartesian_certificates(a, args.reading, provider))
    else:
        p = _require_exponent(args, Regime.ABOVE_TWO)
        certificates = [constructions.direct_sum_cm_certificate(a, _require_b(args), p)]

    payload: Any = (
        certificates[0].to_dict()
        if len(certificates) == 1
        else [certificate.to_dict() for certificate in certificates]
    )
    _write_json(payload, args.out)
    return EXIT_OK if all(certificate.holds for certificate in certificates) else EXIT_CHECK_FAILED


# ============================================================================
# search
# ============================================================================

SEARCH_STATEMENTS: tuple[str, ...] = ("key1", "theorem2", "direct-sum-q")


def cmd_search(args: argparse.Namespace) -> int:
    a = read_cmat(args.a)
    b = _require_b(args)
    cfg = _search_config(args)

    if args.statement == "key1":
        p = _require_exponent(args, Regime.NOT_TWO)
        certificate, trace = orbit_search.key1_certificate(a, b, PowerFunction(p / 2), p > 2, cfg)
    elif args.statement == "theorem2":
        q = _require_exponent(args, Regime.BELOW_TWO, "q")
        certificate, trace = orbit_search.theorem2_certificate(a, b, q, cfg)
    else:
        q = _require_exponent(args, Regime.NOT_TWO, "q")
        certificate, trace = orbit_search.direct_sum_power_certificates(a, b, q, cfg, args.form)

    _write_json(_certificate_payload(certificate, trace), args.out)
    if not trace.converged:
        raise SearchNotConvergedError(
            f"Search for {certificate.statement} stopped at gap {trace.final_gap:.3e}",
            trace=trace,
        )
    if not verify_certificate(certificate).holds:
        return EXIT_CHECK_FAILED
    return EXIT_OK


# ============================================================================
# stress
# ============================================================================


def cmd_stress(args: argparse.Namespace) -> int:
    mapping: dict[str, Any] = load_config_file(args.config) if args.config else {}
    if args.dims is not None:
        mapping["dims"] = list(require(validate_dims(args.dims), UsageError))
    if args.trials is not None:
        mapping["trials"] = args.trials
    if args.workers is not None:
        mapping["workers"] = args.workers
    if args.seed is not None:
        mapping["seed"] = resolve_seed(args.seed)
    if args.no_timestamp:
        mapping["include_timestamp"] = False

    report = run_suite(args.suite, mapping)
    text = report.to_json()
    if args.json is None:
        sys.stdout.write(text)
    else:
        try:
            Path(args.json).write_text(text, encoding="utf-8")
        except OSError as err:
            raise UsageError(f"Cannot write {args.json}: {err}") from err

    counts = report.counts
    sys.stderr.write(
        f"{report.name}: {counts['pass']} pass, {counts['fail']} fail, {counts['error']} error, "
        f"{counts['not_converged']} not converged, convergence {report.convergence_rate:.3f}\n"
    )
    return report.exit_code


# ============================================================================
# check-cert
# ============================================================================


def cmd_check_cert(args: argparse.Namespace) -> int:
    path = Path(args.input)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as err:
        raise UsageError(f"Cannot read certificate file {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise CertificateFormatError(
            f"{path}:{err.lineno}:{err.colno}: {err.msg}",
            details={"line": err.lineno, "column": err.colno},
        ) from err

    items = payload if isinstance(payload, list) else [payload]
    reports = [verify_certificate(Certificate.from_dict(item)) for item in items]
    output: Any = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
    _write_json(output, None)
    return EXIT_OK if all(report.holds for report in reports) else EXIT_CHECK_FAILED


# ============================================================================
# Parser
# ============================================================================


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")


def _add_exponents(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--p", type=float, help="exponent p")
    group.add_argument("--q", type=float, help="exponent q (0 < q < 2)")


def _add_search_budget(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", help="master seed (default: $ORBITCERT_SEED or built-in)")
    parser.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitcert",
        description="Certificates for Clarkson-McCarthy type operator inequalities.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    verify = subparsers.add_parser("verify", help="run one inequality check")
    verify.add_argument("--check", required=True, choices=sorted(VERIFY_CHECKS))
    verify.add_argument("--a", required=True, help="A as .cmat")
    verify.add_argument("--b", help="B as .cmat")
    _add_exponents(verify)
    verify.add_argument("--j", type=int, default=0)
    verify.add_argument("--k", type=int, default=0)
    verify.add_argument("--json", help="write the result here instead of stdout")
    _add_common(verify)
    verify.set_defaults(handler=cmd_verify)

    construct = subparsers.add_parser("construct", help="build an exact certificate")
    construct.add_argument("--statement", required=True, choices=CONSTRUCT_STATEMENTS)
    construct.add_argument("--a", required=True)
    construct.add_argument("--b")
    _add_exponents(construct)
    construct.add_argument("--reading", choices=constructions.CARTESIAN_READINGS, default="adjoint")
    construct.add_argument("--out", help="certificate JSON path (default stdout)")
    _add_search_budget(construct)
    _add_common(construct)
    construct.set_defaults(handler=cmd_construct)

    search = subparsers.add_parser("search", help="search a unitary-orbit certificate")
    search.add_argument("--statement", required=True, choices=SEARCH_STATEMENTS)
    search.add_argument("--a", required=True)
    search.add_argument("--b", required=True)
    _add_exponents(search)
    search.add_argument("--form", choices=orbit_search.DIRECT_SUM_FORMS, default="four_term")
    search.add_argument("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS)
    search.add_argument("--workers", type=int, default=1)
    search.add_argument("--out", help="certificate JSON path (default stdout)")
    _add_search_budget(search)
    _add_common(search)
    search.set_defaults(handler=cmd_search)

    stress = subparsers.add_parser("stress", help="run a property suite")
    stress.add_argument("--suite", required=True, choices=[*SUITE_NAMES, ALL_SUITES])
    stress.add_argument("--dims", help="e.g. 1..6 or 1,2,3")
    stress.add_argument("--trials", type=int)
    stress.add_argument("--seed")
    stress.add_argument("--workers", type=int)
    stress.add_argument("--config", help="suite config JSON")
    stress.add_argument("--json", help="write the report here instead of stdout")
    stress.add_argument("--no-timestamp", action="store_true", help="omit wall_time")
    _add_common(stress)
    stress.set_defaults(handler=cmd_stress)

    check_cert = subparsers.add_parser("check-cert", help="re-verify a serialized certificate")
    check_cert.add_argument("--in", dest="input", required=True)
    _add_common(check_cert)
    check_cert.set_defaults(handler=cmd_check_cert)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return EXIT_USAGE if exit_.code not in (0, None) else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )

    try:
        return args.handler(args)
    except Exception as err:
        response = handle_exception(err, context={"command": args.command})
        sys.stderr.write(json.dumps(response.to_dict(), sort_keys=True, default=str) + "\n")
        return response.exit_code


if __name__ == "__main__":
    sys.exit(main())
