"""Property suites over seeded generator grids.

A suite is a list of independent cells (generator x exponent x trial). Each
cell derives its seed from (master seed, suite id, cell index), runs its
checks and constructions, and returns case records plus per-operation
invocation counts. Cells may run on a thread pool; aggregation follows cell
order, so a report is reproducible from (suite name, config).

Every n = 1 check is re-evaluated in scalar real arithmetic (the scalar
oracle) and compared detail by detail.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import StrEnum
import json
import logging
import math
import time
from typing import Any, Optional, Union

import numpy as np
import scipy.linalg

from . import checks, constructions, orbit_search
from .certificates import Certificate, verify_certificate
from .checks import CheckResult, Detail
from .config import SearchConfig, SuiteConfig
from .const import (
    ALIGN_SLACK,
    CHECK_TOL,
    COMMUTE_TOL,
    DEFAULT_SEARCH_DIMS,
    EXACT_GAP_TOL,
    EXIT_CHECK_FAILED,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    HERMITIAN_TOL,
    IDENTITY_TOL,
    ORTHO_TOL,
    PSD_TOL,
    RECON_TOL,
    SCHEMA_VERSION,
)
from .errors import OrbitCertError, SearchNotConvergedError, UsageError, log_error
from .generators import (
    GeneratorKind,
    GeneratorSpec,
    derive_seed,
    generate,
    generate_pair,
    haar_unitary,
)
from .matrices import ComplexMatrix, PsdMatrix
from .spectral import PowerFunction, apply_spectral_function, psd_gap

_LOGGER = logging.getLogger(__name__)

SUITE_NAMES: tuple[str, ...] = (
    "identities",
    "trace",
    "majorization",
    "eigenvalue",
    "certificates",
    "search",
)
ALL_SUITES = "all"

# Seed stream of each suite; "all" reuses them so its cases match the single suites.
_SUITE_IDS: dict[str, int] = {name: index for index, name in enumerate(SUITE_NAMES)}

PAIR_KINDS: tuple[GeneratorKind, ...] = (
    GeneratorKind.GINIBRE,
    GeneratorKind.HERMITIAN,
    GeneratorKind.PSD,
    GeneratorKind.COMMUTING_PAIR,
    GeneratorKind.RANK_DEFICIENT,
    GeneratorKind.NORMAL,
)

SEARCH_DIM_LIMIT: int = max(DEFAULT_SEARCH_DIMS)
DIRECT_SUM_SEARCH_DIM_LIMIT: int = 2
GRADIENT_TOL: float = 1e-4
ORACLE_TOL: float = 1e-9
MIN_CONVERGENCE_RATE: float = 0.95

_SEARCH_STREAM = 1
_BLOCK_STREAM = 2
_ROTATION_STREAM = 3


class Outcome(StrEnum):
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"
    NOT_CONVERGED = "not_converged"


def _finite(value: Any) -> Any:
    """Recursively map non-finite floats to None for JSON."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, Mapping):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


@dataclass(frozen=True)
class CaseRecord:
    """One check or certificate outcome inside a suite."""

    suite: str
    operation: str
    generator: dict[str, Any]
    params: dict[str, Any]
    outcome: Outcome
    margin: Optional[float] = None
    converged: Optional[bool] = None
    trace: Optional[dict[str, Any]] = None
    message: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {
            "suite": self.suite,
            "operation": self.operation,
            "generator": self.generator,
            "params": self.params,
            "outcome": self.outcome.value,
            "margin": self.margin,
        }
        if self.converged is not None:
            result["converged"] = self.converged
        if self.trace is not None:
            result["trace"] = self.trace
        if self.message:
            result["message"] = self.message
        return result


@dataclass(frozen=True)
class SuiteReport:
    """Aggregated result of a suite run.

    Attributes:
        name: Suite name
        config: Configuration the suite ran with
        cases: Per-case records in cell order
        operation_counts: Direct invocations per operation
        scalar_cases: n = 1 checks re-evaluated by the scalar oracle
        scalar_disagreements: Descriptions of oracle mismatches
        wall_time: Seconds spent in the run
    """

    name: str
    config: SuiteConfig
    cases: tuple[CaseRecord, ...]
    operation_counts: dict[str, int]
    scalar_cases: int
    scalar_disagreements: tuple[str, ...]
    wall_time: float

    @property
    def counts(self) -> dict[str, int]:
        tally = Counter(case.outcome.value for case in self.cases)
        result = {outcome.value: tally.get(outcome.value, 0) for outcome in Outcome}
        result["total"] = len(self.cases)
        return result

    @property
    def convergence_rate(self) -> float:
        """Share of searched cases that converged (1.0 when nothing was searched)."""
        searched = [case.converged for case in self.cases if case.converged is not None]
        if not searched:
            return 1.0
        return sum(1 for converged in searched if converged) / len(searched)

    @property
    def exit_code(self) -> int:
        counts = self.counts
        if counts[Outcome.FAIL.value] or counts[Outcome.ERROR.value] or self.scalar_disagreements:
            return EXIT_CHECK_FAILED
        if self.convergence_rate < MIN_CONVERGENCE_RATE:
            return EXIT_NOT_CONVERGED
        return EXIT_OK

    def to_dict(self, include_timestamp: Optional[bool] = None) -> dict[str, Any]:
        if include_timestamp is None:
            include_timestamp = self.config.include_timestamp
        result: dict[str, Any] = {
            "schema": SCHEMA_VERSION,
            "suite": self.name,
            "config": {
                **self.config.to_dict(),
                "tolerances": {
                    "hermitian_tol": HERMITIAN_TOL,
                    "psd_tol": PSD_TOL,
                    "ortho_tol": ORTHO_TOL,
                    "recon_tol": RECON_TOL,
                    "check_tol": CHECK_TOL,
                    "identity_tol": IDENTITY_TOL,
                    "align_slack": ALIGN_SLACK,
                    "commute_tol": COMMUTE_TOL,
                    "oracle_tol": ORACLE_TOL,
                    "gradient_tol": GRADIENT_TOL,
                },
            },
            "counts": self.counts,
            "convergence_rate": self.convergence_rate,
            "operation_counts": dict(sorted(self.operation_counts.items())),
            "scalar_oracle": {
                "cases": self.scalar_cases,
                "disagreements": list(self.scalar_disagreements),
            },
            "cases": [case.to_dict() for case in self.cases],
            "exit_code": self.exit_code,
        }
        if include_timestamp:
            result["wall_time"] = self.wall_time
        return _finite(result)

    def to_json(self, include_timestamp: Optional[bool] = None) -> str:
        """Deterministic JSON: sorted keys, non-finite floats as null."""
        return json.dumps(self.to_dict(include_timestamp), sort_keys=True, indent=2) + "\n"


# ============================================================================
# Scalar oracle
# ============================================================================


def scalar_oracle_details(
    name: str, a: complex, b: complex, exponent: Optional[float]
) -> Optional[list[Detail]]:
    """Details of an n = 1 check recomputed from |a|, |b|, |a+b|, |a-b| alone.

    Returns None for checks the oracle does not cover.
    """
    x, y, s, d = abs(a), abs(b), abs(a + b), abs(a - b)

    if name == "parallelogram_identity":
        return [((0, 0, 0), s**2 + d**2, 2 * (x**2 + y**2)), ((0, 0, 1), 0.0, 0.0)]
    if name in ("cartesian_paired", "cartesian_adjoint"):
        z2 = x**2
        return [((0,), 2 * z2, 2 * z2), ((1,), z2, 2 * z2), ((2,), 2 * z2, 2 * z2)]
    if exponent is None:
        return None

    e = exponent
    half_p, half_m = (s / 2) ** e, (d / 2) ** e
    mean = (x**e + y**e) / 2

    def oriented(rows: list[Detail]) -> list[Detail]:
        backward = [(index, rhs, lhs) for index, lhs, rhs in rows]
        if e > 2:
            return rows
        if e < 2:
            return backward
        return rows + backward

    if name == "clarkson_trace":
        base, outer = x**e + y**e, s**e + d**e
        return oriented(
            [
                ((0,), 2 * base, outer),
                ((1,), outer, 2 ** (e - 1) * base),
                ((2,), outer / 2**e, base / 2),
            ]
        )
    if name == "symmetric_norm_clarkson":
        kx, ky = x**e + y**e, s**e + d**e
        rows: list[Detail] = []
        for left, right in [(((1, 0), 2 * kx, ky), ((1, 1), ky, 2 ** (e - 1) * kx))]:
            rows.extend(oriented([left, right]))
        return rows
    if name in ("weak_majorization", "antinorm_sum", "antinorm_geomean"):
        return [((1,), half_p + half_m, mean)]
    if name == "weyl_cor3":
        return [((0, 0), half_p + half_m, mean)]
    if name == "weyl_cor4":
        return [((0, 0), mean, half_p + half_m)]
    if name == "weyl_cor5":
        return [((0, 0), max(half_p, half_m), mean)]
    if name == "uniform_convexity":
        if x == 0.0 or y == 0.0:
            return None
        ua, ub = a / x, b / y
        eps = abs(ua - ub)
        rhs = max(0.0, 1.0 - (eps / 2) ** e) ** (1.0 / e)
        return [((0,), abs(ua + ub) / 2, rhs)]
    if name == "direct_sum_halved":
        high, low = max(half_p, half_m), min(half_p, half_m)
        outer = [high, high + low]
        inner = [mean, mean]
        if e > 2:
            return [((1,), outer[0], inner[0]), ((2,), outer[1], inner[1])]
        return [((1,), inner[0] / 2, outer[0]), ((2,), inner[1], outer[1])]
    if name == "direct_sum_four_term":
        high, low = max(s**e, d**e), min(s**e, d**e)
        outer = [high, high + low]
        if e < 2:
            return [((k,), outer[k - 1], 2 * (x**e + y**e)) for k in (1, 2)]
        return [((1,), max(x**e, y**e), outer[0]), ((2,), 2 * (x**e + y**e), outer[1])]
    return None


def _oracle_mismatch(result: CheckResult, expected: list[Detail]) -> Optional[str]:
    if len(expected) != len(result.details):
        return f"{result.name}: {len(result.details)} details, oracle has {len(expected)}"
    scale = result.scale()
    for (index, lhs, rhs), (o_index, o_lhs, o_rhs) in zip(result.details, expected):
        if tuple(index) != tuple(o_index):
            return f"{result.name}: detail {index} where the oracle has {o_index}"
        if abs(lhs - o_lhs) > ORACLE_TOL * scale or abs(rhs - o_rhs) > ORACLE_TOL * scale:
            return (
                f"{result.name}{list(index)}: ({lhs:.12g}, {rhs:.12g}) "
                f"vs oracle ({o_lhs:.12g}, {o_rhs:.12g})"
            )
    return None


# ============================================================================
# Cells
# ============================================================================


@dataclass(frozen=True)
class _Cell:
    suite: str
    index: int
    dim: int
    exponent: Optional[float]
    trial: int
    seed: int
    first_exponent: bool = True


@dataclass
class _CellContext:
    """Collects the records and invocation counts of one cell."""

    cell: _Cell
    search: SearchConfig
    records: list[CaseRecord] = field(default_factory=list)
    counts: Counter = field(default_factory=Counter)
    scalar_cases: int = 0
    disagreements: list[str] = field(default_factory=list)
    generator: dict[str, Any] = field(default_factory=dict)

    def invoke(self, operation: str, func: Callable[..., Any], *args: Any, **kwargs: Any) -> Any:
        self.counts[operation] += 1
        return func(*args, **kwargs)

    def add(self, operation: str, outcome: Outcome, **fields: Any) -> None:
        params = {"dim": self.cell.dim, "trial": self.cell.trial, **fields.pop("params", {})}
        if self.cell.exponent is not None:
            params.setdefault("exponent", self.cell.exponent)
        self.records.append(
            CaseRecord(
                suite=self.cell.suite,
                operation=operation,
                generator=self.generator,
                params=params,
                outcome=outcome,
                **fields,
            )
        )

    def error(self, operation: str, err: Exception, **params: Any) -> None:
        if isinstance(err, OrbitCertError):
            message = f"{err.code}: {err.message}"
        else:
            log_error(
                "internal_error",
                context={"suite": self.cell.suite, "operation": operation, "cell": self.cell.index},
                exception=err,
            )
            message = f"internal_error: {err!r}"
        self.add(operation, Outcome.ERROR, params=params, message=message)

    def check(
        self,
        operation: str,
        func: Callable[..., CheckResult],
        a: ComplexMatrix,
        b: Optional[ComplexMatrix],
        *args: Any,
        **params: Any,
    ) -> Optional[CheckResult]:
        """Run one check, record it, and consult the scalar oracle at n = 1."""
        try:
            operands = (a,) if b is None else (a, b)
            result = self.invoke(operation, func, *operands, *args)
        except Exception as err:
            self.error(operation, err, **params)
            return None
        for item in result if isinstance(result, list) else [result]:
            self._record_check(operation, item, a, b, params)
        return result

    def _record_check(
        self,
        operation: str,
        result: CheckResult,
        a: ComplexMatrix,
        b: Optional[ComplexMatrix],
        params: dict[str, Any],
    ) -> None:
        outcome = Outcome.PASS if result.holds else Outcome.FAIL
        self.add(
            operation,
            outcome,
            params={"check": result.name, **params},
            margin=result.margin,
        )
        if self.cell.dim != 1:
            return
        scalar_a = complex(a.data[0, 0])
        scalar_b = complex(b.data[0, 0]) if b is not None else 0j
        expected = scalar_oracle_details(result.name, scalar_a, scalar_b, self.cell.exponent)
        if expected is None:
            return
        self.scalar_cases += 1
        mismatch = _oracle_mismatch(result, expected)
        if mismatch is not None:
            _LOGGER.error("Scalar oracle disagreement in cell %d: %s", self.cell.index, mismatch)
            self.disagreements.append(f"cell {self.cell.suite}/{self.cell.index}: {mismatch}")

    def certificate(
        self,
        operation: str,
        certificate: Certificate,
        trace: Optional[orbit_search.SearchTrace] = None,
        **params: Any,
    ) -> bool:
        """Record a certificate after independent re-verification."""
        report = self.invoke("verify_certificate", verify_certificate, certificate)
        converged = None if trace is None else trace.converged
        if trace is not None and not trace.converged:
            outcome = Outcome.NOT_CONVERGED
        elif certificate.holds and report.holds:
            outcome = Outcome.PASS
        else:
            outcome = Outcome.FAIL
        self.add(
            operation,
            outcome,
            params={"statement": certificate.statement, **params},
            margin=certificate.gap_min_eig,
            converged=converged,
            trace=None if trace is None else trace.to_dict(),
            message="; ".join(report.problems) or None,
        )
        return outcome is Outcome.PASS


def _pair_kind(dim: int, trial: int) -> GeneratorKind:
    if dim == 1 and trial % 2 == 0:
        return GeneratorKind.SCALAR
    return PAIR_KINDS[trial % len(PAIR_KINDS)]


def _draw_pair(ctx: _CellContext) -> tuple[ComplexMatrix, ComplexMatrix]:
    cell = ctx.cell
    kind = _pair_kind(cell.dim, cell.trial)
    ctx.generator = GeneratorSpec(kind=kind, dim=cell.dim, seed=cell.seed).to_dict()
    return generate_pair(kind, cell.dim, cell.seed)


def _nonzero(matrix: ComplexMatrix) -> bool:
    return bool(np.any(matrix.data))


def _gram(matrix: ComplexMatrix) -> PsdMatrix:
    return PsdMatrix(matrix.data.conj().T @ matrix.data)


def _run_identities(ctx: _CellContext) -> None:
    a, b = _draw_pair(ctx)
    ctx.check("check_parallelogram_identity", checks.check_parallelogram_identity, a, b)
    ctx.check("check_cartesian_readings", checks.check_cartesian_readings, a, None)


def _run_trace(ctx: _CellContext) -> None:
    a, b = _draw_pair(ctx)
    e = ctx.cell.exponent
    ctx.check("check_clarkson_trace", checks.check_clarkson_trace, a, b, e)
    ctx.check("check_symmetric_norm_clarkson", checks.check_symmetric_norm_clarkson, a, b, e)
    if e >= 2 and _nonzero(a) and _nonzero(b):
        ctx.check("check_uniform_convexity", checks.check_uniform_convexity, a, b, e)


def _run_majorization(ctx: _CellContext) -> None:
    a, b = _draw_pair(ctx)
    p = ctx.cell.exponent
    ctx.check("check_weak_majorization", checks.check_weak_majorization, a, b, p)
    if p > 2:
        for variant in ("sum", "geomean"):
            ctx.check(
                "check_antinorm_superadditivity",
                checks.check_antinorm_superadditivity,
                a,
                b,
                p,
                variant,
                variant=variant,
            )


def _run_weyl(ctx: _CellContext, a: ComplexMatrix, b: ComplexMatrix, which: str) -> None:
    """All admissible (j, k) of one Weyl statement, summarized in one record."""
    indices = ctx.invoke(
        "admissible_weyl_indices", checks.admissible_weyl_indices, ctx.cell.dim, which
    )
    results = []
    for j, k in indices:
        try:
            result = ctx.invoke(
                "check_weyl_split", checks.check_weyl_split, a, b, ctx.cell.exponent, j, k, which
            )
        except Exception as err:
            ctx.error("check_weyl_split", err, which=which, j=j, k=k)
            return
        results.append(result)

    failing = [result for result in results if not result.holds]
    ctx.add(
        "check_weyl_split",
        Outcome.FAIL if failing else Outcome.PASS,
        params={"check": f"weyl_{which}", "indices": len(results)},
        margin=min(result.margin for result in results),
        message=", ".join(str(list(r.details[0][0])) for r in failing) or None,
    )
    if ctx.cell.dim == 1:
        result = results[0]
        expected = scalar_oracle_details(
            result.name, complex(a.data[0, 0]), complex(b.data[0, 0]), ctx.cell.exponent
        )
        ctx.scalar_cases += 1
        mismatch = _oracle_mismatch(result, expected or [])
        if mismatch is not None:
            ctx.disagreements.append(f"cell {ctx.cell.suite}/{ctx.cell.index}: {mismatch}")


def _run_eigenvalue(ctx: _CellContext) -> None:
    a, b = _draw_pair(ctx)
    e = ctx.cell.exponent
    for which in ("cor3", "cor5") if e > 2 else ("cor4",):
        _run_weyl(ctx, a, b, which)
    for form in ("halved", "four_term"):
        ctx.check(
            "check_direct_sum_spectra",
            checks.check_direct_sum_spectra,
            a,
            b,
            e,
            form,
            form=form,
        )


def _cell_search_config(ctx: _CellContext) -> SearchConfig:
    return replace(ctx.search, seed=derive_seed(ctx.cell.seed, _SEARCH_STREAM))


def _run_alignment(ctx: _CellContext, x: PsdMatrix, y: PsdMatrix, g: PowerFunction) -> None:
    """Direct invocations of the alignment primitives."""
    try:
        frame = ctx.invoke("frame_alignment", constructions.frame_alignment, x, y)
        defect = frame.orthonormality_defect()
        ctx.add(
            "frame_alignment",
            Outcome.PASS if defect <= ORTHO_TOL else Outcome.FAIL,
            margin=-defect,
        )
    except Exception as err:
        ctx.error("frame_alignment", err)

    try:
        g_mid = apply_spectral_function(PsdMatrix((x.data + y.data) / 2), g)
        g_avg = (apply_spectral_function(x, g).data + apply_spectral_function(y, g).data) / 2
        w = ctx.invoke("align_unitary", constructions.align_unitary, g_mid, g_avg).data
        gap = psd_gap(w @ g_mid.data @ w.conj().T, g_avg)
        scale = 1.0 + float(scipy.linalg.norm(g_avg, 2))
        ctx.add(
            "align_unitary",
            Outcome.PASS if gap >= -PSD_TOL * scale else Outcome.FAIL,
            margin=gap,
        )
    except Exception as err:
        ctx.error("align_unitary", err)


def _run_block_decomposition(ctx: _CellContext) -> None:
    n = ctx.cell.dim
    spec = GeneratorSpec(
        kind=GeneratorKind.PSD, dim=2 * n, seed=derive_seed(ctx.cell.seed, _BLOCK_STREAM)
    )
    h = generate(spec).data
    try:
        u, v = ctx.invoke("block_decomposition", constructions.block_decomposition, h)
    except Exception as err:
        ctx.error("block_decomposition", err, block_seed=spec.seed)
        return
    zeros = np.zeros((n, n), dtype=np.complex128)
    x = scipy.linalg.block_diag(h[:n, :n], zeros)
    z = scipy.linalg.block_diag(zeros, h[n:, n:])
    rebuilt = u.data @ x @ u.data.conj().T + v.data @ z @ v.data.conj().T
    residual = float(np.max(np.abs(rebuilt - h)))
    defect = max(u.orthonormality_defect(), v.orthonormality_defect())
    ok = residual <= RECON_TOL * (1.0 + float(scipy.linalg.norm(h, 2))) and defect <= ORTHO_TOL
    ctx.add(
        "block_decomposition",
        Outcome.PASS if ok else Outcome.FAIL,
        params={"block_seed": spec.seed},
        margin=-residual,
    )


def _run_theorem1(ctx: _CellContext, a: ComplexMatrix, b: ComplexMatrix, exact: bool) -> None:
    p = ctx.cell.exponent
    provider = None if exact else orbit_search.make_key1_provider(_cell_search_config(ctx))
    try:
        certificate = ctx.invoke(
            "theorem1_certificate", constructions.theorem1_certificate, a, b, p, provider
        )
    except SearchNotConvergedError as err:
        trace = err.trace
        ctx.add(
            "theorem1_certificate",
            Outcome.NOT_CONVERGED,
            params={"path": "search"},
            margin=None if trace is None else trace.final_gap,
            converged=False,
            trace=None if trace is None else trace.to_dict(),
        )
        return
    except Exception as err:
        ctx.error("theorem1_certificate", err)
        return

    verified = ctx.certificate(
        "theorem1_certificate",
        certificate,
        path="commuting" if exact else "search",
    )
    if not exact:
        ctx.records[-1] = replace(ctx.records[-1], converged=True)
    if not verified:
        return

    # The trace of the certificate inequality is the halved Clarkson bound.
    trace_check = ctx.invoke("check_clarkson_trace", checks.check_clarkson_trace, a, b, p)
    halved = next(detail for detail in trace_check.details if detail[0] == (2,))
    trace_slack = float(np.real(np.trace(certificate.rhs.data - certificate.lhs.data)))
    drift = abs(trace_slack - (halved[2] - halved[1]))
    ctx.add(
        "theorem1_trace_consistency",
        Outcome.PASS if drift <= CHECK_TOL * trace_check.scale() else Outcome.FAIL,
        margin=-drift,
    )


def _run_certificates(ctx: _CellContext) -> None:
    a, b = _draw_pair(ctx)
    p = ctx.cell.exponent
    n = ctx.cell.dim
    g = PowerFunction(p / 2)
    x, y = _gram(a), _gram(b)
    commuting = ctx.generator["kind"] in (GeneratorKind.COMMUTING_PAIR, GeneratorKind.SCALAR)

    for operation, build in (
        ("parallelogram_isometries", lambda: constructions.parallelogram_isometries(a, b)),
        ("key2_certificate", lambda: constructions.key2_certificate(x, y, g, True)),
        ("direct_sum_cm_certificate", lambda: constructions.direct_sum_cm_certificate(a, b, p)),
    ):
        try:
            certificate = ctx.invoke(operation, build)
        except Exception as err:
            ctx.error(operation, err)
            continue
        ctx.certificate(operation, certificate)

    if ctx.cell.first_exponent:
        _run_block_decomposition(ctx)
    _run_alignment(ctx, x, y, g)

    if commuting:
        try:
            certificate = ctx.invoke(
                "commuting_key1_certificate",
                constructions.commuting_key1_certificate,
                x,
                y,
                g,
                True,
            )
        except Exception as err:
            ctx.error("commuting_key1_certificate", err)
        else:
            exact = certificate.gap_min_eig >= -EXACT_GAP_TOL * certificate.scale()
            if ctx.certificate("commuting_key1_certificate", certificate) and not exact:
                ctx.records[-1] = replace(ctx.records[-1], outcome=Outcome.FAIL)
        _run_theorem1(ctx, a, b, exact=True)
    elif n <= SEARCH_DIM_LIMIT:
        _run_theorem1(ctx, a, b, exact=False)

    if ctx.cell.first_exponent and n <= SEARCH_DIM_LIMIT:
        provider = orbit_search.make_key1_provider(_cell_search_config(ctx))
        for reading in constructions.CARTESIAN_READINGS:
            try:
                identity, companion = ctx.invoke(
                    "cartesian_certificates",
                    constructions.cartesian_certificates,
                    a,
                    reading,
                    provider,
                )
            except SearchNotConvergedError as err:
                ctx.add(
                    "cartesian_certificates",
                    Outcome.NOT_CONVERGED,
                    params={"reading": reading},
                    converged=False,
                    trace=None if err.trace is None else err.trace.to_dict(),
                )
                continue
            except Exception as err:
                ctx.error("cartesian_certificates", err, reading=reading)
                continue
            ctx.certificate("cartesian_certificates", identity, reading=reading)
            ctx.certificate("cartesian_certificates", companion, reading=reading)
            ctx.records[-1] = replace(ctx.records[-1], converged=True)


def _run_orbit_primitives(ctx: _CellContext, x: PsdMatrix, y: PsdMatrix) -> None:
    """orbit_optimize on a reachable target and the gradient sanity check."""
    cfg = _cell_search_config(ctx)
    rng = np.random.default_rng(derive_seed(ctx.cell.seed, _ROTATION_STREAM))
    q = haar_unitary(ctx.cell.dim, rng)
    try:
        certificate, trace = ctx.invoke(
            "orbit_optimize",
            orbit_search.orbit_optimize,
            [(x, None)],
            q @ x.data @ q.conj().T,
            orbit_search.SearchDirection.SUM_LE_BOUND,
            cfg,
        )
    except Exception as err:
        ctx.error("orbit_optimize", err)
    else:
        ctx.certificate("orbit_optimize", certificate, trace)

    g = PowerFunction(2.0)
    terms = [apply_spectral_function(x, g), apply_spectral_function(y, g)]
    bound = apply_spectral_function(PsdMatrix(x.data + y.data), g)
    try:
        errors = ctx.invoke(
            "gradient_check",
            orbit_search.gradient_check,
            terms,
            bound,
            orbit_search.SearchDirection.SUM_LE_BOUND,
            cfg,
        )
    except Exception as err:
        ctx.error("gradient_check", err)
        return
    worst = max(errors)
    ctx.add(
        "gradient_check",
        Outcome.PASS if worst <= GRADIENT_TOL else Outcome.FAIL,
        params={"points": len(errors)},
        margin=GRADIENT_TOL - worst,
    )


def _run_search(ctx: _CellContext) -> None:
    a, b = _draw_pair(ctx)
    e = ctx.cell.exponent
    cfg = _cell_search_config(ctx)

    def searched(operation: str, func: Callable[..., Any], *args: Any, **params: Any) -> None:
        try:
            certificate, trace = ctx.invoke(operation, func, *args)
        except Exception as err:
            ctx.error(operation, err, **params)
            return
        ctx.certificate(operation, certificate, trace, **params)

    if e > 2:
        half_sum = (a.data + b.data) / 2
        half_diff = (a.data - b.data) / 2
        x = PsdMatrix(half_sum.conj().T @ half_sum)
        y = PsdMatrix(half_diff.conj().T @ half_diff)
        searched(
            "key1_certificate", orbit_search.key1_certificate, x, y, PowerFunction(e / 2), True, cfg
        )
    else:
        searched("theorem2_certificate", orbit_search.theorem2_certificate, a, b, e, cfg)
        if ctx.cell.dim <= DIRECT_SUM_SEARCH_DIM_LIMIT:
            for form in orbit_search.DIRECT_SUM_FORMS:
                searched(
                    "direct_sum_power_certificates",
                    orbit_search.direct_sum_power_certificates,
                    a,
                    b,
                    e,
                    cfg,
                    form,
                    form=form,
                )

    if ctx.cell.first_exponent:
        _run_orbit_primitives(ctx, _gram(a), _gram(b))


_RUNNERS: dict[str, Callable[[_CellContext], None]] = {
    "identities": _run_identities,
    "trace": _run_trace,
    "majorization": _run_majorization,
    "eigenvalue": _run_eigenvalue,
    "certificates": _run_certificates,
    "search": _run_search,
}


def _unique(values: list[float]) -> list[float]:
    seen: list[float] = []
    for value in values:
        if value not in seen:
            seen.append(value)
    return seen


def _suite_grid(name: str, config: SuiteConfig) -> tuple[list[int], list[Optional[float]]]:
    above_two = [p for p in config.p_grid if p > 2]
    dims = list(config.dims)
    if name == "identities":
        return dims, [None]
    if name == "trace":
        return dims, _unique([2.0, *config.p_grid, *config.q_grid])
    if name == "majorization":
        return dims, list(config.p_grid)
    if name == "eigenvalue":
        return dims, _unique([*above_two, *config.q_grid])
    if name == "certificates":
        return dims, above_two
    return [d for d in dims if d <= SEARCH_DIM_LIMIT], _unique([*above_two, *config.q_grid])


def build_cells(name: str, config: SuiteConfig) -> list[_Cell]:
    """Cells of one suite in their canonical order."""
    dims, exponents = _suite_grid(name, config)
    cells = []
    for dim in dims:
        for position, exponent in enumerate(exponents):
            for trial in range(config.trials):
                index = len(cells)
                cells.append(
                    _Cell(
                        suite=name,
                        index=index,
                        dim=dim,
                        exponent=exponent,
                        trial=trial,
                        seed=derive_seed(config.seed, _SUITE_IDS[name], index),
                        first_exponent=position == 0,
                    )
                )
    return cells


def _run_cell(cell: _Cell, search: SearchConfig) -> _CellContext:
    ctx = _CellContext(cell=cell, search=search)
    _LOGGER.debug(
        "Cell %s/%d: dim=%d exponent=%s trial=%d",
        cell.suite,
        cell.index,
        cell.dim,
        cell.exponent,
        cell.trial,
    )
    try:
        _RUNNERS[cell.suite](ctx)
    except Exception as err:
        ctx.error("generate", err)
    return ctx


def run_suite(
    name: str, config: Union[SuiteConfig, Mapping[str, Any], None] = None
) -> SuiteReport:
    """Run a property suite (or "all") and aggregate its report.

    Args:
        name: One of SUITE_NAMES or "all"
        config: SuiteConfig, or a mapping validated through SuiteConfig.from_mapping

    Raises:
        UsageError: Unknown suite name or invalid configuration
    """
    if name != ALL_SUITES and name not in SUITE_NAMES:
        valid = ", ".join([*SUITE_NAMES, ALL_SUITES])
        raise UsageError(f"Unknown suite {name!r}; use one of: {valid}")
    if not isinstance(config, SuiteConfig):
        config = SuiteConfig.from_mapping(config or {})

    names = SUITE_NAMES if name == ALL_SUITES else (name,)
    cells = [cell for suite in names for cell in build_cells(suite, config)]
    _LOGGER.info(
        "Starting %s suite: %d cells, seed %d, %d worker(s)",
        name,
        len(cells),
        config.seed,
        config.workers,
    )

    start = time.perf_counter()
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        contexts = list(pool.map(lambda cell: _run_cell(cell, config.search), cells))
    wall_time = time.perf_counter() - start

    cases: list[CaseRecord] = []
    counts: Counter = Counter()
    scalar_cases = 0
    disagreements: list[str] = []
    for ctx in contexts:
        cases.extend(ctx.records)
        counts.update(ctx.counts)
        scalar_cases += ctx.scalar_cases
        disagreements.extend(ctx.disagreements)

    report = SuiteReport(
        name=name,
        config=config,
        cases=tuple(cases),
        operation_counts=dict(counts),
        scalar_cases=scalar_cases,
        scalar_disagreements=tuple(disagreements),
        wall_time=wall_time,
    )
    summary = report.counts
    _LOGGER.info(
        "Suite %s completed in %.2fs: %d pass, %d fail, %d error, %d not converged (rate %.3f)",
        name,
        wall_time,
        summary[Outcome.PASS.value],
        summary[Outcome.FAIL.value],
        summary[Outcome.ERROR.value],
        summary[Outcome.NOT_CONVERGED.value],
        report.convergence_rate,
    )
    return report
