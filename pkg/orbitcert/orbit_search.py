"""Certificate search over products of unitary groups.

Minimizes f(U_1..U_m) = lambda_max(sign * (sum_i U_i S_i U_i* - bound)) with
U_i = U_i^(0) exp(K_i), K_i skew-Hermitian. The gradient is a central finite
difference on an orthonormal basis of skew-Hermitian coordinates; steps are
retracted through the matrix exponential and accepted by Armijo backtracking.

Restart 0 starts from eigen-alignment unitaries, restart r >= 1 from Haar
unitaries drawn with the sub-seed (seed, r). The result depends only on the
config, never on the number of worker threads.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
import logging
import math
from typing import Any, Optional

import numpy as np
import scipy.linalg

from .certificates import Certificate, Direction, OrbitSide, Transform
from .config import SearchConfig
from .const import ARMIJO_C, DAMPING_FACTOR, DEGENERATE_TOP_GAP, MIN_STEP, PSD_TOL
from .constructions import (
    Key1Provider,
    commuting_key1_certificate,
    frame_alignment,
    key2_certificate,
)
from .errors import NonCommutingError, RegimeError, ShapeError, UsageError
from .generators import haar_unitary
from .matrices import MatrixLike, PsdMatrix, as_hermitian, as_psd, require_square_pair
from .spectral import PowerFunction, ScalarFunction, apply_spectral_function, matrix_abs_power
from .validation import Regime, require, validate_exponent

_LOGGER = logging.getLogger(__name__)

Observer = Callable[[int, int, Sequence[np.ndarray], float], None]

# Step length after an accepted step grows by this factor, capped at
# MAX_STEP_FACTOR * step_init.
STEP_GROWTH: float = 2.0
MAX_STEP_FACTOR: float = 16.0
# Random stream of gradient_check, disjoint from restart indices.
GRADIENT_CHECK_STREAM: int = 2**32
GRADIENT_CHECK_ATTEMPTS: int = 100


class SearchDirection(StrEnum):
    SUM_LE_BOUND = "sum_le_bound"
    SUM_GE_BOUND = "sum_ge_bound"

    @property
    def sign(self) -> float:
        return 1.0 if self is SearchDirection.SUM_LE_BOUND else -1.0

    @property
    def certificate_direction(self) -> Direction:
        if self is SearchDirection.SUM_LE_BOUND:
            return Direction.LHS_LE_RHS
        return Direction.LHS_GE_RHS


def _json_float(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


@dataclass(frozen=True)
class SearchTrace:
    """Convergence record of an orbit search.

    Attributes:
        iterations_used: Accepted and stalled iterations over the reported restarts
        restarts_used: Haar restarts consumed after the aligned start
        objective_history: f after every accepted step, restart segments concatenated
        converged: final_gap >= target_gap * scale
        final_gap: -f of the returned certificate
        segment_starts: Index in objective_history where each restart begins
    """

    iterations_used: int
    restarts_used: int
    objective_history: tuple[float, ...]
    converged: bool
    final_gap: float
    segment_starts: tuple[int, ...] = field(default=(0,))

    @classmethod
    def exact(cls, gap: float, converged: bool = True) -> SearchTrace:
        """Trace of a certificate built without search."""
        return cls(
            iterations_used=0,
            restarts_used=0,
            objective_history=(),
            converged=converged,
            final_gap=gap,
            segment_starts=(),
        )

    def segments(self) -> list[tuple[float, ...]]:
        bounds = [*self.segment_starts, len(self.objective_history)]
        return [self.objective_history[a:b] for a, b in zip(bounds, bounds[1:])]

    def to_dict(self) -> dict[str, Any]:
        return {
            "iterations_used": self.iterations_used,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "final_gap": _json_float(self.final_gap),
            "objective_history": [_json_float(value) for value in self.objective_history],
            "segment_starts": list(self.segment_starts),
        }


# ============================================================================
# Objective
# ============================================================================


def skew_hermitian_basis(dim: int) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of the dim^2 real coordinates of skew-Hermitian matrices."""
    basis = []
    for a in range(dim):
        element = np.zeros((dim, dim), dtype=np.complex128)
        element[a, a] = 1j
        basis.append(element)
    for a in range(dim):
        for b in range(a + 1, dim):
            real = np.zeros((dim, dim), dtype=np.complex128)
            real[a, b], real[b, a] = 1.0, -1.0
            imag = np.zeros((dim, dim), dtype=np.complex128)
            imag[a, b], imag[b, a] = 1j, 1j
            basis.extend([real / math.sqrt(2), imag / math.sqrt(2)])
    return basis


class _OrbitProblem:
    """Terms, bound and direction of one search, with objective evaluation."""

    def __init__(
        self, terms: Sequence[np.ndarray], bound: np.ndarray, direction: SearchDirection
    ) -> None:
        self.terms = [np.asarray(term) for term in terms]
        self.bound = np.asarray(bound)
        self.direction = direction
        self.sign = direction.sign
        self.dim = self.bound.shape[0]
        spectral = [float(scipy.linalg.norm(term, 2)) for term in self.terms]
        self.bound_norm = float(scipy.linalg.norm(self.bound, 2))
        self.scale = 1.0 + max(self.bound_norm, sum(spectral))

    def conjugates(self, unitaries: Sequence[np.ndarray]) -> list[np.ndarray]:
        return [u @ s @ u.conj().T for u, s in zip(unitaries, self.terms)]

    def matrix_from(self, conjugates: Sequence[np.ndarray]) -> np.ndarray:
        total = np.sum(conjugates, axis=0) - self.bound
        total = self.sign * total
        return (total + total.conj().T) / 2

    def top(self, matrix: np.ndarray) -> float:
        return float(scipy.linalg.eigvalsh(matrix, subset_by_index=[self.dim - 1, self.dim - 1])[0])

    def value(self, unitaries: Sequence[np.ndarray]) -> float:
        return self.top(self.matrix_from(self.conjugates(unitaries)))

    def certificate_scale(self, unitaries: Sequence[np.ndarray]) -> float:
        """1 + max(||bound||, ||sum_i U_i S_i U_i*||), the scale the certificate is judged at."""
        total = np.sum(self.conjugates(unitaries), axis=0)
        return 1.0 + max(self.bound_norm, float(scipy.linalg.norm(total, 2)))

    def top_gap(self, unitaries: Sequence[np.ndarray]) -> float:
        """Distance between the two largest eigenvalues (inf when dim == 1)."""
        if self.dim < 2:
            return math.inf
        values = scipy.linalg.eigvalsh(self.matrix_from(self.conjugates(unitaries)))
        return float(values[-1] - values[-2])

    def gradient(
        self,
        unitaries: Sequence[np.ndarray],
        basis: Sequence[np.ndarray],
        shifts: Sequence[tuple[np.ndarray, np.ndarray]],
        eps: float,
    ) -> tuple[list[np.ndarray], float]:
        """Central-difference gradient per term as skew-Hermitian matrices; also ||grad||^2."""
        conjugates = self.conjugates(unitaries)
        base_sum = np.sum(conjugates, axis=0)
        gradients = []
        norm_sq = 0.0
        for index, (u, s) in enumerate(zip(unitaries, self.terms)):
            rest = base_sum - conjugates[index]
            coefficients = np.empty(len(basis))
            for k, (forward, backward) in enumerate(shifts):
                values = []
                for shift in (forward, backward):
                    moved = u @ shift
                    matrix = self.sign * (rest + moved @ s @ moved.conj().T - self.bound)
                    values.append(self.top((matrix + matrix.conj().T) / 2))
                coefficients[k] = (values[0] - values[1]) / (2 * eps)
            gradients.append(np.tensordot(coefficients, np.asarray(basis), axes=1))
            norm_sq += float(np.dot(coefficients, coefficients))
        return gradients, norm_sq


def objective_value(
    terms: Sequence[MatrixLike],
    unitaries: Sequence[np.ndarray],
    bound: MatrixLike,
    direction: SearchDirection,
) -> float:
    """f = lambda_max(sign * (sum_i U_i S_i U_i* - bound))."""
    problem = _OrbitProblem(
        [as_hermitian(term).data for term in terms],
        as_hermitian(bound).data,
        SearchDirection(direction),
    )
    return problem.value([np.asarray(u) for u in unitaries])


def objective_directional_derivative(
    terms: Sequence[MatrixLike],
    unitaries: Sequence[np.ndarray],
    bound: MatrixLike,
    direction: SearchDirection,
    tangent: Sequence[np.ndarray],
) -> float:
    """Derivative of f along U_i -> U_i exp(t D_i) at t = 0 (simple top eigenvalue).

    Equals sign * sum_i v* U_i [D_i, S_i] U_i* v with v the top eigenvector.
    """
    problem = _OrbitProblem(
        [as_hermitian(term).data for term in terms],
        as_hermitian(bound).data,
        SearchDirection(direction),
    )
    unitaries = [np.asarray(u) for u in unitaries]
    matrix = problem.matrix_from(problem.conjugates(unitaries))
    _, vectors = scipy.linalg.eigh(matrix)
    top_vector = vectors[:, -1]

    derivative = 0.0
    for u, s, d in zip(unitaries, problem.terms, tangent):
        velocity = u @ (d @ s - s @ d) @ u.conj().T
        derivative += float(np.real(top_vector.conj() @ velocity @ top_vector))
    return problem.sign * derivative


# ============================================================================
# Search
# ============================================================================


@dataclass
class _RestartOutcome:
    index: int
    unitaries: list[np.ndarray]
    value: float
    history: list[float]
    iterations: int
    aborted: bool = False


def _retract(unitary: np.ndarray, step: float, gradient: np.ndarray) -> np.ndarray:
    return unitary @ scipy.linalg.expm(-step * gradient)


def _run_restart(
    problem: _OrbitProblem,
    start: Sequence[np.ndarray],
    cfg: SearchConfig,
    index: int,
    observer: Optional[Observer],
) -> _RestartOutcome:
    basis = skew_hermitian_basis(problem.dim)
    shifts = []
    for element in basis:
        forward = scipy.linalg.expm(cfg.grad_eps * element)
        shifts.append((forward, forward.conj().T))

    unitaries = [np.array(u, dtype=np.complex128) for u in start]
    value = problem.value(unitaries)
    if not math.isfinite(value):
        _LOGGER.warning("Restart %d: objective is not finite at the start; skipping", index)
        return _RestartOutcome(index, unitaries, math.inf, [], 0, aborted=True)

    history = [value]
    if observer is not None:
        observer(index, 0, unitaries, value)

    scale = problem.scale
    alpha = cfg.step_init
    iterations = 0
    while iterations < cfg.max_iterations and value > 0:
        gradients, norm_sq = problem.gradient(unitaries, basis, shifts, cfg.grad_eps)
        if not math.isfinite(norm_sq):
            _LOGGER.warning("Restart %d: gradient is not finite; aborting restart", index)
            return _RestartOutcome(index, unitaries, value, history, iterations, aborted=True)
        iterations += 1
        if norm_sq <= (PSD_TOL * scale) ** 2:
            _LOGGER.debug("Restart %d is stationary at f=%.3e", index, value)
            break

        # Work with f / scale so step lengths are comparable across problems.
        directions = [gradient / scale for gradient in gradients]
        descent = norm_sq / scale**2
        step = alpha
        if problem.top_gap(unitaries) < DEGENERATE_TOP_GAP * scale:
            step *= DAMPING_FACTOR

        accepted = None
        while step >= MIN_STEP:
            trial = [_retract(u, step, d) for u, d in zip(unitaries, directions)]
            trial_value = problem.value(trial)
            if not math.isfinite(trial_value):
                _LOGGER.warning("Restart %d: objective became NaN; aborting restart", index)
                return _RestartOutcome(index, unitaries, value, history, iterations, aborted=True)
            decreased = trial_value <= value
            if decreased and trial_value / scale <= value / scale - ARMIJO_C * step * descent:
                accepted = (trial, trial_value)
                break
            step /= 2

        if accepted is None:
            _LOGGER.debug(
                "Restart %d stalled after %d iterations (f=%.3e)", index, iterations, value
            )
            break

        unitaries, value = accepted
        history.append(value)
        if observer is not None:
            observer(index, iterations, unitaries, value)
        alpha = min(STEP_GROWTH * step, MAX_STEP_FACTOR * cfg.step_init)

    _LOGGER.debug("Restart %d finished: f=%.6e after %d iterations", index, value, iterations)
    return _RestartOutcome(index, unitaries, value, history, iterations)


def _start_unitaries(
    problem: _OrbitProblem,
    initial: Sequence[Optional[np.ndarray]],
    cfg: SearchConfig,
    index: int,
) -> list[np.ndarray]:
    if index == 0:
        return [
            np.asarray(init) if init is not None else frame_alignment(term, problem.bound).data
            for term, init in zip(problem.terms, initial)
        ]
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, index]))
    return [haar_unitary(problem.dim, rng) for _ in problem.terms]


def orbit_optimize(
    terms: Sequence[tuple[MatrixLike, Optional[MatrixLike]]],
    bound: MatrixLike,
    direction: SearchDirection | str,
    cfg: SearchConfig,
    observer: Optional[Observer] = None,
    statement: str = "orbit",
) -> tuple[Certificate, SearchTrace]:
    """Search unitaries U_i with sum_i U_i S_i U_i* <= bound (or >= for sum_ge_bound).

    Args:
        terms: (S_i, initial unitary or None) pairs; None starts from eigen-alignment
        bound: Hermitian bound of the same dimension
        direction: sum_le_bound or sum_ge_bound
        cfg: Search budget and seed
        observer: Called as observer(restart, iteration, unitaries, f) at every
            accepted iterate (from worker threads when cfg.workers > 1)
        statement: Tag of the returned certificate

    Returns:
        (certificate with lhs = sum_i U_i S_i U_i* and rhs = bound, trace).
        Non-convergence is reported through trace.converged, never raised.
    """
    direction = SearchDirection(direction)
    if not terms:
        raise UsageError("Orbit search needs at least one term")
    bound_matrix = as_hermitian(bound)
    term_matrices = [as_hermitian(term) for term, _ in terms]
    for term in term_matrices:
        if term.dim != bound_matrix.dim:
            raise ShapeError(
                f"Term of dimension {term.dim} does not match bound {bound_matrix.dim}"
            )
    initial = [
        None if init is None else np.asarray(getattr(init, "data", init)) for _, init in terms
    ]

    problem = _OrbitProblem([t.data for t in term_matrices], bound_matrix.data, direction)

    def accepted(outcome: _RestartOutcome) -> bool:
        if outcome.aborted:
            return False
        return -outcome.value >= cfg.target_gap * problem.certificate_scale(outcome.unitaries)

    def attempt(index: int) -> _RestartOutcome:
        start = _start_unitaries(problem, initial, cfg, index)
        return _run_restart(problem, start, cfg, index, observer)

    outcomes: list[_RestartOutcome] = []
    chosen: Optional[_RestartOutcome] = None
    total = cfg.restarts + 1
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        for batch_start in range(0, total, cfg.workers):
            indices = range(batch_start, min(batch_start + cfg.workers, total))
            batch = list(pool.map(attempt, indices))
            for outcome in batch:
                outcomes.append(outcome)
                if accepted(outcome):
                    chosen = outcome
                    break
            if chosen is not None:
                break

    converged = chosen is not None
    if chosen is None:
        chosen = min(outcomes, key=lambda outcome: (outcome.value, outcome.index))
        reported = outcomes
    else:
        reported = outcomes[: chosen.index + 1]

    history: list[float] = []
    starts: list[int] = []
    for outcome in reported:
        starts.append(len(history))
        history.extend(outcome.history)

    final_gap = -chosen.value
    trace = SearchTrace(
        iterations_used=sum(outcome.iterations for outcome in reported),
        restarts_used=chosen.index if converged else cfg.restarts,
        objective_history=tuple(history),
        converged=converged,
        final_gap=final_gap,
        segment_starts=tuple(starts),
    )

    unitaries = chosen.unitaries
    lhs = np.sum(problem.conjugates(unitaries), axis=0)
    certificate = Certificate.build(
        statement,
        [Transform.unitary(u) for u in unitaries],
        direction.certificate_direction,
        lhs=lhs,
        rhs=bound_matrix,
        terms=term_matrices,
        orbit_side=OrbitSide.LHS,
        tol=abs(cfg.target_gap),
    )

    if converged:
        _LOGGER.info(
            "Orbit search %s converged: gap %.3e after %d iterations, %d restarts",
            statement,
            final_gap,
            trace.iterations_used,
            trace.restarts_used,
        )
    else:
        _LOGGER.warning(
            "Orbit search %s did not converge: best gap %.3e (target %.3e); "
            "not a counterexample",
            statement,
            final_gap,
            cfg.target_gap * problem.certificate_scale(chosen.unitaries),
        )
    return certificate, trace


def gradient_check(
    terms: Sequence[MatrixLike],
    bound: MatrixLike,
    direction: SearchDirection | str,
    cfg: SearchConfig,
    points: int = 10,
) -> list[float]:
    """Compare the analytic directional derivative with a central difference.

    Points are Haar-random; points whose top two eigenvalues are closer than
    DEGENERATE_TOP_GAP * scale are resampled. Errors are relative to
    max(|analytic|, |numeric|, 1e-3 * scale).
    """
    direction = SearchDirection(direction)
    term_matrices = [as_hermitian(term) for term in terms]
    bound_matrix = as_hermitian(bound)
    problem = _OrbitProblem([t.data for t in term_matrices], bound_matrix.data, direction)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, GRADIENT_CHECK_STREAM]))
    h = cfg.grad_eps

    errors = []
    for point in range(points):
        for _ in range(GRADIENT_CHECK_ATTEMPTS):
            unitaries = [haar_unitary(problem.dim, rng) for _ in term_matrices]
            if problem.top_gap(unitaries) >= DEGENERATE_TOP_GAP * problem.scale:
                break
            _LOGGER.warning("Gradient check point %d is near-degenerate; resampling", point)
        else:
            raise UsageError("Could not sample a point with a simple top eigenvalue")

        tangent = []
        for _ in term_matrices:
            g = rng.standard_normal((problem.dim, problem.dim)) + 1j * rng.standard_normal(
                (problem.dim, problem.dim)
            )
            tangent.append((g - g.conj().T) / 2)
        norm = math.sqrt(sum(float(np.sum(np.abs(d) ** 2)) for d in tangent))
        tangent = [d / norm for d in tangent]

        analytic = objective_directional_derivative(
            term_matrices, unitaries, bound_matrix, direction, tangent
        )
        forward = [_retract(u, -h, d) for u, d in zip(unitaries, tangent)]
        backward = [_retract(u, h, d) for u, d in zip(unitaries, tangent)]
        numeric = (problem.value(forward) - problem.value(backward)) / (2 * h)
        denominator = max(abs(analytic), abs(numeric), 1e-3 * problem.scale)
        errors.append(abs(analytic - numeric) / denominator)

    _LOGGER.debug("Gradient check: max relative error %.3e over %d points", max(errors), points)
    return errors


# ============================================================================
# Statements
# ============================================================================


def key1_certificate(
    first: MatrixLike,
    second: MatrixLike,
    g: ScalarFunction,
    convex: bool,
    cfg: SearchConfig,
) -> tuple[Certificate, SearchTrace]:
    """Superadditivity in the unitary orbit.

    convex, g(0) <= 0:  g(X+Y) >= U0 g(X) U0* + V0 g(Y) V0*
    concave, g(0) >= 0: g(X+Y) <= U0 g(X) U0* + V0 g(Y) V0*

    Commuting inputs take the exact path (no iterations); otherwise the
    unitaries are searched. The certificate's lhs is g(X+Y).
    """
    x = as_psd(first)
    y = as_psd(second)
    try:
        certificate = commuting_key1_certificate(x, y, g, convex)
        return certificate, SearchTrace.exact(certificate.gap_min_eig, certificate.holds)
    except NonCommutingError:
        _LOGGER.debug("key1 inputs do not commute; searching (n=%d)", x.dim)

    g_x = apply_spectral_function(x, g)
    g_y = apply_spectral_function(y, g)
    g_sum = apply_spectral_function(PsdMatrix(x.data + y.data), g)
    direction = SearchDirection.SUM_LE_BOUND if convex else SearchDirection.SUM_GE_BOUND
    certificate, trace = orbit_optimize(
        [(g_x, None), (g_y, None)], g_sum, direction, cfg, statement="key1"
    )
    return certificate.flipped(), trace


def make_key1_provider(cfg: SearchConfig) -> Key1Provider:
    """key1_certificate bound to a search config, usable as a key1_provider."""

    def provider(
        first: PsdMatrix, second: PsdMatrix, g: ScalarFunction, convex: bool
    ) -> tuple[Certificate, SearchTrace]:
        return key1_certificate(first, second, g, convex, cfg)

    return provider


def theorem2_certificate(
    first: MatrixLike, second: MatrixLike, q: float, cfg: SearchConfig
) -> tuple[Certificate, SearchTrace]:
    """Reversed unitary-orbit Clarkson-McCarthy inequality, 0 < q < 2.

        U|(A+B)/2|^q U* + V|(A-B)/2|^q V* >= (|A|^q + |B|^q)/2

    Same composition as the p > 2 refinement with the concave g(t) = t^{q/2}.
    """
    a, b = require_square_pair(first, second)
    exponent = require(validate_exponent(q, Regime.BELOW_TWO, "q"), RegimeError)
    g = PowerFunction(exponent / 2)

    half_sum = (a.data + b.data) / 2
    half_diff = (a.data - b.data) / 2
    key1, trace = key1_certificate(
        PsdMatrix(half_sum.conj().T @ half_sum),
        PsdMatrix(half_diff.conj().T @ half_diff),
        g,
        False,
        cfg,
    )
    averaging = key2_certificate(
        PsdMatrix(a.data.conj().T @ a.data), PsdMatrix(b.data.conj().T @ b.data), g, False
    )
    w = averaging.transforms[0].matrix.data
    u = w @ key1.transforms[0].matrix.data
    v = w @ key1.transforms[1].matrix.data

    plus = matrix_abs_power(half_sum, exponent).data
    minus = matrix_abs_power(half_diff, exponent).data
    certificate = Certificate.build(
        "theorem2",
        [Transform.unitary(u), Transform.unitary(v)],
        Direction.LHS_GE_RHS,
        lhs=u @ plus @ u.conj().T + v @ minus @ v.conj().T,
        rhs=averaging.rhs,
        terms=[plus, minus],
        orbit_side=OrbitSide.LHS,
        tol=max(key1.tol_used, PSD_TOL),
    )
    return certificate, trace


DIRECT_SUM_FORMS: tuple[str, ...] = ("four_term", "halved")


def direct_sum_power_certificates(
    first: MatrixLike,
    second: MatrixLike,
    exponent: float,
    cfg: SearchConfig,
    form: str = "four_term",
) -> tuple[Certificate, SearchTrace]:
    """Direct-sum power inequalities with 2n x n isometries found by search.

    four_term, p > 2:     |A+B|^p (+) |A-B|^p >= U0|A|^pU0* + V0|B|^pV0* + U1|A|^pU1* + V1|B|^pV1*
    four_term, 0 < q < 2: the same with <=
    halved, 0 < q < 2:    |(A+B)/2|^q (+) |(A-B)/2|^q >= (1/2){U S U* + V S V*}
    halved, p > 2:        the same with <=, S = (|A|^e + |B|^e)/2

    The search runs over 2n x 2n unitaries acting on T (+) 0; the isometries
    are their first n columns. The certificate's lhs is the direct sum.
    """
    a, b = require_square_pair(first, second)
    e = require(validate_exponent(exponent, Regime.NOT_TWO), RegimeError)
    if form not in DIRECT_SUM_FORMS:
        raise UsageError(f"Unknown direct-sum form {form!r}; use one of {DIRECT_SUM_FORMS}")
    n = a.rows
    zeros = np.zeros((n, n), dtype=np.complex128)

    if form == "four_term":
        power_a = matrix_abs_power(a, e).data
        power_b = matrix_abs_power(b, e).data
        bound = scipy.linalg.block_diag(
            matrix_abs_power(a.data + b.data, e).data, matrix_abs_power(a.data - b.data, e).data
        )
        small_terms = [power_a, power_b, power_a, power_b]
        sum_below = e > 2
    else:
        mean = (matrix_abs_power(a, e).data + matrix_abs_power(b, e).data) / 2
        bound = scipy.linalg.block_diag(
            matrix_abs_power((a.data + b.data) / 2, e).data,
            matrix_abs_power((a.data - b.data) / 2, e).data,
        )
        small_terms = [mean / 2, mean / 2]
        sum_below = e < 2

    statement = f"direct_sum_{form}"
    search_direction = SearchDirection.SUM_LE_BOUND if sum_below else SearchDirection.SUM_GE_BOUND
    searched, trace = orbit_optimize(
        [(scipy.linalg.block_diag(term, zeros), None) for term in small_terms],
        bound,
        search_direction,
        cfg,
        statement=statement,
    )

    isometries = [transform.matrix.data[:, :n] for transform in searched.transforms]
    rhs = sum(iso @ term @ iso.conj().T for iso, term in zip(isometries, small_terms))
    certificate = Certificate.build(
        statement,
        [Transform.isometry(iso) for iso in isometries],
        Direction.LHS_GE_RHS if sum_below else Direction.LHS_LE_RHS,
        lhs=bound,
        rhs=rhs,
        terms=small_terms,
        orbit_side=OrbitSide.RHS,
        tol=abs(cfg.target_gap),
    )
    return certificate, trace
