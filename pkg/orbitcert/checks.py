"""Direct verifiers for the trace, eigenvalue and majorization inequalities.

Every check returns a CheckResult whose details are (indices, lhs, rhs)
triples oriented so that the inequality reads lhs <= rhs (identity checks
compare lhs == rhs). Spectra of |X|^e are taken from singular values, which
keeps every check unitarily invariant.

Notation used throughout:
    P = |(A+B)/2|^e,  M = |(A-B)/2|^e,  R = (|A|^e + |B|^e)/2
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math
from typing import Any, Iterable, Mapping

import numpy as np
import scipy.linalg

from .const import CHECK_TOL, IDENTITY_TOL
from .errors import IndexRangeError, MatrixValidationError, RegimeError, ShapeError, UsageError
from .matrices import MatrixLike, as_complex, require_square_pair
from .spectral import matrix_abs_power, schatten_norm, singular_values, trace_abs_power
from .validation import Regime, require, validate_exponent, validate_square, validate_weyl_indices

_LOGGER = logging.getLogger(__name__)

Detail = tuple[tuple[int, ...], float, float]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one verified inequality (or identity).

    Attributes:
        name: Check name (e.g. "clarkson_trace")
        holds: margin >= -tol * scale
        margin: Smallest slack rhs - lhs over all details (signed)
        details: (index tuple, lhs, rhs) per sub-inequality
    """

    name: str
    holds: bool
    margin: float
    details: tuple[Detail, ...]

    def scale(self) -> float:
        """1 + max(|lhs|, |rhs|) over details."""
        if not self.details:
            return 1.0
        return 1.0 + max(max(abs(lhs), abs(rhs)) for _, lhs, rhs in self.details)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "holds": self.holds,
            "margin": self.margin,
            "details": [[list(index), lhs, rhs] for index, lhs, rhs in self.details],
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> CheckResult:
        try:
            details = tuple(
                (tuple(int(i) for i in index), float(lhs), float(rhs))
                for index, lhs, rhs in payload["details"]
            )
            return cls(
                name=str(payload["name"]),
                holds=bool(payload["holds"]),
                margin=float(payload["margin"]),
                details=details,
            )
        except (KeyError, TypeError, ValueError) as err:
            raise UsageError(f"Malformed check result: {err!r}") from err


def _as_details(details: Iterable[tuple[Iterable[int], float, float]]) -> tuple[Detail, ...]:
    return tuple(
        (tuple(int(i) for i in index), float(lhs), float(rhs)) for index, lhs, rhs in details
    )


def _inequality_result(name: str, details: Iterable, tol: float = CHECK_TOL) -> CheckResult:
    """Build a CheckResult for lhs <= rhs details."""
    rows = _as_details(details)
    margin = min(rhs - lhs for _, lhs, rhs in rows)
    scale = 1.0 + max(max(abs(lhs), abs(rhs)) for _, lhs, rhs in rows)
    holds = margin >= -tol * scale
    if not holds:
        _LOGGER.warning("Check %s failed: margin %.6e (scale %.3e)", name, margin, scale)
    return CheckResult(name=name, holds=holds, margin=margin, details=rows)


def _identity_result(name: str, details: Iterable, tol: float = IDENTITY_TOL) -> CheckResult:
    """Build a CheckResult for lhs == rhs details; margin = -max deviation."""
    rows = _as_details(details)
    deviation = max(abs(lhs - rhs) for _, lhs, rhs in rows)
    scale = 1.0 + max(max(abs(lhs), abs(rhs)) for _, lhs, rhs in rows)
    holds = deviation <= tol * scale
    if not holds:
        _LOGGER.warning("Identity %s failed: deviation %.6e (scale %.3e)", name, deviation, scale)
    return CheckResult(name=name, holds=holds, margin=-deviation, details=rows)


# ============================================================================
# Spectral helpers
# ============================================================================


def _half_sum_difference(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return (a + b) / 2, (a - b) / 2


def _power_spectrum(matrix: np.ndarray, exponent: float) -> np.ndarray:
    """Eigenvalues of |X|^e, nonincreasing."""
    return singular_values(matrix) ** exponent


def _mean_power(a: np.ndarray, b: np.ndarray, exponent: float) -> np.ndarray:
    """R = (|A|^e + |B|^e) / 2 as an array."""
    return (matrix_abs_power(a, exponent).data + matrix_abs_power(b, exponent).data) / 2


def _eigs_desc(matrix: np.ndarray) -> np.ndarray:
    return scipy.linalg.eigvalsh(matrix)[::-1]


def _prefix_geomeans(ascending: np.ndarray) -> np.ndarray:
    """k-th root of the product of the k smallest values; 0 once a zero appears."""
    clamped = np.maximum(ascending, 0.0)
    result = np.zeros_like(clamped)
    log_sum = 0.0
    for k, value in enumerate(clamped, start=1):
        if value <= 0.0:
            break
        log_sum += math.log(value)
        result[k - 1] = math.exp(log_sum / k)
    return result


def _exponent(value: float, regime: Regime, name: str = "p") -> float:
    return require(validate_exponent(value, regime, name), RegimeError)


# ============================================================================
# Checks
# ============================================================================


def check_clarkson_trace(first: MatrixLike, second: MatrixLike, p: float) -> CheckResult:
    """Clarkson-McCarthy trace inequalities.

    For p >= 2:
        2(Tr|A|^p + Tr|B|^p) <= Tr|A+B|^p + Tr|A-B|^p <= 2^{p-1}(Tr|A|^p + Tr|B|^p)
        Tr|(A+B)/2|^p + Tr|(A-B)/2|^p <= (Tr|A|^p + Tr|B|^p)/2
    For 0 < p <= 2 all three are reversed. At p = 2 both directions are
    reported, so the margin measures the parallelogram equality.

    Details: (0,) left Clarkson bound, (1,) right bound, (2,) halved form.
    """
    a, b = require_square_pair(first, second)
    exponent = _exponent(p, Regime.POSITIVE)

    ta = trace_abs_power(a, exponent)
    tb = trace_abs_power(b, exponent)
    t_sum = trace_abs_power(a.data + b.data, exponent)
    t_diff = trace_abs_power(a.data - b.data, exponent)
    base = ta + tb
    outer = t_sum + t_diff

    forward = [
        ((0,), 2 * base, outer),
        ((1,), outer, 2 ** (exponent - 1) * base),
        ((2,), outer / 2**exponent, base / 2),
    ]
    reversed_ = [(index, rhs, lhs) for index, lhs, rhs in forward]

    if exponent > 2:
        details = forward
    elif exponent < 2:
        details = reversed_
    else:
        details = forward + reversed_
    return _inequality_result("clarkson_trace", details)


def check_weak_majorization(first: MatrixLike, second: MatrixLike, p: float) -> CheckResult:
    """Prefix sums of lambda-down(P + M) are dominated by those of R, k = 1..n."""
    a, b = require_square_pair(first, second)
    exponent = _exponent(p, Regime.AT_LEAST_TWO)

    half_sum, half_diff = _half_sum_difference(a.data, b.data)
    lhs_matrix = (
        matrix_abs_power(half_sum, exponent).data + matrix_abs_power(half_diff, exponent).data
    )
    lhs = np.cumsum(_eigs_desc(lhs_matrix))
    rhs = np.cumsum(_eigs_desc(_mean_power(a.data, b.data, exponent)))
    details = [((k,), lhs[k - 1], rhs[k - 1]) for k in range(1, a.rows + 1)]
    return _inequality_result("weak_majorization", details)


def check_antinorm_superadditivity(
    first: MatrixLike, second: MatrixLike, p: float, variant: str = "sum"
) -> CheckResult:
    """Superadditivity of the two basic symmetric anti-norms, p > 2.

    variant="sum":     sum of the k smallest eigenvalues
    variant="geomean": geometric mean of the k smallest eigenvalues

    Verifies ||P||_k + ||M||_k <= ||R||_k for k = 1..n.
    """
    a, b = require_square_pair(first, second)
    exponent = _exponent(p, Regime.ABOVE_TWO)
    if variant not in ("sum", "geomean"):
        raise UsageError(f"Unknown anti-norm variant {variant!r}; use 'sum' or 'geomean'")

    half_sum, half_diff = _half_sum_difference(a.data, b.data)
    p_up = _power_spectrum(half_sum, exponent)[::-1]
    m_up = _power_spectrum(half_diff, exponent)[::-1]
    r_up = scipy.linalg.eigvalsh(_mean_power(a.data, b.data, exponent))

    if variant == "sum":
        lhs = np.cumsum(p_up) + np.cumsum(m_up)
        rhs = np.cumsum(r_up)
    else:
        lhs = _prefix_geomeans(p_up) + _prefix_geomeans(m_up)
        rhs = _prefix_geomeans(r_up)

    details = [((k,), lhs[k - 1], rhs[k - 1]) for k in range(1, a.rows + 1)]
    return _inequality_result(f"antinorm_{variant}", details)


def check_weyl_split(
    first: MatrixLike,
    second: MatrixLike,
    exponent: float,
    j: int,
    k: int = 0,
    which: str = "cor3",
) -> CheckResult:
    """Single-eigenvalue consequences of the unitary-orbit inequalities.

    Indices j, k are 0-based:
        cor3 (exponent > 2):     lambda_{j+k+1}(P) + lambda-up_{k+1}(M) <= lambda_{j+1}(R)
        cor4 (0 < exponent < 2): lambda_{j+k+1}(R) <= lambda_{j+1}(P) + lambda_{k+1}(M)
        cor5 (exponent > 2):     lambda_{2j+1}(P (+) M) <= lambda_{j+1}(R)
    """
    a, b = require_square_pair(first, second)
    n = a.rows
    regime = Regime.BELOW_TWO if which == "cor4" else Regime.ABOVE_TWO
    result = validate_weyl_indices(n, j, k, which)
    if not result.valid:
        raise IndexRangeError(result.error_message or "invalid indices")
    j, k = result.sanitized_value
    e = _exponent(exponent, regime, "q" if which == "cor4" else "p")

    half_sum, half_diff = _half_sum_difference(a.data, b.data)
    p_down = _power_spectrum(half_sum, e)
    m_down = _power_spectrum(half_diff, e)
    r_down = _eigs_desc(_mean_power(a.data, b.data, e))

    if which == "cor3":
        lhs = p_down[j + k] + m_down[::-1][k]
        rhs = r_down[j]
    elif which == "cor4":
        lhs = r_down[j + k]
        rhs = p_down[j] + m_down[k]
    else:
        union = np.sort(np.concatenate([p_down, m_down]))[::-1]
        lhs = union[2 * j]
        rhs = r_down[j]

    return _inequality_result(f"weyl_{which}", [((j, k), lhs, rhs)])


def admissible_weyl_indices(n: int, which: str) -> list[tuple[int, int]]:
    """Every admissible (j, k) of check_weyl_split for dimension n."""
    if which in ("cor3", "cor4"):
        return [(j, k) for j in range(n) for k in range(n - j)]
    if which == "cor5":
        return [(j, 0) for j in range(n)]
    raise IndexRangeError(f"Unknown Weyl statement {which!r}")


def check_parallelogram_identity(first: MatrixLike, second: MatrixLike) -> CheckResult:
    """|A+B|^2 + |A-B|^2 = 2(|A|^2 + |B|^2), entry-wise.

    Details: (i, j, 0) real part, (i, j, 1) imaginary part of entry (i, j).
    """
    a, b = require_square_pair(first, second)
    s = a.data + b.data
    d = a.data - b.data
    lhs = s.conj().T @ s + d.conj().T @ d
    rhs = 2 * (a.data.conj().T @ a.data + b.data.conj().T @ b.data)

    details = []
    for i in range(a.rows):
        for j in range(a.cols):
            details.append(((i, j, 0), lhs[i, j].real, rhs[i, j].real))
            details.append(((i, j, 1), lhs[i, j].imag, rhs[i, j].imag))
    return _identity_result("parallelogram_identity", details)


def check_uniform_convexity(first: MatrixLike, second: MatrixLike, p: float) -> CheckResult:
    """Uniform convexity modulus estimate of the Schatten p-norm, p >= 2.

    With A, B normalized to unit norm and eps = ||A - B||_p:
        ||(A+B)/2||_p <= (1 - (eps/2)^p)^{1/p}
    """
    a, b = require_square_pair(first, second)
    exponent = _exponent(p, Regime.AT_LEAST_TWO)

    norm_a = schatten_norm(a, exponent)
    norm_b = schatten_norm(b, exponent)
    if norm_a == 0.0 or norm_b == 0.0:
        raise MatrixValidationError("Uniform convexity check needs nonzero A and B")

    unit_a = a.data / norm_a
    unit_b = b.data / norm_b
    eps = schatten_norm(unit_a - unit_b, exponent)
    lhs = schatten_norm((unit_a + unit_b) / 2, exponent)
    rhs = max(0.0, 1.0 - (eps / 2) ** exponent) ** (1.0 / exponent)
    return _inequality_result("uniform_convexity", [((0,), lhs, rhs)])


def check_symmetric_norm_clarkson(first: MatrixLike, second: MatrixLike, p: float) -> CheckResult:
    """Symmetric-norm Clarkson inequalities for every Ky Fan k-norm.

    For p >= 2 (reversed for 0 < p <= 2, both at p = 2):
        2||X|| <= ||Y|| <= 2^{p-1}||X||,  X = |A|^p + |B|^p,  Y = |A+B|^p + |A-B|^p

    Details: (k, 0) left bound, (k, 1) right bound.
    """
    a, b = require_square_pair(first, second)
    exponent = _exponent(p, Regime.POSITIVE)

    x = matrix_abs_power(a, exponent).data + matrix_abs_power(b, exponent).data
    y = (
        matrix_abs_power(a.data + b.data, exponent).data
        + matrix_abs_power(a.data - b.data, exponent).data
    )
    kx = np.cumsum(_eigs_desc(x))
    ky = np.cumsum(_eigs_desc(y))

    details = []
    for k in range(1, a.rows + 1):
        left = ((k, 0), 2 * kx[k - 1], ky[k - 1])
        right = ((k, 1), ky[k - 1], 2 ** (exponent - 1) * kx[k - 1])
        forward = [left, right]
        backward = [(index, rhs, lhs) for index, lhs, rhs in forward]
        if exponent > 2:
            details.extend(forward)
        elif exponent < 2:
            details.extend(backward)
        else:
            details.extend(forward + backward)
    return _inequality_result("symmetric_norm_clarkson", details)


def check_direct_sum_spectra(
    first: MatrixLike, second: MatrixLike, exponent: float, form: str = "halved"
) -> CheckResult:
    """Ky Fan consequences of the direct-sum operator inequalities (k = 1..2n).

    halved:    P (+) M against S (+) 0, S = (|A|^e + |B|^e)/2
    four_term: |A+B|^e (+) |A-B|^e against |A|^e (+) 0 and |B|^e (+) 0

    The direction follows the regime: e > 2 or 0 < e < 2.
    """
    a, b = require_square_pair(first, second)
    e = _exponent(exponent, Regime.NOT_TWO)
    n = a.rows
    zeros = np.zeros(n)

    if form == "halved":
        half_sum, half_diff = _half_sum_difference(a.data, b.data)
        outer = np.sort(
            np.concatenate([_power_spectrum(half_sum, e), _power_spectrum(half_diff, e)])
        )[::-1]
        inner = np.concatenate([_eigs_desc(_mean_power(a.data, b.data, e)), zeros])
        cum_outer = np.cumsum(outer)
        cum_inner = np.cumsum(inner)
        details = []
        for k in range(1, 2 * n + 1):
            if e > 2:
                details.append(((k,), cum_outer[k - 1], cum_inner[k - 1]))
            elif k < 2 * n:
                details.append(((k,), cum_inner[k - 1] / 2, cum_outer[k - 1]))
            else:
                details.append(((k,), cum_inner[k - 1], cum_outer[k - 1]))
    elif form == "four_term":
        outer = np.sort(
            np.concatenate(
                [_power_spectrum(a.data + b.data, e), _power_spectrum(a.data - b.data, e)]
            )
        )[::-1]
        cum_outer = np.cumsum(outer)
        cum_a = np.cumsum(np.concatenate([_power_spectrum(a.data, e), zeros]))
        cum_b = np.cumsum(np.concatenate([_power_spectrum(b.data, e), zeros]))
        details = []
        for k in range(1, 2 * n + 1):
            if e < 2:
                details.append(((k,), cum_outer[k - 1], 2 * (cum_a[k - 1] + cum_b[k - 1])))
            elif k < 2 * n:
                details.append(((k,), max(cum_a[k - 1], cum_b[k - 1]), cum_outer[k - 1]))
            else:
                details.append(((k,), 2 * (cum_a[k - 1] + cum_b[k - 1]), cum_outer[k - 1]))
    else:
        raise UsageError(f"Unknown direct-sum form {form!r}; use 'halved' or 'four_term'")

    return _inequality_result(f"direct_sum_{form}", details)


def check_cartesian_readings(matrix: MatrixLike) -> list[CheckResult]:
    """Both readings of the Cartesian-decomposition identity.

    With Z = X + iY and S = X^2 + Y^2, the squared direct sum is read either as
    |Z|^2 (+) |Z|^2 ("paired") or as |Z|^2 (+) |Z*|^2 ("adjoint"). Each reading
    gets its trace equality (index (0,) pairs with k = 2n) and Ky Fan bounds
    sum_{j<=k} lambda_j(reading) <= 2 sum_{j<=k} lambda_j(S (+) 0).
    """
    z = as_complex(matrix)
    n = require(validate_square(z.shape, "Z"), ShapeError)

    x = (z.data + z.data.conj().T) / 2
    y = (z.data - z.data.conj().T) / 2j
    s = x @ x + y @ y
    inner = np.cumsum(np.concatenate([_eigs_desc((s + s.conj().T) / 2), np.zeros(n)]))

    sigma_sq = singular_values(z) ** 2
    readings = {
        # |Z*|^2 = ZZ* has the same spectrum as |Z|^2 = Z*Z
        "paired": np.concatenate([sigma_sq, sigma_sq]),
        "adjoint": np.concatenate([sigma_sq, singular_values(z.data.conj().T) ** 2]),
    }

    results = []
    for reading, spectrum in readings.items():
        outer = np.cumsum(np.sort(spectrum)[::-1])
        details = [((0,), 2 * inner[-1], outer[-1])]
        details.extend(((k,), outer[k - 1], 2 * inner[k - 1]) for k in range(1, 2 * n + 1))
        results.append(_inequality_result(f"cartesian_{reading}", details))
    return results
