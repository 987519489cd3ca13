"""Constants for the orbitcert workbench."""

# Tolerances (all relative unless noted)
HERMITIAN_TOL: float = 1e-10  # |h_ij - conj(h_ji)| <= tol * (1 + max|h|)
PSD_TOL: float = 1e-8  # lambda_min >= -tol * (1 + ||H||)
ORTHO_TOL: float = 1e-10  # ||T*T - I||_max, absolute
RECON_TOL: float = 1e-9  # spectral reconstruction residual
CHECK_TOL: float = 1e-8  # inequality checks
IDENTITY_TOL: float = 1e-10  # identity (equality) checks
ALIGN_SLACK: float = 1e-9  # eigenvalue dominance slack for align_unitary
COMMUTE_TOL: float = 1e-12  # commuting fast path
EXACT_GAP_TOL: float = 1e-12  # "exact" certificates (commuting cells)
MAX_CERT_TOL: float = 1e-6  # largest tol_used a certificate may claim

# Orbit search defaults
DEFAULT_MAX_ITERATIONS: int = 500
DEFAULT_RESTARTS: int = 8
DEFAULT_STEP_INIT: float = 0.1
DEFAULT_GRAD_EPS: float = 1e-5
DEFAULT_TARGET_GAP: float = -1e-7
DEFAULT_SEED: int = 20210301
DEGENERATE_TOP_GAP: float = 1e-6  # top-two eigenvalue gap that triggers damping
DAMPING_FACTOR: float = 0.25
ARMIJO_C: float = 1e-4
MIN_STEP: float = 1e-12

# Suite defaults
DEFAULT_P_GRID: tuple[float, ...] = (2.5, 3.0, 4.0, 10.0)
DEFAULT_Q_GRID: tuple[float, ...] = (0.5, 1.0, 1.5)
DEFAULT_DIMS: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
DEFAULT_SEARCH_DIMS: tuple[int, ...] = (1, 2, 3)
MAX_DIM: int = 8
DEFAULT_TRIALS: int = 20
SCHEMA_VERSION: int = 1

# Environment
ENV_SEED: str = "ORBITCERT_SEED"

# CLI exit codes
EXIT_OK: int = 0
EXIT_CHECK_FAILED: int = 1
EXIT_USAGE: int = 2
EXIT_NOT_CONVERGED: int = 3

# Matrix text format
CMAT_SUFFIX: str = ".cmat"
