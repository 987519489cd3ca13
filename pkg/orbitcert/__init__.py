"""orbitcert: certificates for Clarkson-McCarthy type operator inequalities.

Checks verify trace, eigenvalue and majorization inequalities directly;
constructions build explicit unitary/isometry certificates; orbit_search
finds the unitaries whose existence is only known abstractly.
"""

from __future__ import annotations

__version__ = "1.0.0"

from .certificates import Certificate, CertificateReport, Direction, verify_certificate
from .checks import CheckResult
from .config import SearchConfig, SuiteConfig
from .errors import OrbitCertError
from .matrices import ComplexMatrix, HermitianMatrix, PsdMatrix
from .orbit_search import SearchDirection, SearchTrace
from .suites import SuiteReport, run_suite

__all__ = [
    "Certificate",
    "CertificateReport",
    "CheckResult",
    "ComplexMatrix",
    "Direction",
    "HermitianMatrix",
    "OrbitCertError",
    "PsdMatrix",
    "SearchConfig",
    "SearchDirection",
    "SearchTrace",
    "SuiteConfig",
    "SuiteReport",
    "__version__",
    "run_suite",
    "verify_certificate",
]
