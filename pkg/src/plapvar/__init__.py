"""plapvar: certification and numerics for discrete anisotropic
p-Laplacian problems — hypothesis certificates for the three-solutions
theorem, critical-point solvers for the truncated boundary value and
whole-line problems, and a seeded property-verification battery.
"""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    DomainError,
    LatticeFunction,
    PeriodicTable,
    forward_diff,
    iterated_diff,
    phi,
    phi_antideriv,
)
from .nonlinearity import (  # noqa: E402
    Nonlinearity,
    example2_family,
    polynomial_family,
    power_family,
    zero_family,
)
from .bvp import BvpProblem, HigherOrderBvpProblem, StateX  # noqa: E402
from .certifier import Certificate, CertificationError, GrowthWitness, certify  # noqa: E402
from .homoclinic import HomoclinicProblem, TruncationReport, solve_homoclinic  # noqa: E402
from .solvers import CriticalPoint, SolverConfig, find_three, minimize_local, mountain_pass  # noqa: E402

__all__ = [
    "__version__",
    "DomainError",
    "LatticeFunction",
    "PeriodicTable",
    "forward_diff",
    "iterated_diff",
    "phi",
    "phi_antideriv",
    "Nonlinearity",
    "example2_family",
    "polynomial_family",
    "power_family",
    "zero_family",
    "BvpProblem",
    "HigherOrderBvpProblem",
    "StateX",
    "Certificate",
    "CertificationError",
    "GrowthWitness",
    "certify",
    "HomoclinicProblem",
    "TruncationReport",
    "solve_homoclinic",
    "CriticalPoint",
    "SolverConfig",
    "find_three",
    "minimize_local",
    "mountain_pass",
]
