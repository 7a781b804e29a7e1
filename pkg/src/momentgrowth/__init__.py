"""Growth of indeterminate Hamburger moment problems, computed numerically.

The package evaluates orthonormal polynomials and Nevanlinna partials in
extended-range arithmetic, estimates order and type at the power, log and
log-log scales, and compares the companion entire functions of a moment
problem.
"""

from .errors import (
    ConfigurationError,
    DomainError,
    HypothesisError,
    InsufficientDataError,
    InternalConsistencyError,
    InvariantViolation,
    MomentGrowthError,
    NumericalInstabilityError,
)
from .sequences import CoeffSpec, classify_shape, spec_convergence_exponent
from .xreal import XComplex, XReal

__version__ = "0.1.0"

__all__ = [
    "CoeffSpec",
    "ConfigurationError",
    "DomainError",
    "HypothesisError",
    "InsufficientDataError",
    "InternalConsistencyError",
    "InvariantViolation",
    "MomentGrowthError",
    "NumericalInstabilityError",
    "XComplex",
    "XReal",
    "__version__",
    "classify_shape",
    "spec_convergence_exponent",
]
