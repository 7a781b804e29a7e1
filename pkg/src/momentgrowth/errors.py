"""Exception hierarchy shared by every module."""


class MomentGrowthError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MomentGrowthError, ValueError):
    """An argument lies outside the domain of a function."""


class ConfigurationError(MomentGrowthError, ValueError):
    """Bad family parameters, unknown names, malformed configs."""


class InsufficientDataError(MomentGrowthError):
    """Too few usable samples for an estimator."""


class HypothesisError(MomentGrowthError):
    """Hypotheses of a growth result are not numerically satisfied."""


class InternalConsistencyError(MomentGrowthError, ArithmeticError):
    """Two independent computations of the same quantity disagree."""


class NumericalInstabilityError(InternalConsistencyError):
    """Forward recurrence drifted beyond the accepted threshold."""


class InvariantViolation(MomentGrowthError, AssertionError):
    """A proven inequality failed on computed data."""
