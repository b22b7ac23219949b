"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1,
numerical anomalies exit 2, cone-invariance violations exit 3.
"""


class TentCocycleError(Exception):
    """Base class for all package errors."""


class ConfigurationError(TentCocycleError):
    """Invalid parameters, driver specs, or CLI/config-file input."""


class DomainError(TentCocycleError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericalAnomalyError(TentCocycleError):
    """An estimator hit a state it cannot make sense of (zero denominator,
    non-convergence, rank collapse)."""


class SingularCocycleError(NumericalAnomalyError):
    """A two-state cocycle step had a non-positive determinant."""


class ConeViolationError(TentCocycleError):
    """A machine-checked cone-invariance trial found a counterexample."""
