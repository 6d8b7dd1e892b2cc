"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ApplicabilityError(ValueError):
    """A bound was requested outside the region where it is proved."""


class InvalidSystemError(ValueError):
    """Marginal and pairwise probabilities are mutually inconsistent."""


class MatrixError(ValueError):
    """A correlation matrix failed validation or could not be parsed."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature exhausted its evaluation budget."""
