"""Exception types shared by the numeric modules."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ConvergenceError(RuntimeError):
    """A tolerance was not reached within the allowed work.

    ``best`` holds the best available estimate (may be ``None``) and
    ``diagnostics`` any extra information the caller may want to report.
    """

    def __init__(self, message, best=None, **diagnostics):
        super().__init__(message)
        self.best = best
        self.diagnostics = diagnostics


class EvaluationError(ArithmeticError):
    """An integrand returned a non-finite value."""

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class ConsistencyError(RuntimeError):
    """An internal physical constraint was violated (usually quadrature failure)."""
