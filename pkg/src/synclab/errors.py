"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    pass


class DomainError(ValueError):
    pass


class BudgetError(ValueError):
    """A request exceeds the enumeration or quadrature budget of an exact method."""


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class DegenerateEstimatorError(ValueError):
    pass


class ConditioningError(ValueError):
    def __init__(self, message: str, degree: int):
        super().__init__(f"{message} (first ill-conditioned degree: {degree})")
        self.degree = degree


class UsageError(ValueError):
    """Bad command-line input: unknown flags, missing columns, empty data."""
