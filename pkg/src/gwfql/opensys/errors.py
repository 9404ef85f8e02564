class SolverError(ArithmeticError):
    """Numerical failure in the open-system solver."""


class StabilityError(SolverError):
    pass


class TruncationError(SolverError):
    pass


class CoherenceError(SolverError):
    pass
