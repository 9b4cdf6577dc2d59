"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class RangeError(ValueError):
    """A sufficient statistic lies outside the feasible set of the Dirichlet model.

    The feasible set is ``{s : s_j < 0, sum_j exp(s_j) <= 1}``.
    """


class ConvergenceError(ArithmeticError):
    """An iterative routine failed to converge."""


class NotPositiveDefiniteError(ArithmeticError):
    """A matrix that must be positive definite is not."""

    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix


class DatasetError(ValueError):
    """A compositional dataset failed validation.

    Attributes:
        rows: indices of the offending rows.
    """

    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = list(rows)
