"""Exception hierarchy shared by all solvers."""


class QuotientError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(QuotientError, ValueError):
    pass


class PreconditionError(QuotientError, ValueError):
    pass


class DegenerateError(QuotientError, ArithmeticError):
    """A quotient or update is undefined at the given vector.

    ``endpoint`` names the candidate eigenvalue the degeneracy points to:
    ``"inf"`` for a vanishing denominator, ``"0"`` for a vanishing numerator,
    ``None`` when neither interpretation applies.
    """

    def __init__(self, message, endpoint=None):
        super().__init__(message)
        self.endpoint = endpoint


class UndefinedPhaseError(DegenerateError):
    """The inner product fixing the phase of an optimal quotient vanishes.

    The modulus is still well defined and travels with the exception.
    """

    def __init__(self, message, magnitude):
        super().__init__(message, endpoint=None)
        self.magnitude = magnitude


class RankDeficiencyError(QuotientError, ArithmeticError):
    pass


class IndefiniteError(QuotientError, ValueError):
    """No positive definite element found where one was required."""

    def __init__(self, message, best_min_eig=None):
        super().__init__(message)
        self.best_min_eig = best_min_eig


class SingularMatrixError(QuotientError, ArithmeticError):
    pass


class SingularPencilError(QuotientError, ArithmeticError):
    pass


class EvaluationError(QuotientError, ArithmeticError):
    """A user supplied map returned non-finite values."""

    def __init__(self, message, z=None):
        super().__init__(message)
        self.z = z


class NonHomogeneousError(PreconditionError):
    pass


class UnsupportedExponentError(PreconditionError):
    pass


class InconsistencyError(QuotientError, RuntimeError):
    """Optimizer output contradicts the stationarity conditions it should meet."""
