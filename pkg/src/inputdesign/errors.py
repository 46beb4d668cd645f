"""Exception types shared across the package."""


class InputDesignError(Exception):
    """Base class for all errors raised by this package."""


class BadDimension(InputDesignError, ValueError):
    pass


class SymmetryViolation(InputDesignError, ValueError):
    """A spectrum is not conjugate symmetric, so its inverse DFT is not real."""


class NotPSD(InputDesignError, ValueError):
    pass


class BadHyperparameter(InputDesignError, ValueError):
    pass


class BadStructure(InputDesignError, ValueError):
    """A connector matrix does not have the per-frequency-pair block layout."""


class BadPhaseCount(InputDesignError, ValueError):
    pass


class EnumerationTooLarge(InputDesignError, ValueError):
    pass


class IllConditioned(InputDesignError, ValueError):
    pass


class Infeasible(InputDesignError):
    """The autocovariance is not attained by any input of the given power.

    Attributes
    ----------
    residual : float
        Best residual ``||S x - r||`` reached by the feasibility solver.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class DegenerateNegative(InputDesignError):
    pass


class NotConverged(InputDesignError):
    """Solver ran out of iterations before meeting its tolerance.

    The best iterate found is kept on ``solution`` so callers can still
    inspect or use it.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution
