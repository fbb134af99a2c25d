"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class RankError(ValueError):
    """A trend matrix is not of full column rank."""


class IllConditioned(ArithmeticError):
    """A Cholesky factorization failed.

    ``min_pivot`` holds the smallest pivot reached before failure, when known.
    """

    def __init__(self, message, min_pivot=None):
        super().__init__(message)
        self.min_pivot = min_pivot


class SingularPrior(ArithmeticError):
    """The Fisher information is singular, so the Jeffreys prior vanishes."""


class Unreliable(RuntimeError):
    """An optimizer did not meet its convergence contract."""


class SamplerError(RuntimeError):
    """The MCMC chain could not move or too many draws were unusable."""
