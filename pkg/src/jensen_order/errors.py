"""Exception hierarchy shared by every module."""

from __future__ import annotations


class JensenOrderError(Exception):
    """Base class for all errors raised by this package."""


class NotHermitian(JensenOrderError, ValueError):
    pass


class NotPositiveSemidefinite(JensenOrderError, ValueError):
    def __init__(self, message: str, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DomainError(JensenOrderError, ValueError):
    pass


class InvalidInterval(JensenOrderError, ValueError):
    pass


class EigenvalueOnBoundary(JensenOrderError, ValueError):
    def __init__(self, message: str, eigenvalue: float, edge: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.edge = edge


class SpectrumOutOfWindow(JensenOrderError, ValueError):
    pass


class SingularBlock(JensenOrderError, ValueError):
    pass


class PremiseViolated(JensenOrderError, ValueError):
    pass


class GenerationExhausted(JensenOrderError, RuntimeError):
    pass


class NonConvergence(JensenOrderError, RuntimeError):
    """An iterative method hit its iteration cap.

    ``best`` carries whatever partial result the method considers most
    useful for diagnosis (a witness, factorization data, or None).
    """

    def __init__(self, message: str, best=None, iterations: int = 0, residual: float | None = None):
        super().__init__(message)
        self.best = best
        self.iterations = iterations
        self.residual = residual
