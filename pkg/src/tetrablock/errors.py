"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class TetrablockError(Exception):
    """Base class for all errors raised by :mod:`tetrablock`."""


class DimensionError(TetrablockError, ValueError):
    """Operands have incompatible or non-square shapes."""


class ConvergenceError(TetrablockError):
    """An iterative kernel hit its iteration cap.

    ``residual`` holds the largest unconverged subdiagonal (or off-diagonal)
    magnitude at the moment the iteration was abandoned.
    """

    def __init__(self, msg: str, residual: float = float("nan")):
        super().__init__(msg)
        self.residual = residual


class NotPSDError(TetrablockError):
    def __init__(self, msg: str, min_eigenvalue: float):
        super().__init__(msg)
        self.min_eigenvalue = min_eigenvalue


class UnsolvableError(TetrablockError):
    """``D X D = R`` has no solution supported on ``ran(D)``."""

    def __init__(self, msg: str, residual: float):
        super().__init__(msg)
        self.residual = residual


class NotCommutingError(TetrablockError):
    def __init__(self, msg: str, residual: float):
        super().__init__(msg)
        self.residual = residual


class DeflationError(TetrablockError):
    """No joint eigenvector could be certified for a trailing block."""

    def __init__(self, msg: str, block_a=None, block_b=None, residual: float = float("nan")):
        super().__init__(msg)
        self.block_a = block_a
        self.block_b = block_b
        self.residual = residual


class NotContractionError(TetrablockError):
    def __init__(self, msg: str, norm: float):
        super().__init__(msg)
        self.norm = norm


class HypothesisError(TetrablockError):
    """Structural hypotheses on ``(A1, A2)`` (or on a triple) fail."""

    def __init__(self, msg: str, residuals: dict | None = None):
        super().__init__(msg)
        self.residuals = dict(residuals or {})


class ResolventError(TetrablockError):
    """``I - z T*`` is singular, so ``z`` lies outside the resolvent set."""


class PurityError(TetrablockError):
    pass


class TailError(TetrablockError):
    def __init__(self, msg: str, tail: float):
        super().__init__(msg)
        self.tail = tail


class EmptyBoundaryError(TetrablockError):
    pass


class PolynomialSyntaxError(TetrablockError, ValueError):
    pass
