"""Exception types raised across the package."""


class HDBoostError(Exception):
    """Base class for all package errors."""


class DomainError(HDBoostError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigError(HDBoostError, ValueError):
    """Invalid configuration value."""


class LengthMismatch(HDBoostError, ValueError):
    pass


class ConstantColumn(HDBoostError, ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} has (near) zero variance")


class NotSymmetric(HDBoostError, ValueError):
    pass


class SingularGram(HDBoostError, ArithmeticError):
    """Gram matrix of the requested columns is numerically singular."""

    def __init__(self, message="Gram matrix is numerically singular", columns=None):
        self.columns = columns
        super().__init__(message)


class ZeroResidual(HDBoostError, ArithmeticError):
    """The residual vanished; no further boosting step is defined."""


class ParseError(HDBoostError, ValueError):
    def __init__(self, row, col, message="not a number"):
        self.row = row
        self.col = col
        super().__init__(f"row {row}, column {col}: {message}")


class MissingColumn(HDBoostError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"MissingColumn: no column named {name!r}")

    def __str__(self):
        return self.args[0]


class OracleUnavailable(HDBoostError, ValueError):
    """An oracle quantity was requested but the true coefficients are unknown."""


class InvalidThreshold(HDBoostError, ValueError):
    pass


class InsufficientEigenScan(HDBoostError, ValueError):
    """A bound check needs restricted eigenvalues beyond the scanned sizes."""


class NoConvergence(RuntimeWarning):
    """Iterative solver stopped at its sweep limit before converging."""
