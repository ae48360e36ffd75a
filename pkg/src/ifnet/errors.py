"""Exception hierarchy shared by every ifnet module."""


class IFNError(Exception):
    """Base class for all errors raised by ifnet."""


class InvalidInputError(IFNError, ValueError):
    """Malformed or out-of-domain input (shapes, non-finite values, bad trees)."""


class DegenerateVariableError(InvalidInputError):
    """A variable has zero (or negative) variance."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"variable {index} has non-positive variance")


class InvalidWeightError(InvalidInputError):
    """A constructor received a non-positive edge weight."""


class NotChordalError(InvalidInputError):
    """An operation that needs a chordal graph was given a non-chordal one."""


class ConfigError(IFNError, ValueError):
    """Invalid constructor or run configuration."""


class NumericError(IFNError, ArithmeticError):
    """Singular or non positive-definite matrices, divergent quantities."""


class UndefinedCentralityError(NumericError):
    """Eigenvector centrality requested on a graph without edges."""
