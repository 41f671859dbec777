"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SpectralLabError(Exception):
    """Base class for every error raised by the package."""


class InvalidDimension(SpectralLabError, ValueError):
    pass


class InvalidDomain(SpectralLabError, ValueError):
    pass


class EmptyDomain(InvalidDomain):
    pass


class ParseError(SpectralLabError, ValueError):
    """Syntax error in a field expression; ``offset`` is the byte position."""

    def __init__(self, message: str, text: str, offset: int):
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at offset {offset} in {text!r}")


class EvaluationError(SpectralLabError, ArithmeticError):
    """Non-finite or undefined field value; ``point`` is the offending coordinate."""

    def __init__(self, message: str, point):
        self.point = tuple(float(p) for p in point)
        super().__init__(f"{message} at point {self.point}")


class InvalidPotential(SpectralLabError, ValueError):
    def __init__(self, message: str, point=None):
        self.point = None if point is None else tuple(float(p) for p in point)
        suffix = "" if point is None else f" at point {self.point}"
        super().__init__(message + suffix)


class GridError(SpectralLabError, ValueError):
    pass


class SolverError(SpectralLabError, RuntimeError):
    pass


class Infeasible(SpectralLabError, ValueError):
    pass


class NotApplicable(SpectralLabError, ValueError):
    pass


class InsufficientEigenvalues(SpectralLabError, ValueError):
    pass


class ConfigError(SpectralLabError, ValueError):
    """Invalid problem configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"config key {key!r}: {message}")
