"""Exception hierarchy shared by every qbailey module."""

from __future__ import annotations


class QSeriesError(Exception):
    """Base class for all errors raised by qbailey."""


class LatticeError(QSeriesError):
    """An exponent does not live on the requested lattice."""


class PrecisionError(QSeriesError):
    """A series is not known to the order an operation needs."""


class OutOfRangeError(PrecisionError):
    """A coefficient was requested above the truncation order."""


class SeriesZeroDivisionError(QSeriesError, ZeroDivisionError):
    """Division by a series that is zero up to its known order."""


class PoleError(QSeriesError):
    """A factor in a denominator position vanishes identically."""


class DivergenceError(QSeriesError):
    """An infinite product or sum cannot converge formally."""


class ContractError(QSeriesError):
    """A term generator broke its declared valuation bound."""


class NonTerminationError(QSeriesError):
    """A summation hit its hard index cap before terminating."""


class UsageError(QSeriesError):
    """Bad identity id, parameter, or configuration."""


class DslError(QSeriesError):
    """A malformed DSL expression, positioned at ``line:col``."""

    def __init__(self, message: str, line: int = 1, col: int = 1, expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        super().__init__(self.diagnostic())

    def diagnostic(self) -> str:
        text = f"{self.line}:{self.col}: {self.message}"
        if self.expected:
            text += " (expected one of: " + ", ".join(self.expected) + ")"
        return text


class BindingError(DslError):
    """An identifier is used outside the binder that introduces it."""
