"""Exception hierarchy shared by every nucalc module."""

from __future__ import annotations


class NuCalcError(Exception):
    """Base class for all library errors."""


class DomainError(NuCalcError, ValueError):
    """An argument lies outside the domain of the requested function."""


class ValidationError(DomainError):
    """A parameter bundle or control object violates its invariants."""


class PoleError(DomainError):
    """The gamma function (or a ratio of them) is evaluated at a pole."""


class NonDifferentiableError(DomainError):
    """A derivative was requested where the expression has a kink."""


class ConvergenceError(NuCalcError, ArithmeticError):
    """A series or quadrature did not reach its tolerance within budget.

    ``partial`` holds the best available estimate, when there is one.
    """

    def __init__(self, message: str, partial: float | None = None):
        super().__init__(message)
        self.partial = partial


class UnsupportedRegimeError(NuCalcError):
    """The operation is mathematically ill-posed for these parameters."""


class SearchFailure(NuCalcError):
    """A root/point search found no sign change on its scan grid."""


class ParseError(NuCalcError, ValueError):
    """Malformed expression text.

    Attributes
    ----------
    offset : int
        Byte offset in the source where parsing failed.
    expected : frozenset of str
        Tokens that would have been accepted at ``offset``.
    """

    def __init__(self, message: str, offset: int, expected=frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        exp = ", ".join(sorted(self.expected))
        full = f"{message} at offset {offset}"
        if exp:
            full += f" (expected one of: {exp})"
        super().__init__(full)


class IoError(NuCalcError, OSError):
    """A report or table could not be written."""
