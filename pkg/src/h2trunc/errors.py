"""Exception types raised by the library.

Every error derives from :class:`AlgebraError` (itself a ``ValueError``) so
callers can catch domain failures in one place; the CLI maps them to exit
code 1 and parse problems (:class:`ParseError`) to exit code 2.
"""

from __future__ import annotations


class AlgebraError(ValueError):
    """Base class for all domain errors."""


class ParseError(AlgebraError):
    pass


class NotPrime(AlgebraError):
    pass


class NotAUnit(AlgebraError):
    pass


class UnsupportedRing(AlgebraError):
    pass


class ZeroDenominator(AlgebraError):
    pass


class RingMismatch(AlgebraError):
    pass


class OrderMismatch(AlgebraError):
    pass


class NonSquareTruncation(AlgebraError):
    pass


class PrimeMismatch(AlgebraError):
    pass


class BoundsTooSmall(AlgebraError):
    pass


class RankMismatch(AlgebraError):
    pass


class IndexOutOfRange(AlgebraError):
    pass


class PrecViolated(AlgebraError):
    pass


class RationalityViolated(AlgebraError):
    pass


class ConstantRatio(AlgebraError):
    pass


class BadIndex(AlgebraError):
    pass


class NotDivisible(AlgebraError):
    pass


class BadWindow(AlgebraError):
    pass
