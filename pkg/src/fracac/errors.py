"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class FracACError(Exception):
    """Base class for every error raised by :mod:`fracac`."""


class DomainError(FracACError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class PastExtinction(DomainError):
    pass


class OutOfRange(DomainError):
    pass


class OriginSingularity(DomainError):
    pass


class UnderResolved(DomainError):
    pass


class NumericalFailure(FracACError, ArithmeticError):
    """A computation ran but could not deliver a trustworthy number."""


class NonConvergence(NumericalFailure):
    pass


class StepSizeTooLarge(NumericalFailure):
    pass


class DegenerateFit(NumericalFailure):
    pass


class BlowUp(NumericalFailure):
    pass


class LinearSolveFailure(NumericalFailure):
    pass


class UsageError(FracACError):
    pass


class ValidationError(FracACError, ValueError):
    pass
