"""Exception hierarchy.

Validation problems derive from ``ValueError`` so that callers which only
care about "bad input" can catch the builtin; the CLI maps these to exit
code 2 and everything else deriving from ``RoughSigError`` to exit code 1.
"""

from __future__ import annotations


class RoughSigError(Exception):
    """Base class for all library errors."""


class ValidationError(RoughSigError, ValueError):
    """Input rejected before any computation took place."""


class InvalidParameter(ValidationError):
    pass


class InvalidPower(ValidationError):
    pass


class PathTooShort(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class EmptyPanel(ValidationError):
    pass


class AsymmetricHighActivity(InvalidParameter):
    """Tempered stable with beta >= 1 must be symmetric (zero drift after pairing)."""


class TruncationTooShort(InvalidParameter):
    pass


class InvalidTau(RoughSigError):
    """The upper integration limit 1/H(tau) does not exceed tau."""


class DegeneratePath(RoughSigError):
    """A power variation vanished, so its logarithm is undefined."""


class IndeterminateActivity(DegeneratePath):
    """Denominator of the two-scale activity estimate is exactly zero."""


class NumericalFailure(RoughSigError):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class AllReplicationsDegenerate(RoughSigError):
    pass


class ExcessiveDegeneracy(RoughSigError):
    """More than the tolerated share of replications produced a degenerate path."""


class ReplicationError(RoughSigError):
    """Wraps a failure inside one Monte Carlo replication."""

    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"replication {index}: {type(cause).__name__}: {cause}")
        self.index = index
        self.cause = cause

    def __reduce__(self):
        return type(self), (self.index, self.cause)


class ParseError(ValidationError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row
        self.message = message

    def __reduce__(self):
        return type(self), (self.row, self.message)


class NonPositiveValue(ValidationError):
    def __init__(self, row: int, value: float):
        super().__init__(f"row {row}: value {value!r} is not strictly positive")
        self.row = row
        self.value = value

    def __reduce__(self):
        return type(self), (self.row, self.value)


class PeriodTooShort(ValidationError):
    def __init__(self, label: str, count: int, minimum: int):
        super().__init__(
            f"period {label!r} has {count} observations, fewer than the floor of {minimum}"
        )
        self.label = label
        self.count = count
        self.minimum = minimum

    def __reduce__(self):
        return type(self), (self.label, self.count, self.minimum)


class IoError(RoughSigError):
    """Reading or writing a file failed."""


__all__ = [name for name, obj in list(globals().items()) if isinstance(obj, type) and issubclass(obj, Exception)]
