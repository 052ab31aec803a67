"""Exception hierarchy.

Errors fall into three families, which the CLI maps onto exit codes:
malformed input (2), domain errors (3) and numerical failures (4).
"""

from __future__ import annotations


class WeakValError(Exception):
    """Base class for all errors raised by this package."""


class InputError(WeakValError, ValueError):
    """The input does not describe a valid object."""


class DomainError(WeakValError, ValueError):
    """Valid input for which the requested quantity is undefined."""


class NumericalError(WeakValError, ArithmeticError):
    """An iterative routine failed to reach its tolerance."""


class NotHermitian(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class ZeroVector(InputError):
    pass


class NotNormalized(InputError):
    pass


class NotUnitary(InputError):
    pass


class NotDensityMatrix(InputError):
    pass


class BadProbabilities(InputError):
    pass


class NotPowerOfTwoDim(InputError):
    pass


class BadParameter(InputError):
    pass


class ChannelNotTracePreserving(InputError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class OrthogonalStates(DomainError):
    def __init__(self, message: str, overlap_sq: float):
        super().__init__(message)
        self.overlap_sq = overlap_sq


class PhaseUndefined(DomainError):
    pass


class MixedStatePhase(DomainError):
    pass


class NotUnitaryObservable(DomainError):
    pass


class NoConvergence(NumericalError):
    pass
