"""Exception hierarchy.

Input problems derive from :class:`ModelError` (a ``ValueError``); numerical
failures derive from :class:`NumericalError` (a ``RuntimeError``) and carry the
partial result computed before giving up.
"""


class ModelError(ValueError):
    pass


class NonPositiveWeight(ModelError):
    pass


class NegativeKernelEntry(ModelError):
    pass


class NonPositiveGamma(ModelError):
    pass


class InvalidGroupCount(ModelError):
    pass


class NegativeEpsilon(ModelError):
    pass


class InvalidExponent(ModelError):
    pass


class DimensionMismatch(ModelError):
    pass


class InvalidStrategy(ModelError):
    pass


class SpaceMismatch(ModelError):
    pass


class OutOfRangeState(ModelError):
    pass


class NotAnEquilibrium(ModelError):
    pass


class BudgetOutOfRange(ModelError):
    pass


class LossOutOfRange(ModelError):
    pass


class DegenerateLoss(ModelError):
    """The loss is identically zero, so there is no frontier to trace."""


class TooManySites(ModelError):
    pass


class WeightMismatch(ModelError):
    pass


class MappingInconsistent(ModelError):
    pass


class NumericalError(RuntimeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoConvergence(NumericalError):
    pass


class DegenerateEigenpair(NumericalError):
    pass


class StepTooLarge(NumericalError):
    pass


class MonotonicityViolation(NumericalError):
    pass


class MaximalityUncertified(NumericalError):
    pass


class ReducibleKernelWarning(UserWarning):
    pass
