"""Exception types raised across the package."""


class MagbandsError(Exception):
    """Base class for all package errors."""


class OutOfRange(MagbandsError, ValueError):
    pass


class LossOfAccuracy(MagbandsError, ArithmeticError):
    pass


class PoleEncountered(MagbandsError, ArithmeticError):
    pass


class ZeroField(MagbandsError, ValueError):
    pass


class DomainError(MagbandsError, ValueError):
    pass


class BracketMiss(MagbandsError, RuntimeError):
    def __init__(self, msg, k=None):
        super().__init__(msg)
        self.k = k


class ConvergenceFailure(MagbandsError, RuntimeError):
    pass


class TruncationInadequate(MagbandsError, ValueError):
    pass


class SplitThreshold(MagbandsError, ValueError):
    pass


class NotSplitting(MagbandsError, ValueError):
    pass


class DiscriminantNonpositive(MagbandsError, ArithmeticError):
    pass


class Unresolved(MagbandsError, RuntimeError):
    pass
