"""Exception types raised across the package."""


class CheegerLabError(Exception):
    """Base class for all package errors."""


class KernelError(CheegerLabError, ValueError):
    """Invalid transition matrix input."""


class NotStochastic(KernelError):
    pass


class NotIrreducible(KernelError):
    pass


class NegativeEntry(KernelError):
    pass


class NoPositiveEntry(CheegerLabError):
    pass


class TooManyStates(CheegerLabError):
    pass


class NotReversible(CheegerLabError):
    pass


class NotLazy(CheegerLabError):
    pass


class EigensolveFailed(CheegerLabError):
    pass


class ZeroDenominator(CheegerLabError, ZeroDivisionError):
    pass


class PreconditionViolated(CheegerLabError):
    """A rearrangement fixture does not satisfy the dominance preconditions."""


class InconsistentParams(CheegerLabError, ValueError):
    pass


class ConcavityRequired(CheegerLabError):
    pass


class NoFeasibleB(CheegerLabError):
    """No set B matches the required stationary measure for any candidate A."""


class InvalidSpec(CheegerLabError, ValueError):
    pass
