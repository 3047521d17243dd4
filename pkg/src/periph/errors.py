"""Exception hierarchy shared by all modules."""


class PeriphError(Exception):
    """Base class for every error raised by :mod:`periph`."""


class EigenvalueError(PeriphError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BranchError(PeriphError, ValueError):
    """Input lies outside the region where log / n-th root branches are fixed."""


class AmbiguityError(PeriphError):
    """A choice that should be unique (lift, flag, decoration) is not."""


class AmbiguousRankError(PeriphError):
    def __init__(self, message, singular_values=None):
        super().__init__(message)
        self.singular_values = singular_values


class RegularityError(PeriphError):
    """Matrix has an eigenspace of dimension > 1 where a regular one is required."""


class DecorationMismatchError(PeriphError):
    """The flag of a decoration is not invariant under the peripheral pair."""


class WeylActionError(PeriphError, ValueError):
    """Permutation not compatible with the Jordan structure of a decoration."""


class DomainError(PeriphError, ValueError):
    """A logarithm or ratio is undefined for the given data."""


class SolverError(PeriphError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NonConvergenceError(SolverError):
    pass


class RamificationError(SolverError):
    """Jacobian rank collapsed: the path is too close to the ramification locus."""


class ContinuationError(SolverError):
    def __init__(self, message, index, cause=None):
        super().__init__(message, getattr(cause, "residual", None))
        self.index = index
        self.cause = cause


class CorpusIntegrityError(PeriphError):
    """Corpus data failed a checksum or a structural invariant."""


class GaugeError(PeriphError):
    """No transverse slice of the requested size exists at the base point."""
