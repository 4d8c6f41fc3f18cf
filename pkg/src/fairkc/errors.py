"""Exception types raised across the package."""


class InputError(ValueError):
    """Malformed or out-of-range user input."""


class LoadError(InputError):
    """A dataset file could not be turned into points and groups."""


class UnreachableError(InputError):
    """Some client lies farther than lambda from every center."""


class SizeError(InputError):
    """Instance too large for brute-force enumeration."""


class SolverError(RuntimeError):
    """The simplex solver gave up (iteration cap) or hit an inconsistency."""


class InfeasibleFairnessError(RuntimeError):
    """No radius makes the fairness LP feasible, even with every center reachable."""


class TimeLimitExceeded(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
