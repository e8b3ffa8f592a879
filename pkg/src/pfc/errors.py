"""Exception hierarchy shared by every module of the toolkit."""


class PFCError(Exception):
    """Base class for all toolkit errors."""


class InputError(PFCError, ValueError):
    """Malformed or out-of-contract input (maps to CLI exit code 2)."""


class DimensionError(InputError):
    pass


class NegativeEntryError(InputError):
    """A strictly negative entry was found where nonnegativity is required.

    ``location`` holds the zero-based ``(row, col)`` of the first offender.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ReducibleError(InputError):
    pass


class IrreducibleError(InputError):
    pass


class PreconditionError(InputError):
    pass


class ConeError(InputError):
    pass


class KernelError(InputError):
    """Kernel sample violates a sign requirement; ``point`` is ``(s, t)``."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ConvergenceError(PFCError, RuntimeError):
    """An iteration exhausted its budget (maps to CLI exit code 3).

    ``best`` carries the best available partial result, if any.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class PositivityError(ConvergenceError):
    """A vector that must be strictly positive was not (numerical breakdown)."""


class HarnessError(ConvergenceError):
    """The cone harness failed; ``best`` holds an oracle fallback answer."""
