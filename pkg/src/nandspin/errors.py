"""Exception hierarchy shared by the kernels and the public API."""


class NandSpinError(Exception):
    """Base class for every error raised by this package."""


class InputDomainError(NandSpinError, ValueError):
    """An argument lies outside the domain where the model is defined."""


class ConfigurationError(NandSpinError, ValueError):
    """Inconsistent or unusable parameters (zero volume, oversized dt, bad config key)."""

    def __init__(self, message, key=None, line=None):
        where = ""
        if key is not None:
            where = f" [key '{key}'" + (f", line {line}" if line is not None else "") + "]"
        super().__init__(message + where)
        self.key = key
        self.line = line


class SequencingError(NandSpinError, RuntimeError):
    """Operating modes requested out of protocol order."""


class PreconditionError(NandSpinError, RuntimeError):
    """A device operation was requested from a state that forbids it."""


class SolverError(NandSpinError, RuntimeError):
    """Newton failed even after the allowed number of step halvings."""

    def __init__(self, time):
        super().__init__("Newton failed to converge at t = %.6e s" % time)
        self.time = time

    def __reduce__(self):
        return (type(self), (self.time,))
