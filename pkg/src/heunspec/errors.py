"""Exception hierarchy shared by the library and the command line."""


class HeunError(Exception):
    """Base class for every error raised by :mod:`heunspec`."""


class SeriesError(HeunError, ValueError):
    """Invalid truncated-series operation (variable mismatch, zero constant term, ...)."""


class DomainError(HeunError, ValueError):
    """An argument lies outside the region where an operation is defined."""


class DegeneracyError(HeunError, ZeroDivisionError):
    """A denominator of a closed form or a recursion vanished."""


class ConvergenceError(HeunError, RuntimeError):
    """An iterative procedure did not reach its tolerance."""


class ConfigError(HeunError, ValueError):
    """Inconsistent or malformed job configuration."""
