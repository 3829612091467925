"""Exception and warning types raised by zlab."""


class ZlabError(Exception):
    """Base class for numeric failures (CLI exit code 3)."""


class DomainError(ZlabError, ValueError):
    """Argument outside the domain where an operation is defined."""


class PoleAt1(DomainError):
    """zeta was asked for its value at the pole s = 1."""


class AccuracyUnreachable(ZlabError):
    """The requested tolerance needs more series terms than allowed."""


class InvalidRectangle(DomainError):
    """A convexity rectangle contains the pole of zeta."""


class ToleranceNotMet(UserWarning):
    """Adaptive quadrature ran out of refinement depth."""


class GridTooCoarse(UserWarning):
    """A zero scan found fewer sign changes than the counting estimate."""


class UsageError(Exception):
    """Bad command-line or config input (CLI exit code 2)."""

    def __init__(self, message, flag=None):
        super().__init__(message)
        self.flag = flag
