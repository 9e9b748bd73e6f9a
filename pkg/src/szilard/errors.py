"""Exception hierarchy shared by all modules."""


class SzilardError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SzilardError, ValueError):
    """An argument violates a documented domain invariant."""


class CapabilityError(SzilardError):
    """The request is well formed but outside what the routine supports."""


class PrecisionError(SzilardError, ArithmeticError):
    """A result could not be computed to the required accuracy."""
