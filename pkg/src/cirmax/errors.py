"""Exception hierarchy shared by all modules."""


class CirmaxError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(CirmaxError, ValueError):
    """Invalid model parameters, option terms or configuration."""


class DomainError(CirmaxError, ValueError):
    """Argument outside the region where a formula is defined."""


class AccuracyError(CirmaxError, ArithmeticError):
    """A numerical routine could not reach its accuracy target."""


class FellerWarning(UserWarning):
    """The shifted rate can reach its lower boundary (2 phi~ < alpha)."""


class BelowStartWarning(UserWarning):
    """A barrier below the start rate was requested; it is hit at time 0."""
