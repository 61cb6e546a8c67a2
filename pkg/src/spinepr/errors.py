"""Exception hierarchy shared by all modules."""


class SpinEPRError(Exception):
    """Base class for errors raised by this package."""


class DomainError(SpinEPRError, ValueError):
    """A physical parameter lies outside its allowed range."""


class DimensionError(SpinEPRError, ValueError):
    """Matrix or subsystem dimensions are inconsistent."""


class ContractViolation(SpinEPRError, ArithmeticError):
    """A numerical contract (Hermiticity, real expectation, commutation) failed."""


class DegenerateError(SpinEPRError, ArithmeticError):
    """The requested quantity is undefined for this input (e.g. zero weight)."""
