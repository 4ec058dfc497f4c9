"""Exception types raised across the package."""


class FDivOTError(Exception):
    """Base class for all package errors."""


class InputError(FDivOTError, ValueError):
    """Malformed or out-of-contract input (NaN, shape mismatch, bad field)."""


class ParameterError(InputError):
    """Unknown generator name or parameter outside its admissible range."""


class DomainError(FDivOTError, ValueError):
    """Potentials outside the admissible set for the given generator."""


class NumericalError(FDivOTError, ArithmeticError):
    """A scalar root-find or transform produced a non-finite result."""
