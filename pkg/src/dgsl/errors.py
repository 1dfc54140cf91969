"""Exception types shared across the package.

The CLI maps these onto process exit codes: ``ConfigError`` -> 1,
``DataError`` -> 2, ``NumericalError`` -> 3.
"""


class DGSLError(Exception):
    """Base class for all package errors."""


class ConfigError(DGSLError, ValueError):
    """Invalid solver or experiment configuration."""


class DataError(DGSLError, ValueError):
    """Malformed or inconsistent input data."""


class NumericalError(DGSLError, ArithmeticError):
    """A numerical routine failed (non-PD matrix, vanished denominator, NaN)."""
